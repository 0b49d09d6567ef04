#pragma once

// Fixed-step implicit Euler for M x' + K x = f(t) with constant M, K.

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pitsim/model.hpp"

namespace pitsim {

using Forcing = std::function<Vector(double)>;

/// Factorization of (M/h + K) reused for every step of a sweep.
class LinearSystemSolver {
public:
    /// Throws NonpositiveStep for h <= 0 and SingularSystem when a pivot of
    /// the LU factorization falls below 1e-14 times the matrix max-norm.
    LinearSystemSolver(const Matrix& mass, const Matrix& stiffness, double step);

    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(scaled_mass_.rows()); }

    /// x_next = (M/h + K)^{-1} (f + (M/h) x).
    [[nodiscard]] Vector advance(const Vector& x, const Vector& f) const;

private:
    double step_;
    Matrix scaled_mass_;  // M / h
    Eigen::PartialPivLU<Matrix> lu_;
};

struct SweepResult {
    Vector state;
    std::size_t solves = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::size_t solves = 0;
};

/// Step layout of [t_start, t_end] for nominal step h: `full_steps` steps of
/// length h, plus one shortened step when the ratio is not within 1e-9 of an
/// integer. Computed from the interval endpoints only.
struct StepPlan {
    std::size_t full_steps = 0;
    bool shortened_last = false;
    double last_step = 0.0;

    [[nodiscard]] std::size_t total() const { return full_steps + (shortened_last ? 1 : 0); }
};

[[nodiscard]] StepPlan plan_steps(double t_start, double t_end, double h);

[[nodiscard]] SweepResult implicit_euler_sweep(const Matrix& mass, const Matrix& stiffness,
                                               const Forcing& f, const Vector& x_start,
                                               double t_start, double t_end, double h);

/// Same, with a prefactorized solver for the nominal step. A shortened final
/// step refactorizes locally; `solver` is never modified.
[[nodiscard]] SweepResult implicit_euler_sweep(const LinearSystemSolver& solver,
                                               const Matrix& mass, const Matrix& stiffness,
                                               const Forcing& f, const Vector& x_start,
                                               double t_start, double t_end);

[[nodiscard]] Trajectory sweep_with_trajectory(const Matrix& mass, const Matrix& stiffness,
                                               const Forcing& f, const Vector& x_start,
                                               double t_start, double t_end, double h);

[[nodiscard]] Trajectory sweep_with_trajectory(const LinearSystemSolver& solver,
                                               const Matrix& mass, const Matrix& stiffness,
                                               const Forcing& f, const Vector& x_start,
                                               double t_start, double t_end);

}  // namespace pitsim
