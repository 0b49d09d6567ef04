#include "pitsim/integrator.hpp"

#include <cmath>
#include <string>

#include "pitsim/error.hpp"

namespace pitsim {

namespace {

constexpr double kPivotTolerance = 1e-14;
constexpr double kStepRatioTolerance = 1e-9;

void check_shapes(const Matrix& mass, const Matrix& stiffness) {
    if (mass.rows() != mass.cols() || stiffness.rows() != stiffness.cols() ||
        mass.rows() != stiffness.rows())
        throw Error(ErrorCode::InvalidArgument,
                    "mass and stiffness matrices must be square and of equal size");
}

void check_interval(double t_start, double t_end) {
    if (!(t_end >= t_start))
        throw Error(ErrorCode::InvalidArgument, "sweep end time precedes start time");
}

// Time at the end of step k (1-based), measured from the window start.
double step_time(const StepPlan& plan, double t_start, double t_end, double h, std::size_t k) {
    if (k == plan.total()) return t_end;
    return t_start + static_cast<double>(k) * h;
}

template <class Visit>
std::size_t run_sweep(const LinearSystemSolver& solver, const Matrix& mass,
                      const Matrix& stiffness, const Forcing& f, Vector& x, double t_start,
                      double t_end, Visit&& visit) {
    check_interval(t_start, t_end);
    if (static_cast<std::size_t>(x.size()) != solver.size())
        throw Error(ErrorCode::InvalidArgument, "state length does not match the system");
    const double h = solver.step();
    const StepPlan plan = plan_steps(t_start, t_end, h);
    for (std::size_t k = 1; k <= plan.full_steps; ++k) {
        const double t = step_time(plan, t_start, t_end, h, k);
        x = solver.advance(x, f(t));
        visit(t, x);
    }
    if (plan.shortened_last) {
        const LinearSystemSolver last(mass, stiffness, plan.last_step);
        x = last.advance(x, f(t_end));
        visit(t_end, x);
    }
    return plan.total();
}

}  // namespace

LinearSystemSolver::LinearSystemSolver(const Matrix& mass, const Matrix& stiffness, double step)
    : step_(step) {
    check_shapes(mass, stiffness);
    if (!(step > 0.0) || !std::isfinite(step))
        throw Error(ErrorCode::NonpositiveStep, "step size must be positive, got " +
                                                    std::to_string(step));
    scaled_mass_ = mass / step;
    const Matrix system = scaled_mass_ + stiffness;
    lu_.compute(system);
    const double scale = system.cwiseAbs().maxCoeff();
    const double smallest_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(scale > 0.0) || !(smallest_pivot > kPivotTolerance * scale))
        throw Error(ErrorCode::SingularSystem,
                    "implicit Euler system matrix is singular (smallest pivot " +
                        std::to_string(smallest_pivot) + ")");
}

Vector LinearSystemSolver::advance(const Vector& x, const Vector& f) const {
    return lu_.solve(f + scaled_mass_ * x);
}

StepPlan plan_steps(double t_start, double t_end, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw Error(ErrorCode::NonpositiveStep, "step size must be positive");
    check_interval(t_start, t_end);
    StepPlan plan;
    const double length = t_end - t_start;
    if (length == 0.0) return plan;
    const double ratio = length / h;
    const double nearest = std::round(ratio);
    if (nearest >= 1.0 && std::abs(ratio - nearest) <= kStepRatioTolerance) {
        plan.full_steps = static_cast<std::size_t>(nearest);
        return plan;
    }
    plan.full_steps = static_cast<std::size_t>(std::floor(ratio));
    plan.shortened_last = true;
    plan.last_step = t_end - (t_start + static_cast<double>(plan.full_steps) * h);
    return plan;
}

SweepResult implicit_euler_sweep(const Matrix& mass, const Matrix& stiffness, const Forcing& f,
                                 const Vector& x_start, double t_start, double t_end, double h) {
    const LinearSystemSolver solver(mass, stiffness, h);
    return implicit_euler_sweep(solver, mass, stiffness, f, x_start, t_start, t_end);
}

SweepResult implicit_euler_sweep(const LinearSystemSolver& solver, const Matrix& mass,
                                 const Matrix& stiffness, const Forcing& f,
                                 const Vector& x_start, double t_start, double t_end) {
    SweepResult result{x_start, 0};
    result.solves = run_sweep(solver, mass, stiffness, f, result.state, t_start, t_end,
                              [](double, const Vector&) {});
    return result;
}

Trajectory sweep_with_trajectory(const Matrix& mass, const Matrix& stiffness, const Forcing& f,
                                 const Vector& x_start, double t_start, double t_end, double h) {
    const LinearSystemSolver solver(mass, stiffness, h);
    return sweep_with_trajectory(solver, mass, stiffness, f, x_start, t_start, t_end);
}

Trajectory sweep_with_trajectory(const LinearSystemSolver& solver, const Matrix& mass,
                                 const Matrix& stiffness, const Forcing& f,
                                 const Vector& x_start, double t_start, double t_end) {
    Trajectory traj;
    traj.times.push_back(t_start);
    traj.states.push_back(x_start);
    Vector x = x_start;
    traj.solves = run_sweep(solver, mass, stiffness, f, x, t_start, t_end,
                            [&](double t, const Vector& state) {
                                traj.times.push_back(t);
                                traj.states.push_back(state);
                            });
    return traj;
}

}  // namespace pitsim
