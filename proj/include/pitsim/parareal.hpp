#pragma once

// Parareal driver with interchangeable coarse propagators.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitsim/integrator.hpp"
#include "pitsim/model.hpp"
#include "pitsim/mpde.hpp"
#include "pitsim/propagator.hpp"

namespace pitsim {

/// Which coarse propagator G the driver uses.
///   classical  - implicit Euler with the coarse step on the original system
///   dc         - same, with the source replaced by its period mean
///   fft:M      - same, with the source truncated to M harmonics
///   mpde:N_p   - Galerkin multirate propagator with N_p basis functions
struct CoarseVariant {
    enum class Kind { Classical, Dc, Fft, Mpde };

    Kind kind = Kind::Classical;
    std::size_t order = 0;  // harmonics for Fft, basis size for Mpde

    /// Throws ValidationError on malformed text.
    [[nodiscard]] static CoarseVariant parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const CoarseVariant&, const CoarseVariant&) = default;
};

enum class JumpMetric {
    /// max_n |X_n^(k) - X_n^(k-1)| / max_n |X_n^(k)|
    SuccessiveIterates,
    /// max_n |X_n^(k) - F(X_{n-1}^(k-1))| / max_n |X_n^(k)|
    FineCoarseDefect,
};

struct PararealConfig {
    std::size_t windows = 40;
    double coarse_step = 3e-4;
    double fine_step = 1e-6;
    double tolerance = 1e-6;
    std::size_t max_iterations = 50;
    CoarseVariant coarse;
    std::size_t workers = 1;
    JumpMetric metric = JumpMetric::SuccessiveIterates;
    MpdeLift mpde_lift = MpdeLift::PeriodicRipple;  // used by mpde variants only

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

struct SolveLedger {
    std::size_t state_size = 0;
    std::size_t fine_solves = 0;
    std::size_t fine_system_size = 0;
    std::size_t coarse_solves = 0;
    std::size_t coarse_system_size = 0;

    /// One unit per solve of a system of the original size; larger systems
    /// count proportionally to their dimension.
    [[nodiscard]] double cost_units() const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double jump = 0.0;
    std::size_t fine_solves = 0;    // sequential, i.e. one window
    std::size_t coarse_solves = 0;  // all windows
    double cumulative_cost = 0.0;
};

struct PararealReport {
    std::string variant;
    std::size_t iterations = 0;  // corrected sweeps; the initial coarse sweep is iteration 0
    bool converged = false;
    std::vector<double> jumps;   // one per corrected sweep
    std::vector<IterationRecord> history;
    /// Synchronization states X_0..X_N for every iteration 0..iterations.
    std::vector<std::vector<Vector>> sync_states;
    std::vector<double> sync_times;
    SolveLedger ledger;

    [[nodiscard]] double cost_units() const { return ledger.cost_units(); }
    [[nodiscard]] const std::vector<Vector>& final_states() const { return sync_states.back(); }
};

/// T_n = t0 + n (T - t0) / N, with T_N = T exactly.
[[nodiscard]] std::vector<double> window_boundaries(double t0, double t_end, std::size_t windows);

[[nodiscard]] std::unique_ptr<ImplicitEulerPropagator> make_fine_propagator(
    const LinearDaeModel& model, double fine_step);

[[nodiscard]] std::unique_ptr<Propagator> make_coarse_propagator(const LinearDaeModel& model,
                                                                 const CoarseVariant& variant,
                                                                 double coarse_step,
                                                                 MpdeLift lift = MpdeLift::PeriodicRipple);

[[nodiscard]] SweepResult fine_propagate(const LinearDaeModel& model, const Vector& x_start,
                                         double t_start, double t_end, double fine_step);

[[nodiscard]] SweepResult coarse_propagate_classical(const LinearDaeModel& model,
                                                     const Vector& x_start, double t_start,
                                                     double t_end, double coarse_step);

/// Coarse step on the system driven by the mean plus `harmonics` lowest
/// harmonics of the source. harmonics == 0 is the DC variant.
[[nodiscard]] SweepResult coarse_propagate_reduced(const LinearDaeModel& model,
                                                   const Vector& x_start, double t_start,
                                                   double t_end, double coarse_step,
                                                   std::size_t harmonics);

/// Model with its source replaced by the truncated Fourier series.
[[nodiscard]] LinearDaeModel reduced_model(const LinearDaeModel& model, std::size_t harmonics);

/// Relative jump between two sequences of synchronization states.
/// Throws InvalidArgument on length mismatch, DegenerateNorm if every state
/// in `curr` is zero.
[[nodiscard]] double jump_metric(std::span<const Vector> prev, std::span<const Vector> curr);

[[nodiscard]] PararealReport parareal_run(const LinearDaeModel& model,
                                          const PararealConfig& config);

/// Driver with caller-supplied propagators.
[[nodiscard]] PararealReport parareal_run(const LinearDaeModel& model,
                                          const PararealConfig& config, const Propagator& fine,
                                          const Propagator& coarse);

/// Fine trajectories of every window started from `sync_states` (X_0..X_N);
/// the last state of window n is the pre-jump value at T_n.
[[nodiscard]] std::vector<Trajectory> fine_trajectories(const LinearDaeModel& model,
                                                        const PararealConfig& config,
                                                        std::span<const Vector> sync_states);

/// Runs fn(0..count-1) on up to `workers` threads. Each index is handled by
/// exactly one thread; the first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn);

}  // namespace pitsim

#include "pitsim/detail/parallel_for.hpp"
