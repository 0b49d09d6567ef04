#include "pitsim/parareal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "pitsim/error.hpp"
#include "pitsim/mpde.hpp"

namespace pitsim {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ValidationError, "parareal." + field + ": " + what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Synchronization points entering the jump: n = 1..N-1, or n = 1 alone for a
// single window.
std::span<const Vector> interior(const std::vector<Vector>& states) {
    const std::size_t windows = states.size() - 1;
    const std::size_t count = windows >= 2 ? windows - 1 : 1;
    return std::span<const Vector>(states).subspan(1, count);
}

}  // namespace

CoarseVariant CoarseVariant::parse(std::string_view text) {
    if (text == "classical") return {Kind::Classical, 0};
    if (text == "dc") return {Kind::Dc, 0};
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        const auto head = text.substr(0, colon);
        const auto tail = text.substr(colon + 1);
        std::size_t order = 0;
        const auto [end, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), order);
        const bool numeric = ec == std::errc() && end == tail.data() + tail.size() && !tail.empty();
        if (head == "fft" && numeric) return {Kind::Fft, order};
        if (head == "mpde" && numeric && order >= 1) return {Kind::Mpde, order};
    }
    throw Error(ErrorCode::ValidationError,
                "unknown coarse variant '" + std::string(text) +
                    "' (expected classical, dc, fft:M or mpde:N_p with N_p >= 1)");
}

std::string CoarseVariant::to_string() const {
    switch (kind) {
        case Kind::Classical: return "classical";
        case Kind::Dc: return "dc";
        case Kind::Fft: return "fft:" + std::to_string(order);
        case Kind::Mpde: return "mpde:" + std::to_string(order);
    }
    return "unknown";
}

void PararealConfig::validate() const {
    if (windows < 1) invalid("N", "must be at least 1");
    if (!positive_finite(coarse_step)) invalid("coarse_step", "must be positive and finite");
    if (!positive_finite(fine_step)) invalid("fine_step", "must be positive and finite");
    if (fine_step > coarse_step) invalid("fine_step", "must not exceed coarse_step");
    if (!positive_finite(tolerance)) invalid("tol", "must be positive and finite");
    if (max_iterations < 1) invalid("max_iter", "must be at least 1");
    if (workers < 1) invalid("workers", "must be at least 1");
    if (coarse.kind == CoarseVariant::Kind::Mpde && coarse.order < 1)
        invalid("coarse_variant", "mpde needs at least one basis function");
}

double SolveLedger::cost_units() const {
    const auto n = static_cast<double>(state_size);
    return static_cast<double>(fine_solves) * static_cast<double>(fine_system_size) / n +
           static_cast<double>(coarse_solves) * static_cast<double>(coarse_system_size) / n;
}

std::vector<double> window_boundaries(double t0, double t_end, std::size_t windows) {
    std::vector<double> t(windows + 1);
    const double width = (t_end - t0) / static_cast<double>(windows);
    for (std::size_t n = 0; n < windows; ++n) t[n] = t0 + static_cast<double>(n) * width;
    t[windows] = t_end;
    return t;
}

std::unique_ptr<ImplicitEulerPropagator> make_fine_propagator(const LinearDaeModel& model,
                                                              double fine_step) {
    return std::make_unique<ImplicitEulerPropagator>(model, fine_step, "fine");
}

LinearDaeModel reduced_model(const LinearDaeModel& model, std::size_t harmonics) {
    const auto fundamental = fundamental_frequency(model.source());
    if (!fundamental) return model;  // constant source: already its own mean
    return model.with_source(truncate_spectrum(model.source(), *fundamental, harmonics));
}

std::unique_ptr<Propagator> make_coarse_propagator(const LinearDaeModel& model,
                                                   const CoarseVariant& variant,
                                                   double coarse_step, MpdeLift lift) {
    switch (variant.kind) {
        case CoarseVariant::Kind::Classical:
            return std::make_unique<ImplicitEulerPropagator>(model, coarse_step,
                                                             variant.to_string());
        case CoarseVariant::Kind::Dc:
            return std::make_unique<ImplicitEulerPropagator>(reduced_model(model, 0), coarse_step,
                                                             variant.to_string());
        case CoarseVariant::Kind::Fft:
            return std::make_unique<ImplicitEulerPropagator>(
                reduced_model(model, variant.order), coarse_step, variant.to_string());
        case CoarseVariant::Kind::Mpde:
            return std::make_unique<MpdePropagator>(
                model, basis_for_model(model, variant.order), coarse_step, lift);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown coarse variant");
}

SweepResult fine_propagate(const LinearDaeModel& model, const Vector& x_start, double t_start,
                           double t_end, double fine_step) {
    auto p = ImplicitEulerPropagator(model, fine_step, "fine").propagate(x_start, t_start, t_end);
    return {std::move(p.state), p.solves};
}

SweepResult coarse_propagate_classical(const LinearDaeModel& model, const Vector& x_start,
                                       double t_start, double t_end, double coarse_step) {
    auto p = ImplicitEulerPropagator(model, coarse_step, "classical")
                 .propagate(x_start, t_start, t_end);
    return {std::move(p.state), p.solves};
}

SweepResult coarse_propagate_reduced(const LinearDaeModel& model, const Vector& x_start,
                                     double t_start, double t_end, double coarse_step,
                                     std::size_t harmonics) {
    auto p = ImplicitEulerPropagator(reduced_model(model, harmonics), coarse_step, "reduced")
                 .propagate(x_start, t_start, t_end);
    return {std::move(p.state), p.solves};
}

double jump_metric(std::span<const Vector> prev, std::span<const Vector> curr) {
    if (prev.size() != curr.size())
        throw Error(ErrorCode::InvalidArgument, "jump metric needs sequences of equal length");
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t n = 0; n < curr.size(); ++n) {
        diff = std::max(diff, (curr[n] - prev[n]).norm());
        scale = std::max(scale, curr[n].norm());
    }
    if (!(scale > 0.0))
        throw Error(ErrorCode::DegenerateNorm,
                    "all synchronization states are zero; relative jump undefined");
    return diff / scale;
}

PararealReport parareal_run(const LinearDaeModel& model, const PararealConfig& config) {
    config.validate();
    const auto fine = make_fine_propagator(model, config.fine_step);
    const auto coarse = make_coarse_propagator(model, config.coarse, config.coarse_step, config.mpde_lift);
    auto report = parareal_run(model, config, *fine, *coarse);
    report.variant = config.coarse.to_string();
    return report;
}

PararealReport parareal_run(const LinearDaeModel& model, const PararealConfig& config,
                            const Propagator& fine, const Propagator& coarse) {
    config.validate();
    const std::size_t windows = config.windows;
    const std::vector<double> t = window_boundaries(model.t0(), model.t_end(), windows);

    PararealReport report;
    report.variant = coarse.name();
    report.sync_times = t;
    report.ledger.state_size = model.size();
    report.ledger.fine_system_size = model.size();

    // Iteration 0: coarse prediction. Not charged to the ledger.
    std::vector<Vector> x(windows + 1);
    std::vector<Vector> coarse_prev(windows + 1);
    x[0] = model.x0();
    for (std::size_t n = 1; n <= windows; ++n) {
        auto g = coarse.propagate(x[n - 1], t[n - 1], t[n]);
        report.ledger.coarse_system_size = g.system_size;
        coarse_prev[n] = g.state;
        x[n] = std::move(g.state);
    }
    report.sync_states.push_back(x);

    std::vector<Propagation> fine_out(windows + 1);
    for (std::size_t k = 1; k <= config.max_iterations; ++k) {
        parallel_for(windows, config.workers, [&](std::size_t i) {
            fine_out[i + 1] = fine.propagate(x[i], t[i], t[i + 1]);
        });

        IterationRecord rec;
        rec.iteration = k;
        std::vector<Vector> next(windows + 1);
        next[0] = model.x0();
        for (std::size_t n = 1; n <= windows; ++n) {
            auto g = coarse.propagate(next[n - 1], t[n - 1], t[n]);
            next[n] = fine_out[n].state + g.state - coarse_prev[n];
            coarse_prev[n] = std::move(g.state);
            rec.coarse_solves += g.solves;
            rec.fine_solves = std::max(rec.fine_solves, fine_out[n].solves);
        }

        if (config.metric == JumpMetric::SuccessiveIterates) {
            rec.jump = jump_metric(interior(x), interior(next));
        } else {
            std::vector<Vector> fine_values(windows + 1);
            fine_values[0] = model.x0();
            for (std::size_t n = 1; n <= windows; ++n) fine_values[n] = fine_out[n].state;
            rec.jump = jump_metric(interior(fine_values), interior(next));
        }

        report.ledger.fine_solves += rec.fine_solves;
        report.ledger.coarse_solves += rec.coarse_solves;
        rec.cumulative_cost = report.ledger.cost_units();
        report.jumps.push_back(rec.jump);
        report.history.push_back(rec);
        report.iterations = k;
        x = std::move(next);
        report.sync_states.push_back(x);

        if (rec.jump <= config.tolerance) {
            report.converged = true;
            break;
        }
    }
    return report;
}

std::vector<Trajectory> fine_trajectories(const LinearDaeModel& model,
                                          const PararealConfig& config,
                                          std::span<const Vector> sync_states) {
    if (sync_states.size() != config.windows + 1)
        throw Error(ErrorCode::InvalidArgument, "expected one state per window boundary");
    const auto fine = make_fine_propagator(model, config.fine_step);
    const auto t = window_boundaries(model.t0(), model.t_end(), config.windows);
    std::vector<Trajectory> out(config.windows);
    parallel_for(config.windows, config.workers, [&](std::size_t i) {
        out[i] = fine->trajectory(sync_states[i], t[i], t[i + 1]);
    });
    return out;
}

}  // namespace pitsim
