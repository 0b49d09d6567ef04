#include "pitsim/mpde.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pitsim/error.hpp"

namespace pitsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Number of source periods per basis period; throws unless it is an integer.
long periods_per_basis_period(double frequency, double basis_period) {
    const double ratio = std::abs(frequency) * basis_period;
    const double q = std::round(ratio);
    if (q < 1.0 || std::abs(ratio - q) > 1e-9 * std::max(1.0, q))
        throw Error(ErrorCode::NonPeriodicSource,
                    "source frequency " + std::to_string(frequency) +
                        " Hz is not periodic on the basis period");
    return static_cast<long>(q);
}

}  // namespace

Matrix kronecker(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (Eigen::Index i = 0; i < lhs.rows(); ++i)
        for (Eigen::Index j = 0; j < lhs.cols(); ++j)
            out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(i, j) * rhs;
    return out;
}

Vector project_source(const SourceTerm& source, std::size_t states, const BasisSet& basis) {
    const auto np = static_cast<Eigen::Index>(basis.size());
    const double ts = basis.period();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(states) * np);

    // T_s * \int_0^1 w_k e^{i 2 pi q tau} d tau for each k.
    auto oscillatory = [&](long q) {
        Eigen::VectorXcd v(np);
        for (Eigen::Index k = 0; k < np; ++k)
            v[k] = ts * basis[static_cast<std::size_t>(k)].integrate_oscillatory(
                            kTwoPi * static_cast<double>(q));
        return v;
    };
    auto block = [&](std::size_t channel) {
        return out.segment(static_cast<Eigen::Index>(channel) * np, np);
    };

    for (const auto& component : source.components()) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PwmSource>) {
                    if (!s.has_default_waveforms())
                        throw Error(ErrorCode::NonPeriodicSource,
                                    "PWM source with injected reference/carrier cannot be "
                                    "projected");
                    const long q = periods_per_basis_period(s.switching_frequency, ts);
                    // The pulse is on over [i/q, (i + D)/q) in relative time.
                    for (Eigen::Index k = 0; k < np; ++k) {
                        const auto& w = basis[static_cast<std::size_t>(k)];
                        double acc = 0.0;
                        for (long i = 0; i < q; ++i) {
                            const double a = static_cast<double>(i) / static_cast<double>(q);
                            acc += w.integrate(a, a + s.duty_cycle / static_cast<double>(q));
                        }
                        block(s.channel)[k] += s.amplitude * ts * acc;
                    }
                } else if constexpr (std::is_same_v<T, ConstantSource>) {
                    for (std::size_t j = 0; j < states; ++j)
                        for (Eigen::Index k = 0; k < np; ++k)
                            block(j)[k] += s.value[static_cast<Eigen::Index>(j)] * ts *
                                           basis[static_cast<std::size_t>(k)].integrate();
                } else if constexpr (std::is_same_v<T, SinusoidSource>) {
                    if (s.frequency == 0.0) {
                        for (Eigen::Index k = 0; k < np; ++k)
                            block(s.channel)[k] += s.amplitude * std::cos(s.phase) * ts *
                                                   basis[static_cast<std::size_t>(k)].integrate();
                        return;
                    }
                    const long q = periods_per_basis_period(s.frequency, ts);
                    const double phase = s.frequency > 0.0 ? s.phase : -s.phase;
                    const auto coeff = s.amplitude * std::polar(1.0, phase);
                    block(s.channel) += (coeff * oscillatory(q)).real();
                } else {
                    for (Eigen::Index k = 0; k < np; ++k)
                        block(s.channel)[k] +=
                            s.mean * ts * basis[static_cast<std::size_t>(k)].integrate();
                    if (s.harmonics.empty()) return;
                    const long q = periods_per_basis_period(s.fundamental, ts);
                    for (std::size_t m = 1; m <= s.harmonics.size(); ++m)
                        block(s.channel) += 2.0 * (s.harmonics[m - 1] *
                                                   oscillatory(static_cast<long>(m) * q))
                                                      .real();
                }
            },
            component);
    }
    return out;
}

GalerkinSystem assemble_galerkin(const LinearDaeModel& model, const BasisSet& basis) {
    const Matrix j = compute_J(basis);
    const Matrix q = compute_Q(basis);
    GalerkinSystem sys;
    sys.states = model.size();
    sys.basis_size = basis.size();
    sys.mass = kronecker(model.a(), j);
    sys.stiffness = kronecker(model.b(), j) + kronecker(model.a(), q);
    sys.projected_source = project_source(model.source(), model.size(), basis);
    return sys;
}

Vector lift_initial(const Vector& x0, const BasisSet& basis) {
    const auto np = static_cast<Eigen::Index>(basis.size());
    Vector y = Vector::Zero(x0.size() * np);
    for (Eigen::Index j = 0; j < x0.size(); ++j) y[j * np] = x0[j];
    return y;
}

Vector reconstruct(const Vector& y, const BasisSet& basis, double t) {
    const auto np = static_cast<Eigen::Index>(basis.size());
    if (y.size() % np != 0)
        throw Error(ErrorCode::InvalidArgument,
                    "coefficient vector length is not a multiple of the basis size");
    const Vector w = eval_basis(basis, t);
    Vector x(y.size() / np);
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = w.dot(y.segment(j * np, np));
    return x;
}

Vector periodic_ripple(const GalerkinSystem& system) {
    const auto np = static_cast<Eigen::Index>(system.basis_size);
    const auto ns = static_cast<Eigen::Index>(system.states);
    Vector ripple = Vector::Zero(np * ns);
    if (np == 1) return ripple;

    // Rows and columns of every coefficient with k >= 2.
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < ns; ++j)
        for (Eigen::Index k = 1; k < np; ++k) idx.push_back(j * np + k);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Matrix block(n, n);
    Vector rhs(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        rhs[r] = system.projected_source[idx[r]];
        for (Eigen::Index c = 0; c < n; ++c) block(r, c) = system.stiffness(idx[r], idx[c]);
    }
    const Eigen::FullPivLU<Matrix> lu(block);
    if (!lu.isInvertible())
        throw Error(ErrorCode::SingularSystem,
                    "ripple equations have no unique periodic solution; use the zero-ripple lift");
    const Vector solution = lu.solve(rhs);
    for (Eigen::Index r = 0; r < n; ++r) ripple[idx[r]] = solution[r];
    return ripple;
}

Vector lift_periodic(const Vector& x, const BasisSet& basis, const Vector& ripple, double t) {
    const auto np = static_cast<Eigen::Index>(basis.size());
    if (ripple.size() != x.size() * np)
        throw Error(ErrorCode::InvalidArgument, "ripple vector does not match the state size");
    Vector y = ripple;
    const Vector r = reconstruct(ripple, basis, t);
    for (Eigen::Index j = 0; j < x.size(); ++j) y[j * np] = x[j] - r[j];
    return y;
}

MpdePropagator::MpdePropagator(const LinearDaeModel& model, BasisSet basis, double step,
                               MpdeLift lift)
    : basis_(std::move(basis)),
      system_(assemble_galerkin(model, basis_)),
      solver_(system_.mass, system_.stiffness, step),
      lift_(lift),
      ripple_(lift == MpdeLift::PeriodicRipple ? periodic_ripple(system_)
                                               : Vector::Zero(static_cast<Eigen::Index>(system_.size()))) {}

Vector MpdePropagator::lift(const Vector& x_start, double t_start) const {
    if (lift_ == MpdeLift::ZeroRipple) return lift_initial(x_start, basis_);
    return lift_periodic(x_start, basis_, ripple_, t_start);
}

SweepResult MpdePropagator::propagate_coefficients(const Vector& x_start, double t_start,
                                                   double t_end) const {
    const Forcing forcing = [this](double t1) { return system_.source(t1); };
    return implicit_euler_sweep(solver_, system_.mass, system_.stiffness, forcing,
                                lift(x_start, t_start), t_start, t_end);
}

Propagation MpdePropagator::propagate(const Vector& x_start, double t_start,
                                      double t_end) const {
    auto r = propagate_coefficients(x_start, t_start, t_end);
    if (r.solves == 0) return {x_start, 0, system_.size()};
    return {reconstruct(r.state, basis_, t_end), r.solves, system_.size()};
}

std::string MpdePropagator::name() const { return "mpde:" + std::to_string(basis_.size()); }

std::string_view to_string(MpdeLift lift) {
    return lift == MpdeLift::PeriodicRipple ? "periodic" : "zero";
}

MpdeLift parse_mpde_lift(std::string_view text) {
    if (text == "periodic") return MpdeLift::PeriodicRipple;
    if (text == "zero") return MpdeLift::ZeroRipple;
    throw Error(ErrorCode::ValidationError,
                "unknown MPDE lift '" + std::string(text) + "' (expected periodic or zero)");
}

BasisSet basis_for_model(const LinearDaeModel& model, std::size_t count) {
    for (const auto& component : model.source().components()) {
        if (const auto* pwm = std::get_if<PwmSource>(&component);
            pwm != nullptr && pwm->has_default_waveforms())
            return build_pwm_basis(count, pwm->duty_cycle, pwm->period());
    }
    throw Error(ErrorCode::NonPeriodicSource,
                "model has no PWM source to derive the basis period and duty cycle from");
}

Propagation mpde_coarse_propagate(const LinearDaeModel& model, const BasisSet& basis,
                                  const Vector& x_start, double t_start, double t_end,
                                  double step, MpdeLift lift) {
    return MpdePropagator(model, basis, step, lift).propagate(x_start, t_start, t_end);
}

}  // namespace pitsim
