#pragma once

// Linear DAE model A x' + B x = c(t) and the source terms that drive it.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pitsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using Waveform = std::function<double(double)>;

/// Pulse train (V_i/2)(sgn(r(t) - s(t)) + 1) on a single state equation.
///
/// With no reference or carrier injected, r(t) = duty_cycle and s(t) is the
/// sawtooth t*f_s mod 1, which gives a T_s-periodic pulse that is "on" during
/// the first duty_cycle fraction of every period.
struct PwmSource {
    double amplitude = 0.0;
    double switching_frequency = 0.0;
    double duty_cycle = 0.5;
    std::size_t channel = 0;
    Waveform reference;  // empty: constant duty_cycle
    Waveform carrier;    // empty: sawtooth

    [[nodiscard]] double period() const { return 1.0 / switching_frequency; }
    [[nodiscard]] bool has_default_waveforms() const { return !reference && !carrier; }
};

/// Time-independent vector added to every state equation.
struct ConstantSource {
    Vector value;
};

/// amplitude * cos(2 pi f t + phase) on one channel.
struct SinusoidSource {
    std::size_t channel = 0;
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

/// Real signal mean + sum_m 2 Re(c_m exp(2 pi i m f t)), m = 1..harmonics.size().
struct FourierSeriesSource {
    std::size_t channel = 0;
    double fundamental = 0.0;
    double mean = 0.0;
    std::vector<std::complex<double>> harmonics;
};

using SourceComponent =
    std::variant<PwmSource, ConstantSource, SinusoidSource, FourierSeriesSource>;

/// Right-hand side c(t) represented as a sum of tagged components, so that
/// spectral reduction and Galerkin projection can work on each kind
/// analytically.
class SourceTerm {
public:
    SourceTerm() = default;
    explicit SourceTerm(std::vector<SourceComponent> components)
        : components_(std::move(components)) {}

    SourceTerm& add(SourceComponent component);

    [[nodiscard]] const std::vector<SourceComponent>& components() const { return components_; }

    /// Assembles c(t) for a system with `size` states.
    [[nodiscard]] Vector evaluate(double t, std::size_t size) const;

    /// Throws ValidationError if a component addresses a channel outside
    /// [0, size) or a constant has the wrong length.
    void check_dimension(std::size_t size) const;

private:
    std::vector<SourceComponent> components_;
};

[[nodiscard]] double eval_pwm(const PwmSource& src, double t);

class LinearDaeModel {
public:
    /// Validates shapes and the time interval; throws ValidationError.
    LinearDaeModel(Matrix a, Matrix b, SourceTerm source, Vector x0, double t0, double t_end);

    [[nodiscard]] const Matrix& a() const { return a_; }
    [[nodiscard]] const Matrix& b() const { return b_; }
    [[nodiscard]] const SourceTerm& source() const { return source_; }
    [[nodiscard]] const Vector& x0() const { return x0_; }
    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double t_end() const { return t_end_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }

    /// Same system with a different right-hand side.
    [[nodiscard]] LinearDaeModel with_source(SourceTerm source) const;

    /// Switching period of the first default-waveform PWM component, if any.
    [[nodiscard]] std::optional<double> switching_period() const;

private:
    Matrix a_;
    Matrix b_;
    SourceTerm source_;
    Vector x0_;
    double t0_;
    double t_end_;
};

[[nodiscard]] Vector eval_source(const LinearDaeModel& model, double t);

struct BuckParameters {
    double inductance = 1e-3;
    double capacitance = 1e-4;
    double coil_resistance = 1e-2;
    double load_resistance = 0.8;
    double input_amplitude = 100.0;
    double switching_frequency = 5000.0;
    double duty_cycle = 0.7;
    double t_end = 12e-3;
};

/// Buck converter filter: states [i_L, v_C], pulsed input on the inductor row.
[[nodiscard]] LinearDaeModel buck_preset(const BuckParameters& params = {});

// --- spectral reduction ----------------------------------------------------

/// Fundamental frequency shared by all periodic components. Constants carry
/// no frequency. Throws NonPeriodicSource when components disagree or a PWM
/// uses injected waveforms.
[[nodiscard]] std::optional<double> fundamental_frequency(const SourceTerm& source);

/// Replaces `source` by its truncated Fourier series: the mean plus the
/// lowest `harmonics` harmonics of `fundamental`. Coefficients are exact for
/// every component kind. harmonics == 0 leaves only the period mean.
[[nodiscard]] SourceTerm truncate_spectrum(const SourceTerm& source, double fundamental,
                                           std::size_t harmonics);

/// Complex Fourier coefficient of a default PWM pulse at harmonic m (m >= 1),
/// normalized so that the signal is mean + sum 2 Re(c_m e^{2 pi i m f t}).
[[nodiscard]] std::complex<double> pwm_harmonic(const PwmSource& src, int m);

}  // namespace pitsim
