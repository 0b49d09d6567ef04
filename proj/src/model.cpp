#include "pitsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "pitsim/error.hpp"

namespace pitsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sawtooth(double t, double frequency) {
    const double phase = t * frequency;
    return phase - std::floor(phase);
}

// Integer q with frequency == q * base, or nullopt.
std::optional<long> harmonic_index(double frequency, double base) {
    const double ratio = frequency / base;
    const double q = std::round(ratio);
    if (q < 1.0 || std::abs(ratio - q) > 1e-9 * std::max(1.0, q)) return std::nullopt;
    return static_cast<long>(q);
}

}  // namespace

double eval_pwm(const PwmSource& src, double t) {
    const double r = src.reference ? src.reference(t) : src.duty_cycle;
    const double s = src.carrier ? src.carrier(t) : sawtooth(t, src.switching_frequency);
    // sgn(0) := +1, so exact crossings count as "on".
    const double sign = (r - s) >= 0.0 ? 1.0 : -1.0;
    return 0.5 * src.amplitude * (sign + 1.0);
}

SourceTerm& SourceTerm::add(SourceComponent component) {
    components_.push_back(std::move(component));
    return *this;
}

Vector SourceTerm::evaluate(double t, std::size_t size) const {
    Vector c = Vector::Zero(static_cast<Eigen::Index>(size));
    for (const auto& component : components_) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PwmSource>) {
                    c[static_cast<Eigen::Index>(s.channel)] += eval_pwm(s, t);
                } else if constexpr (std::is_same_v<T, ConstantSource>) {
                    c += s.value;
                } else if constexpr (std::is_same_v<T, SinusoidSource>) {
                    c[static_cast<Eigen::Index>(s.channel)] +=
                        s.amplitude * std::cos(kTwoPi * s.frequency * t + s.phase);
                } else {
                    double v = s.mean;
                    for (std::size_t m = 0; m < s.harmonics.size(); ++m) {
                        const double arg = kTwoPi * static_cast<double>(m + 1) * s.fundamental * t;
                        v += 2.0 * (s.harmonics[m] * std::polar(1.0, arg)).real();
                    }
                    c[static_cast<Eigen::Index>(s.channel)] += v;
                }
            },
            component);
    }
    return c;
}

void SourceTerm::check_dimension(std::size_t size) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const std::string where = "source[" + std::to_string(i) + "]";
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, ConstantSource>) {
                    if (static_cast<std::size_t>(s.value.size()) != size)
                        throw Error(ErrorCode::ValidationError,
                                    where + ": constant has length " +
                                        std::to_string(s.value.size()) + ", expected " +
                                        std::to_string(size));
                } else {
                    if (s.channel >= size)
                        throw Error(ErrorCode::ValidationError,
                                    where + ": channel " + std::to_string(s.channel) +
                                        " out of range for " + std::to_string(size) + " states");
                }
                if constexpr (std::is_same_v<T, PwmSource>) {
                    if (!(s.switching_frequency > 0.0) || !std::isfinite(s.switching_frequency))
                        throw Error(ErrorCode::ValidationError,
                                    where + ": switching frequency must be positive");
                    if (!(s.duty_cycle > 0.0 && s.duty_cycle < 1.0))
                        throw Error(ErrorCode::ValidationError,
                                    where + ": duty cycle must lie in (0, 1)");
                }
            },
            components_[i]);
    }
}

LinearDaeModel::LinearDaeModel(Matrix a, Matrix b, SourceTerm source, Vector x0, double t0,
                               double t_end)
    : a_(std::move(a)), b_(std::move(b)), source_(std::move(source)), x0_(std::move(x0)),
      t0_(t0), t_end_(t_end) {
    if (a_.rows() < 1 || a_.rows() != a_.cols())
        throw Error(ErrorCode::ValidationError, "A must be square with at least one row");
    if (b_.rows() != a_.rows() || b_.cols() != a_.cols())
        throw Error(ErrorCode::ValidationError, "B must have the same shape as A");
    if (x0_.size() != a_.rows())
        throw Error(ErrorCode::ValidationError, "x0 length does not match A");
    if (!std::isfinite(t0_) || !std::isfinite(t_end_) || !(t_end_ > t0_))
        throw Error(ErrorCode::ValidationError, "end time must exceed start time");
    if (!a_.allFinite() || !b_.allFinite() || !x0_.allFinite())
        throw Error(ErrorCode::ValidationError, "model entries must be finite");
    source_.check_dimension(size());
}

LinearDaeModel LinearDaeModel::with_source(SourceTerm source) const {
    return LinearDaeModel(a_, b_, std::move(source), x0_, t0_, t_end_);
}

std::optional<double> LinearDaeModel::switching_period() const {
    for (const auto& component : source_.components()) {
        if (const auto* pwm = std::get_if<PwmSource>(&component);
            pwm != nullptr && pwm->has_default_waveforms())
            return pwm->period();
    }
    return std::nullopt;
}

Vector eval_source(const LinearDaeModel& model, double t) {
    return model.source().evaluate(t, model.size());
}

LinearDaeModel buck_preset(const BuckParameters& p) {
    Matrix a{{p.inductance, 0.0}, {0.0, p.capacitance}};
    Matrix b{{p.coil_resistance, 1.0}, {-1.0, 1.0 / p.load_resistance}};
    PwmSource pwm;
    pwm.amplitude = p.input_amplitude;
    pwm.switching_frequency = p.switching_frequency;
    pwm.duty_cycle = p.duty_cycle;
    pwm.channel = 0;
    return LinearDaeModel(std::move(a), std::move(b), SourceTerm({pwm}), Vector::Zero(2), 0.0,
                          p.t_end);
}

std::complex<double> pwm_harmonic(const PwmSource& src, int m) {
    using namespace std::complex_literals;
    const double w = kTwoPi * static_cast<double>(m);
    return src.amplitude * (1.0 - std::polar(1.0, -w * src.duty_cycle)) / (1i * w);
}

std::optional<double> fundamental_frequency(const SourceTerm& source) {
    std::vector<double> freqs;
    for (const auto& component : source.components()) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PwmSource>) {
                    if (!s.has_default_waveforms())
                        throw Error(ErrorCode::NonPeriodicSource,
                                    "PWM source with injected reference/carrier has no known "
                                    "spectrum");
                    freqs.push_back(s.switching_frequency);
                } else if constexpr (std::is_same_v<T, SinusoidSource>) {
                    if (s.frequency != 0.0) freqs.push_back(std::abs(s.frequency));
                } else if constexpr (std::is_same_v<T, FourierSeriesSource>) {
                    if (!s.harmonics.empty()) freqs.push_back(s.fundamental);
                }
            },
            component);
    }
    if (freqs.empty()) return std::nullopt;
    const double base = *std::min_element(freqs.begin(), freqs.end());
    for (double f : freqs) {
        if (!harmonic_index(f, base))
            throw Error(ErrorCode::NonPeriodicSource,
                        "source components do not share a common period");
    }
    return base;
}

SourceTerm truncate_spectrum(const SourceTerm& source, double fundamental,
                             std::size_t harmonics) {
    if (!(fundamental > 0.0))
        throw Error(ErrorCode::InvalidArgument, "fundamental frequency must be positive");

    struct Spectrum {
        double mean = 0.0;
        std::vector<std::complex<double>> coeffs;
    };
    std::map<std::size_t, Spectrum> channels;
    SourceTerm reduced;

    auto spectrum_of = [&](std::size_t channel) -> Spectrum& {
        auto& s = channels[channel];
        s.coeffs.resize(harmonics);
        return s;
    };
    auto index_of = [&](double frequency) {
        const auto q = harmonic_index(frequency, fundamental);
        if (!q)
            throw Error(ErrorCode::NonPeriodicSource,
                        "component frequency is not a multiple of the fundamental");
        return *q;
    };

    for (const auto& component : source.components()) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, ConstantSource>) {
                    reduced.add(s);
                } else if constexpr (std::is_same_v<T, PwmSource>) {
                    if (!s.has_default_waveforms())
                        throw Error(ErrorCode::NonPeriodicSource,
                                    "PWM source with injected reference/carrier cannot be "
                                    "reduced");
                    const long q = index_of(s.switching_frequency);
                    auto& spec = spectrum_of(s.channel);
                    spec.mean += s.duty_cycle * s.amplitude;
                    for (long m = 1; static_cast<std::size_t>(m * q) <= harmonics; ++m)
                        spec.coeffs[static_cast<std::size_t>(m * q - 1)] +=
                            pwm_harmonic(s, static_cast<int>(m));
                } else if constexpr (std::is_same_v<T, SinusoidSource>) {
                    auto& spec = spectrum_of(s.channel);
                    if (s.frequency == 0.0) {
                        spec.mean += s.amplitude * std::cos(s.phase);
                        return;
                    }
                    const long q = index_of(std::abs(s.frequency));
                    // cos(wt + phi) with w < 0 is cos(|w|t - phi).
                    const double phase = s.frequency > 0.0 ? s.phase : -s.phase;
                    if (static_cast<std::size_t>(q) <= harmonics)
                        spec.coeffs[static_cast<std::size_t>(q - 1)] +=
                            0.5 * s.amplitude * std::polar(1.0, phase);
                } else {
                    auto& spec = spectrum_of(s.channel);
                    spec.mean += s.mean;
                    if (s.harmonics.empty()) return;
                    const long q = index_of(s.fundamental);
                    for (std::size_t m = 1; m <= s.harmonics.size(); ++m) {
                        const std::size_t j = m * static_cast<std::size_t>(q);
                        if (j > harmonics) break;
                        spec.coeffs[j - 1] += s.harmonics[m - 1];
                    }
                }
            },
            component);
    }

    for (auto& [channel, spec] : channels) {
        FourierSeriesSource f;
        f.channel = channel;
        f.fundamental = fundamental;
        f.mean = spec.mean;
        f.harmonics = std::move(spec.coeffs);
        reduced.add(std::move(f));
    }
    return reduced;
}

}  // namespace pitsim
