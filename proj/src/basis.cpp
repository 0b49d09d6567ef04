#include "pitsim/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pitsim/error.hpp"

namespace pitsim {

namespace {

constexpr double kDegenerateNorm = 1e-12;
// Classical Gram-Schmidt, repeated: one extra pass restores orthogonality
// lost to cancellation.
constexpr int kOrthogonalizationPasses = 2;

// p(c + h s) as a polynomial in s.
Polynomial compose_affine(const Polynomial& p, double c, double h) {
    Polynomial r = Polynomial::constant(0.0);
    const Polynomial x({c, h});
    const auto& a = p.coeffs();
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        r = r * x;
        r += Polynomial::constant(*it);
    }
    return r;
}

// \int_{-1}^{1} s^n ds.
double monomial_moment(std::size_t n) { return n % 2 == 0 ? 2.0 / static_cast<double>(n + 1) : 0.0; }

double integrate_unit(const Polynomial& p) {
    double v = 0.0;
    const auto& a = p.coeffs();
    for (std::size_t i = 0; i < a.size(); i += 2) v += a[i] * monomial_moment(i);
    return v;
}

// \int_{-1}^{1} p(s) e^{i theta s} ds.
std::complex<double> oscillatory_unit(const Polynomial& p, double theta) {
    const auto& a = p.coeffs();
    if (std::abs(theta) <= 1.0) {
        // Power series of the exponential; terms shrink at least like 1/k!.
        std::complex<double> sum = 0.0;
        std::complex<double> factor = 1.0;  // (i theta)^k / k!
        for (std::size_t k = 0; k < 60; ++k) {
            std::complex<double> term = 0.0;
            for (std::size_t n = 0; n < a.size(); ++n) term += a[n] * monomial_moment(n + k);
            sum += factor * term;
            factor *= std::complex<double>(0.0, theta) / static_cast<double>(k + 1);
            if (std::abs(factor) < 1e-18) break;
        }
        return sum;
    }
    // [e^{i theta s} sum_j (-1)^j p^(j)(s) / (i theta)^{j+1}]_{-1}^{1}
    const std::complex<double> it(0.0, theta);
    std::complex<double> at_lo = 0.0;
    std::complex<double> at_hi = 0.0;
    Polynomial q = p;
    std::complex<double> denom = it;
    double sign = 1.0;
    for (std::size_t j = 0; j <= p.degree(); ++j) {
        at_lo += sign * q(-1.0) / denom;
        at_hi += sign * q(1.0) / denom;
        q = q.derivative();
        denom *= it;
        sign = -sign;
    }
    return std::polar(1.0, theta) * at_hi - std::polar(1.0, -theta) * at_lo;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

double Polynomial::operator()(double x) const {
    double v = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * x + *it;
    return v;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial::constant(0.0);
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
        d[i - 1] = static_cast<double>(i) * coeffs_[i];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<double> a(coeffs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
    return Polynomial(std::move(a));
}

double Polynomial::integrate(double a, double b) const {
    const Polynomial p = antiderivative();
    return p(b) - p(a);
}

std::complex<double> Polynomial::integrate_oscillatory(double a, double b, double omega) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    if (half == 0.0) return 0.0;
    return half * std::polar(1.0, omega * mid) *
           oscillatory_unit(compose_affine(*this, mid, half), omega * half);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
    for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    if (p.coeffs_.empty() || q.coeffs_.empty()) return Polynomial::constant(0.0);
    std::vector<double> r(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < q.coeffs_.size(); ++j) r[i + j] += p.coeffs_[i] * q.coeffs_[j];
    return Polynomial(std::move(r));
}

PiecewisePolynomial::PiecewisePolynomial(double cusp, Polynomial left, Polynomial right)
    : cusp_(cusp), left_(std::move(left)), right_(std::move(right)) {}

PiecewisePolynomial PiecewisePolynomial::from_global(double cusp, const Polynomial& left,
                                                     const Polynomial& right) {
    return {cusp, compose_affine(left, 0.5 * cusp, 0.5 * cusp),
            compose_affine(right, 0.5 * (1.0 + cusp), 0.5 * (1.0 - cusp))};
}

double PiecewisePolynomial::operator()(double tau) const {
    if (tau < cusp_) return left_(2.0 * tau / cusp_ - 1.0);
    return right_(2.0 * (tau - cusp_) / (1.0 - cusp_) - 1.0);
}

PiecewisePolynomial PiecewisePolynomial::derivative() const {
    return {cusp_, left_.derivative() * (2.0 / cusp_), right_.derivative() * (2.0 / (1.0 - cusp_))};
}

PiecewisePolynomial PiecewisePolynomial::antiderivative() const {
    Polynomial left = left_.antiderivative() * (0.5 * cusp_);
    left += Polynomial::constant(-left(-1.0));
    Polynomial right = right_.antiderivative() * (0.5 * (1.0 - cusp_));
    right += Polynomial::constant(left(1.0) - right(-1.0));
    return {cusp_, std::move(left), std::move(right)};
}

double PiecewisePolynomial::integrate_to(double a) const {
    if (a <= cusp_) {
        const Polynomial p = left_.antiderivative();
        return 0.5 * cusp_ * (p(2.0 * a / cusp_ - 1.0) - p(-1.0));
    }
    const double left = 0.5 * cusp_ * integrate_unit(left_);
    if (a >= 1.0) return left + 0.5 * (1.0 - cusp_) * integrate_unit(right_);
    const Polynomial p = right_.antiderivative();
    return left + 0.5 * (1.0 - cusp_) * (p(2.0 * (a - cusp_) / (1.0 - cusp_) - 1.0) - p(-1.0));
}

std::complex<double> PiecewisePolynomial::integrate_oscillatory(double omega) const {
    const double hl = 0.5 * cusp_;
    const double hr = 0.5 * (1.0 - cusp_);
    return hl * std::polar(1.0, omega * hl) * oscillatory_unit(left_, omega * hl) +
           hr * std::polar(1.0, omega * (cusp_ + hr)) * oscillatory_unit(right_, omega * hr);
}

PiecewisePolynomial& PiecewisePolynomial::axpy(double alpha, const PiecewisePolynomial& x) {
    left_ += x.left_ * alpha;
    right_ += x.right_ * alpha;
    return *this;
}

PiecewisePolynomial& PiecewisePolynomial::operator*=(double s) {
    left_ *= s;
    right_ *= s;
    return *this;
}

PiecewisePolynomial operator*(const PiecewisePolynomial& f, const PiecewisePolynomial& g) {
    return {f.cusp_, f.left_ * g.left_, f.right_ * g.right_};
}

double inner(const PiecewisePolynomial& f, const PiecewisePolynomial& g) {
    return (f * g).integrate();
}

BasisSet::BasisSet(double duty_cycle, double period, std::vector<PiecewisePolynomial> functions)
    : duty_(duty_cycle), period_(period), functions_(std::move(functions)) {}

Vector BasisSet::evaluate(double tau) const {
    Vector w(static_cast<Eigen::Index>(functions_.size()));
    for (std::size_t k = 0; k < functions_.size(); ++k)
        w[static_cast<Eigen::Index>(k)] = functions_[k](tau);
    return w;
}

double relative_time(double t, double period) {
    const double phase = t / period;
    const double tau = phase - std::floor(phase);
    return tau < 1.0 ? tau : 0.0;
}

BasisSet build_pwm_basis(std::size_t count, double duty_cycle, double period) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "basis needs at least one function");
    if (!(duty_cycle > 0.0 && duty_cycle < 1.0))
        throw Error(ErrorCode::InvalidArgument, "duty cycle must lie in (0, 1)");
    if (!(period > 0.0) || !std::isfinite(period))
        throw Error(ErrorCode::InvalidArgument, "switching period must be positive");

    const double d = duty_cycle;
    std::vector<PiecewisePolynomial> w;
    w.reserve(count);
    w.emplace_back(d, Polynomial::constant(1.0), Polynomial::constant(1.0));

    for (std::size_t k = 2; k <= count; ++k) {
        PiecewisePolynomial u =
            // Ramp tau / D, then (1 - tau) / (1 - D), in local coordinates.
            k == 2 ? PiecewisePolynomial(d, Polynomial({0.5, 0.5}), Polynomial({0.5, -0.5}))
                   : w.back().antiderivative();
        for (int pass = 0; pass < kOrthogonalizationPasses; ++pass)
            for (const auto& prev : w) u.axpy(-inner(u, prev), prev);
        const double norm = std::sqrt(inner(u, u));
        if (!(norm > kDegenerateNorm))
            throw Error(ErrorCode::DegenerateBasis,
                        "basis candidate " + std::to_string(k) +
                            " is linearly dependent on its predecessors");
        u *= 1.0 / norm;
        w.push_back(std::move(u));
    }
    return BasisSet(duty_cycle, period, std::move(w));
}

Matrix gram_matrix(const BasisSet& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix g(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l <= k; ++l)
            g(k, l) = g(l, k) = inner(basis[static_cast<std::size_t>(k)],
                                      basis[static_cast<std::size_t>(l)]);
    return g;
}

Matrix compute_J(const BasisSet& basis) { return basis.period() * gram_matrix(basis); }

Matrix compute_Q(const BasisSet& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix q(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const PiecewisePolynomial dk = basis[static_cast<std::size_t>(k)].derivative();
        for (Eigen::Index l = 0; l < n; ++l) q(k, l) = -inner(dk, basis[static_cast<std::size_t>(l)]);
    }
    return q;
}

Vector eval_basis(const BasisSet& basis, double t2) {
    return basis.evaluate(relative_time(t2, basis.period()));
}

}  // namespace pitsim
