#pragma once

// PWM basis functions on relative time tau in [0, 1) with a cusp at the duty
// cycle, and the exact Galerkin integrals built from them.

#include <complex>
#include <cstddef>
#include <vector>

#include "pitsim/model.hpp"

namespace pitsim {

/// Dense polynomial in monomial form, coefficients in ascending order.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    [[nodiscard]] static Polynomial constant(double c) { return Polynomial({c}); }

    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] Polynomial derivative() const;
    /// Antiderivative vanishing at x = 0.
    [[nodiscard]] Polynomial antiderivative() const;
    [[nodiscard]] double integrate(double a, double b) const;

    /// \int_a^b p(x) e^{i omega x} dx in closed form: a power series in
    /// omega for short intervals, repeated integration by parts otherwise.
    [[nodiscard]] std::complex<double> integrate_oscillatory(double a, double b,
                                                             double omega) const;

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator*=(double s);
    friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
    friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
    friend Polynomial operator*(Polynomial p, double s) { return p *= s; }

private:
    std::vector<double> coeffs_;
};

/// Two polynomial pieces on [0, cusp] and [cusp, 1]. Each piece is stored in
/// its local coordinate s in [-1, 1], which keeps the coefficients well
/// conditioned for any cusp position.
class PiecewisePolynomial {
public:
    /// `left` and `right` are polynomials in the local coordinate of their
    /// piece.
    PiecewisePolynomial(double cusp, Polynomial left, Polynomial right);
    /// Builds from pieces given as polynomials in tau.
    [[nodiscard]] static PiecewisePolynomial from_global(double cusp, const Polynomial& left,
                                                         const Polynomial& right);

    [[nodiscard]] double cusp() const { return cusp_; }
    [[nodiscard]] const Polynomial& left() const { return left_; }
    [[nodiscard]] const Polynomial& right() const { return right_; }

    /// Value at tau in [0, 1]; the right piece is used from the cusp on.
    [[nodiscard]] double operator()(double tau) const;
    [[nodiscard]] double left_limit() const { return left_(1.0); }
    [[nodiscard]] double right_limit() const { return right_(-1.0); }

    [[nodiscard]] PiecewisePolynomial derivative() const;
    /// Continuous antiderivative with value 0 at tau = 0.
    [[nodiscard]] PiecewisePolynomial antiderivative() const;
    /// \int_0^a for a in [0, 1].
    [[nodiscard]] double integrate_to(double a) const;
    [[nodiscard]] double integrate() const { return integrate_to(1.0); }
    [[nodiscard]] double integrate(double a, double b) const { return integrate_to(b) - integrate_to(a); }
    /// \int_0^1 f(tau) e^{i omega tau} d tau.
    [[nodiscard]] std::complex<double> integrate_oscillatory(double omega) const;

    PiecewisePolynomial& axpy(double alpha, const PiecewisePolynomial& x);
    PiecewisePolynomial& operator*=(double s);
    friend PiecewisePolynomial operator*(const PiecewisePolynomial& f,
                                         const PiecewisePolynomial& g);

private:
    double cusp_;
    Polynomial left_;
    Polynomial right_;
};

/// Exact L2(0,1) inner product.
[[nodiscard]] double inner(const PiecewisePolynomial& f, const PiecewisePolynomial& g);

class BasisSet {
public:
    BasisSet(double duty_cycle, double period, std::vector<PiecewisePolynomial> functions);

    [[nodiscard]] std::size_t size() const { return functions_.size(); }
    [[nodiscard]] double duty_cycle() const { return duty_; }
    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] const std::vector<PiecewisePolynomial>& functions() const { return functions_; }
    [[nodiscard]] const PiecewisePolynomial& operator[](std::size_t k) const { return functions_[k]; }

    /// w(tau) for tau in [0, 1].
    [[nodiscard]] Vector evaluate(double tau) const;

private:
    double duty_;
    double period_;
    std::vector<PiecewisePolynomial> functions_;
};

/// Relative time tau(t) = (t / T_s) mod 1, always in [0, 1).
[[nodiscard]] double relative_time(double t, double period);

/// Builds w_1 = 1, the zero-mean ramp w_2 peaking at the duty cycle, and
/// w_k (k >= 3) by integrating w_{k-1}; each new function is Gram-Schmidt
/// orthonormalized against its predecessors with exact inner products.
/// Throws InvalidArgument for bad arguments and DegenerateBasis if a
/// candidate is numerically dependent on the previous functions.
[[nodiscard]] BasisSet build_pwm_basis(std::size_t count, double duty_cycle, double period);

[[nodiscard]] Matrix gram_matrix(const BasisSet& basis);

/// J = T_s * \int_0^1 w w^T d tau.
[[nodiscard]] Matrix compute_J(const BasisSet& basis);

/// Q_kl = -\int_0^1 w_k'(tau) w_l(tau) d tau, evaluated piecewise.
[[nodiscard]] Matrix compute_Q(const BasisSet& basis);

/// w(tau(t2)).
[[nodiscard]] Vector eval_basis(const BasisSet& basis, double t2);

}  // namespace pitsim
