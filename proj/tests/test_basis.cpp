#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pitsim/basis.hpp"
#include "pitsim/error.hpp"

using namespace pitsim;

namespace {

constexpr double kTs = 2e-4;

// Gauss quadrature with the cusp as an exact breakpoint.
double quad_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g,
                    std::size_t pieces) {
    auto fg = [&](double x) { return f(x) * g(x); };
    const double d = f.cusp();
    return oracle::integrate(fg, 0.0, d, pieces) + oracle::integrate(fg, d, 1.0, pieces);
}

}  // namespace

TEST_CASE("polynomial calculus") {
    const Polynomial p({1.0, -2.0, 3.0});  // 1 - 2x + 3x^2
    CHECK(p(2.0) == 9.0);
    CHECK(p.derivative()(1.0) == 4.0);
    CHECK(p.antiderivative()(0.0) == 0.0);
    CHECK(p.integrate(0.0, 1.0) == doctest::Approx(1.0));
    const Polynomial q = p * Polynomial({0.0, 1.0});
    CHECK(q(2.0) == 18.0);

    const double w = 7.3;
    const auto exact = p.integrate_oscillatory(0.2, 0.9, w);
    const double re = oracle::integrate([&](double x) { return p(x) * std::cos(w * x); }, 0.2, 0.9);
    const double im = oracle::integrate([&](double x) { return p(x) * std::sin(w * x); }, 0.2, 0.9);
    CHECK(exact.real() == doctest::Approx(re).epsilon(1e-13));
    CHECK(exact.imag() == doctest::Approx(im).epsilon(1e-13));
    CHECK(p.integrate_oscillatory(0.2, 0.9, 0.0).real() == doctest::Approx(p.integrate(0.2, 0.9)));
}

TEST_CASE("oscillatory integrals of basis functions at low and high frequency") {
    const BasisSet b = build_pwm_basis(6, 0.9, kTs);
    for (double omega : {0.0, 0.5, 2.0 * M_PI, 9.0, 40.0, 2.0 * M_PI * 25}) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            auto part = [&](bool imag) {
                auto f = [&](double x) { return b[k](x) * (imag ? std::sin(omega * x) : std::cos(omega * x)); };
                return oracle::integrate(f, 0.0, 0.9, 16) + oracle::integrate(f, 0.9, 1.0, 4);
            };
            const auto exact = b[k].integrate_oscillatory(omega);
            CAPTURE(omega);
            CAPTURE(k);
            CHECK(std::abs(exact.real() - part(false)) < 1e-12);
            CHECK(std::abs(exact.imag() - part(true)) < 1e-12);
        }
    }
}

TEST_CASE("single function basis") {
    const BasisSet b = build_pwm_basis(1, 0.7, kTs);
    REQUIRE(b.size() == 1);
    for (double tau : {0.0, 0.3, 0.7, 0.99}) CHECK(b[0](tau) == 1.0);
    CHECK(compute_J(b)(0, 0) == kTs);
    CHECK(compute_Q(b)(0, 0) == 0.0);
}

TEST_CASE("second function is the zero-mean ramp") {
    const BasisSet b = build_pwm_basis(2, 0.7, kTs);
    const auto& w2 = b[1];
    CHECK(std::abs(w2.integrate()) < 1e-12);
    CHECK(inner(w2, w2) == doctest::Approx(1.0).epsilon(1e-12));
    // Peak at the cusp, equal values at both ends.
    CHECK(w2.left_limit() > w2(0.0));
    CHECK(std::abs(w2(0.0) - w2(1.0)) < 1e-12);
    const Vector e = eval_basis(b, 0.0);
    CHECK(e[0] == 1.0);
    CHECK(e[1] == doctest::Approx(w2(1.0)).epsilon(1e-12));
    CHECK(std::abs(compute_Q(b)(1, 0)) < 1e-14);
}

TEST_CASE("basis properties over N_p and duty cycle") {
    for (double d : {0.1, 0.5, 0.7, 0.9}) {
        for (std::size_t np = 1; np <= 6; ++np) {
            CAPTURE(d);
            CAPTURE(np);
            const BasisSet b = build_pwm_basis(np, d, kTs);
            REQUIRE(b.size() == np);

            // Orthonormality, exact and against an independent quadrature.
            const Matrix gram = gram_matrix(b);
            CHECK((gram - Matrix::Identity(np, np)).cwiseAbs().maxCoeff() < 1e-10);
            for (std::size_t k = 0; k < np; ++k)
                for (std::size_t l = 0; l < np; ++l) {
                    const double expected = k == l ? 1.0 : 0.0;
                    CHECK(std::abs(quad_product(b[k], b[l], 1) - expected) < 1e-10);
                }

            const Matrix j = compute_J(b);
            CHECK((j - kTs * Matrix::Identity(np, np)).cwiseAbs().maxCoeff() < 1e-12 * kTs);
            CHECK(j.isApprox(j.transpose()));
            CHECK(j.llt().info() == Eigen::Success);

            const Matrix q = compute_Q(b);
            CHECK((q + q.transpose()).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(q(0, 0) == 0.0);

            for (std::size_t k = 0; k < np; ++k) {
                CHECK(std::abs(b[k].left_limit() - b[k].right_limit()) < 1e-12);
                CHECK(std::abs(b[k](0.0) - b[k](1.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("Gram matrix against quadrature on 2000 subintervals") {
    const BasisSet b = build_pwm_basis(3, 0.7, kTs);
    Matrix gram(3, 3);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            gram(k, l) = oracle::integrate([&](double x) { return b[k](x) * b[l](x); }, 0.0, 1.0,
                                           2000, 8);
    // 0.7 * 2000 is an integer, so the cusp lies on a subinterval boundary
    // up to rounding.
    CHECK((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Q against quadrature of the derivative") {
    for (double d : {0.3, 0.7}) {
        const BasisSet b = build_pwm_basis(4, d, kTs);
        const Matrix q = compute_Q(b);
        for (std::size_t k = 0; k < 4; ++k) {
            const auto dk = b[k].derivative();
            for (std::size_t l = 0; l < 4; ++l)
                CHECK(q(k, l) == doctest::Approx(-quad_product(dk, b[l], 4)).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("Q against finite differences") {
    const BasisSet b = build_pwm_basis(3, 0.7, kTs);
    const Matrix q = compute_Q(b);
    constexpr int n = 20000;
    const double h = 1.0 / n;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
            // Midpoint rule with central differences; the cusp only costs O(h).
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double x = (i + 0.5) * h;
                acc += (b[k](x + 0.5 * h) - b[k](x - 0.5 * h)) * b[l](x);
            }
            CHECK(std::abs(q(k, l) + acc) < 1e-3);
        }
}

TEST_CASE("eval_basis") {
    const BasisSet b = build_pwm_basis(4, 0.7, kTs);
    for (double t : {0.0, 1.3e-5, 1.4e-4, 7.77e-3}) {
        const Vector v = eval_basis(b, t);
        CHECK(v[0] == 1.0);
        const Vector shifted = eval_basis(b, t + kTs);
        CHECK((v - shifted).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK(relative_time(0.0, kTs) == 0.0);
    CHECK(relative_time(0.5 * kTs, kTs) == doctest::Approx(0.5));
    CHECK(relative_time(-0.25 * kTs, kTs) == doctest::Approx(0.75));
    for (double t : {12e-3, 3e-4, 5 * kTs}) {
        const double tau = relative_time(t, kTs);
        CHECK(tau >= 0.0);
        CHECK(tau < 1.0);
    }
}

TEST_CASE("piecewise polynomial pieces") {
    const auto f = PiecewisePolynomial::from_global(0.4, Polynomial({0.0, 1.0}),
                                                  Polynomial({0.4 / 0.6, -0.4 / 0.6}));
    CHECK(f(0.2) == doctest::Approx(0.2));
    CHECK(f(0.4) == doctest::Approx(0.4));
    CHECK(f.integrate() == doctest::Approx(0.5 * 0.4));  // hat of height 0.4
    const auto F = f.antiderivative();
    CHECK(F(0.0) == 0.0);
    CHECK(F.left_limit() == doctest::Approx(F.right_limit()).epsilon(1e-15));
    CHECK(F(1.0) == doctest::Approx(f.integrate()));
    CHECK(f.integrate(0.1, 0.9) == doctest::Approx(
                                       oracle::integrate([&](double x) { return f(x); }, 0.1, 0.4) +
                                       oracle::integrate([&](double x) { return f(x); }, 0.4, 0.9)));
}

TEST_CASE("basis argument errors") {
    CHECK_THROWS_AS((void)build_pwm_basis(0, 0.7, kTs), Error);
    CHECK_THROWS_AS((void)build_pwm_basis(3, 0.0, kTs), Error);
    CHECK_THROWS_AS((void)build_pwm_basis(3, 1.0, kTs), Error);
    CHECK_THROWS_AS((void)build_pwm_basis(3, 0.7, 0.0), Error);
    try {
        (void)build_pwm_basis(3, 0.7, -1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}
