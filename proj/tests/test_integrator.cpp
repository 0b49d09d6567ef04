#include <cmath>

#include "doctest.h"
#include "pitsim/error.hpp"
#include "pitsim/integrator.hpp"
#include "pitsim/model.hpp"

using namespace pitsim;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector vec1(double v) { return Vector::Constant(1, v); }

Forcing zero_forcing(Eigen::Index n) {
    return [n](double) { return Vector::Zero(n); };
}

}  // namespace

TEST_CASE("single implicit Euler step on x' = -x") {
    const auto r = implicit_euler_sweep(scalar(1), scalar(1), zero_forcing(1), vec1(1.0), 0.0, 0.1, 0.1);
    CHECK(r.solves == 1);
    CHECK(r.state[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
}

TEST_CASE("constant forcing is integrated exactly") {
    const double c = 2.5;
    const double h = 0.125;
    const auto r = implicit_euler_sweep(scalar(1), scalar(0), [&](double) { return vec1(c); },
                                        vec1(0.0), 0.0, 10 * h, h);
    CHECK(r.solves == 10);
    CHECK(r.state[0] == c * 10 * h);
}

TEST_CASE("first-order convergence on the decay test") {
    auto error_at_one = [](double h) {
        const auto r = implicit_euler_sweep(scalar(1), scalar(1), zero_forcing(1), vec1(1.0), 0.0, 1.0, h);
        return std::abs(r.state[0] - std::exp(-1.0));
    };
    const double e1 = error_at_one(1e-2);
    const double e2 = error_at_one(5e-3);
    const double e3 = error_at_one(2.5e-3);
    CHECK(e1 / e2 >= 1.8);
    CHECK(e1 / e2 <= 2.2);
    CHECK(e2 / e3 >= 1.8);
    CHECK(e2 / e3 <= 2.2);
}

TEST_CASE("buck with DC drive settles at the steady state") {
    const LinearDaeModel m = buck_preset();
    const Vector dc{{70.0, 0.0}};
    const auto r = implicit_euler_sweep(m.a(), m.b(), [&](double) { return dc; }, m.x0(), 0.0,
                                        0.1, 1e-6);
    CHECK(r.solves == 100000);
    CHECK(r.state[0] == doctest::Approx(86.420).epsilon(1e-3));
    CHECK(r.state[1] == doctest::Approx(69.136).epsilon(1e-3));
}

TEST_CASE("trajectory records every step") {
    const LinearDaeModel m = buck_preset();
    const Forcing f = [&](double t) { return eval_source(m, t); };
    const auto traj = sweep_with_trajectory(m.a(), m.b(), f, m.x0(), 0.0, 3e-4, 1e-6);
    CHECK(traj.solves == 300);
    REQUIRE(traj.times.size() == 301);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.states.front() == m.x0());
    CHECK(std::abs(traj.times.back() - 3e-4) <= 1e-12 * 3e-4);

    const auto end = implicit_euler_sweep(m.a(), m.b(), f, m.x0(), 0.0, 3e-4, 1e-6);
    CHECK(end.state == traj.states.back());
}

TEST_CASE("step counts come from the window endpoints") {
    // 40 windows of the benchmark partition each take exactly 300 steps.
    const double width = 12e-3 / 40;
    for (int n = 0; n < 40; ++n) {
        const double a = n * width;
        const double b = n + 1 == 40 ? 12e-3 : (n + 1) * width;
        const StepPlan plan = plan_steps(a, b, 1e-6);
        CHECK(plan.full_steps == 300);
        CHECK_FALSE(plan.shortened_last);
    }
}

TEST_CASE("non-integer ratio ends with one shortened step") {
    const StepPlan plan = plan_steps(0.0, 1.05, 0.25);
    CHECK(plan.full_steps == 4);
    CHECK(plan.shortened_last);
    CHECK(plan.last_step == doctest::Approx(0.05));
    CHECK(plan.total() == 5);

    const auto traj = sweep_with_trajectory(scalar(1), scalar(1), zero_forcing(1), vec1(1.0), 0.0, 1.05, 0.25);
    CHECK(traj.solves == 5);
    CHECK(traj.times.back() == 1.05);
    const double expected = std::pow(1.0 / 1.25, 4) / (1.0 + 1.05 - 1.0);
    CHECK(traj.states.back()[0] == doctest::Approx(expected).epsilon(1e-13));

    // Step longer than the interval: a single shortened step.
    const StepPlan one = plan_steps(0.0, 0.1, 0.25);
    CHECK(one.full_steps == 0);
    CHECK(one.total() == 1);
}

TEST_CASE("empty interval is the identity") {
    const auto r = implicit_euler_sweep(scalar(1), scalar(1), zero_forcing(1), vec1(3.0), 0.5, 0.5, 0.1);
    CHECK(r.solves == 0);
    CHECK(r.state[0] == 3.0);
}

TEST_CASE("integrator errors") {
    try {
        (void)implicit_euler_sweep(scalar(1), scalar(1), zero_forcing(1), vec1(1.0), 0.0, 1.0, 0.0);
        FAIL("expected NonpositiveStep");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonpositiveStep);
    }
    CHECK_THROWS_AS(LinearSystemSolver(scalar(1), scalar(1), -1.0), Error);

    // M/h + K = 0.
    try {
        (void)LinearSystemSolver(scalar(1), scalar(-10), 0.1);
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularSystem);
    }
    // Singular algebraic block of a DAE.
    const Matrix m{{1.0, 0.0}, {0.0, 0.0}};
    const Matrix k{{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(LinearSystemSolver(m, k, 0.1), Error);

    CHECK_THROWS_AS((void)implicit_euler_sweep(scalar(1), Matrix::Identity(2, 2), zero_forcing(1),
                                               vec1(1.0), 0.0, 1.0, 0.1),
                    Error);
}

TEST_CASE("index-1 DAE with singular mass matrix") {
    // x1' + x1 - x2 = 0, x2 = 1  ->  x1 -> 1.
    const Matrix m{{1.0, 0.0}, {0.0, 0.0}};
    const Matrix k{{1.0, -1.0}, {0.0, 1.0}};
    const auto r = implicit_euler_sweep(m, k, [](double) { return Vector{{0.0, 1.0}}; },
                                        Vector::Zero(2), 0.0, 20.0, 0.01);
    CHECK(r.state[1] == doctest::Approx(1.0));
    CHECK(r.state[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sweeps are deterministic") {
    const LinearDaeModel m = buck_preset();
    const Forcing f = [&](double t) { return eval_source(m, t); };
    const auto a = implicit_euler_sweep(m.a(), m.b(), f, m.x0(), 0.0, 1e-3, 1e-6);
    const auto b = implicit_euler_sweep(m.a(), m.b(), f, m.x0(), 0.0, 1e-3, 1e-6);
    CHECK(a.state[0] == b.state[0]);
    CHECK(a.state[1] == b.state[1]);
}
