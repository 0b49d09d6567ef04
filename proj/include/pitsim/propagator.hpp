#pragma once

#include <cstddef>
#include <string>

#include "pitsim/integrator.hpp"
#include "pitsim/model.hpp"

namespace pitsim {

struct Propagation {
    Vector state;
    std::size_t solves = 0;
    std::size_t system_size = 0;  // dimension of each linear system solved
};

/// Solution operator x(t_end) = P(t_end, t_start, x_start) of a fixed model.
///
/// Implementations are immutable after construction and propagate() must be
/// safe to call concurrently.
class Propagator {
public:
    virtual ~Propagator() = default;

    [[nodiscard]] virtual Propagation propagate(const Vector& x_start, double t_start,
                                                double t_end) const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

/// Implicit Euler on A x' + B x = c(t) with a fixed nominal step, the source
/// sampled at step endpoints.
class ImplicitEulerPropagator final : public Propagator {
public:
    ImplicitEulerPropagator(LinearDaeModel model, double step, std::string name);

    [[nodiscard]] Propagation propagate(const Vector& x_start, double t_start,
                                        double t_end) const override;
    [[nodiscard]] Trajectory trajectory(const Vector& x_start, double t_start,
                                        double t_end) const;
    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] const LinearDaeModel& model() const { return model_; }

private:
    [[nodiscard]] Forcing forcing() const;

    LinearDaeModel model_;
    LinearSystemSolver solver_;
    std::string name_;
};

}  // namespace pitsim
