#include "pitsim/propagator.hpp"

namespace pitsim {

ImplicitEulerPropagator::ImplicitEulerPropagator(LinearDaeModel model, double step,
                                                 std::string name)
    : model_(std::move(model)), solver_(model_.a(), model_.b(), step), name_(std::move(name)) {}

Forcing ImplicitEulerPropagator::forcing() const {
    return [this](double t) { return eval_source(model_, t); };
}

Propagation ImplicitEulerPropagator::propagate(const Vector& x_start, double t_start,
                                               double t_end) const {
    auto r = implicit_euler_sweep(solver_, model_.a(), model_.b(), forcing(), x_start, t_start,
                                  t_end);
    return {std::move(r.state), r.solves, model_.size()};
}

Trajectory ImplicitEulerPropagator::trajectory(const Vector& x_start, double t_start,
                                               double t_end) const {
    return sweep_with_trajectory(solver_, model_.a(), model_.b(), forcing(), x_start, t_start,
                                 t_end);
}

}  // namespace pitsim
