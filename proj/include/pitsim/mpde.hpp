#pragma once

// Galerkin discretization of the multirate PDE along the fast time scale:
//   Acal y' + Bcal y = Ccal,  Acal = A (x) J,  Bcal = B (x) J + A (x) Q,
// with coefficients ordered component-major (block j holds y_{j,1..N_p}).

#include <cstddef>
#include <string_view>

#include "pitsim/basis.hpp"
#include "pitsim/model.hpp"
#include "pitsim/propagator.hpp"

namespace pitsim {

struct GalerkinSystem {
    Matrix mass;       // A (x) J
    Matrix stiffness;  // B (x) J + A (x) Q
    Vector projected_source;
    std::size_t states = 0;
    std::size_t basis_size = 0;

    [[nodiscard]] std::size_t size() const { return states * basis_size; }
    /// Ccal(t1). Constant in t1 because the source depends on t2 only.
    [[nodiscard]] const Vector& source(double /*t1*/) const { return projected_source; }
};

[[nodiscard]] Matrix kronecker(const Matrix& lhs, const Matrix& rhs);

/// Ccal_{j,k} = \int_0^{T_s} c_j(t2) w_k(tau(t2)) dt2, exact for every source
/// kind whose period divides T_s. Throws NonPeriodicSource otherwise.
[[nodiscard]] Vector project_source(const SourceTerm& source, std::size_t states,
                                    const BasisSet& basis);

[[nodiscard]] GalerkinSystem assemble_galerkin(const LinearDaeModel& model,
                                               const BasisSet& basis);

/// How a single-time state enters the Galerkin system at a window start.
enum class MpdeLift {
    /// Ripple coefficients start from the periodic steady state of their own
    /// equations and the envelope takes the remainder, y_{j,1} = x_j - ripple_j(tau).
    PeriodicRipple,
    /// y_{j,1} = x_j, all ripple coefficients zero.
    ZeroRipple,
};

/// y_{j,1} = x_j, all ripple coefficients zero.
[[nodiscard]] Vector lift_initial(const Vector& x0, const BasisSet& basis);

/// Steady-state ripple coefficients (k >= 2) of the Galerkin system, in the
/// full coefficient layout with every y_{j,1} set to zero. In the linear case
/// the ripple equations do not involve the envelope, so this is a constant of
/// the system. Throws SingularSystem when the ripple block is singular.
[[nodiscard]] Vector periodic_ripple(const GalerkinSystem& system);

/// Lift that keeps `ripple` and puts x - ripple(tau(t)) into the envelope, so
/// reconstruct(lift_periodic(x, ...), t) == x up to rounding.
[[nodiscard]] Vector lift_periodic(const Vector& x, const BasisSet& basis, const Vector& ripple,
                                   double t);

/// x_j = w(tau(t))^T y_j, with tau taken from global time t.
[[nodiscard]] Vector reconstruct(const Vector& y, const BasisSet& basis, double t);

/// Coarse propagator that lifts the start state, time-steps the Galerkin
/// system with implicit Euler and reconstructs the single-time solution at
/// the window end. The enlarged system is factorized once at construction.
class MpdePropagator final : public Propagator {
public:
    MpdePropagator(const LinearDaeModel& model, BasisSet basis, double step,
                   MpdeLift lift = MpdeLift::PeriodicRipple);

    [[nodiscard]] Propagation propagate(const Vector& x_start, double t_start,
                                        double t_end) const override;
    /// Envelope coefficients y(t_end) before reconstruction.
    [[nodiscard]] SweepResult propagate_coefficients(const Vector& x_start, double t_start,
                                                     double t_end) const;
    [[nodiscard]] std::string name() const override;

    [[nodiscard]] const BasisSet& basis() const { return basis_; }
    [[nodiscard]] const GalerkinSystem& system() const { return system_; }
    [[nodiscard]] MpdeLift lift() const { return lift_; }
    /// Coefficients the propagation starts from.
    [[nodiscard]] Vector lift(const Vector& x_start, double t_start) const;

private:
    BasisSet basis_;
    GalerkinSystem system_;
    LinearSystemSolver solver_;
    MpdeLift lift_;
    Vector ripple_;  // steady ripple, used by the periodic lift
};

/// Basis for `count` functions matched to the model's PWM source (its duty
/// cycle and switching period). Throws NonPeriodicSource without one.
[[nodiscard]] BasisSet basis_for_model(const LinearDaeModel& model, std::size_t count);

[[nodiscard]] Propagation mpde_coarse_propagate(const LinearDaeModel& model,
                                                const BasisSet& basis, const Vector& x_start,
                                                double t_start, double t_end, double step,
                                                MpdeLift lift = MpdeLift::PeriodicRipple);

[[nodiscard]] std::string_view to_string(MpdeLift lift);
/// "periodic" or "zero"; throws ValidationError otherwise.
[[nodiscard]] MpdeLift parse_mpde_lift(std::string_view text);

}  // namespace pitsim
