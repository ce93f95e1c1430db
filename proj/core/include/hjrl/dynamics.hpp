#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hjrl/types.hpp"

namespace hjrl {

/// Finite, ordered set of admissible constant controls.
class ControlSet {
 public:
  explicit ControlSet(std::vector<Control> actions);

  /// {-a_max, +a_max}, in that order.
  static ControlSet bang_bang(double a_max);

  std::span<const Control> actions() const noexcept { return actions_; }
  std::size_t size() const noexcept { return actions_.size(); }
  Control operator[](std::size_t i) const { return actions_[i]; }
  bool contains(Control u) const noexcept;

 private:
  std::vector<Control> actions_;
};

/// Controlled ODE x' = f(x, u) on the plane together with its control set.
///
/// `lipschitz_const_x` is L_f. `speed_bound_on_roi` is sup |f| over the
/// configured region only; the double integrator is unbounded on the whole
/// plane, so no global bound is claimed.
class ControlledDynamics {
 public:
  using VectorField = std::function<State(const State&, Control)>;

  ControlledDynamics(VectorField field, ControlSet controls, double lipschitz_const_x,
                     double speed_bound_on_roi);

  static constexpr std::size_t state_dim = 2;

  const ControlSet& controls() const noexcept { return controls_; }
  double lipschitz_const_x() const noexcept { return lipschitz_x_; }
  double speed_bound_on_roi() const noexcept { return speed_bound_; }

  /// Unchecked evaluation; callers iterate over controls() themselves.
  State operator()(const State& x, Control u) const { return field_(x, u); }

 private:
  VectorField field_;
  ControlSet controls_;
  double lipschitz_x_;
  double speed_bound_;
};

/// x1' = x2, x2' = u with u in {-a_max, +a_max}. `velocity_bound` is the
/// largest |x2| on the region the bound M_f should cover.
ControlledDynamics double_integrator(double a_max = 1.0, double velocity_bound = 0.0);

enum class FlowScheme { ExplicitEuler, Midpoint };

struct FlowStep {
  FlowScheme scheme = FlowScheme::ExplicitEuler;
  double dt = 0.05;
};

/// Checked f(x, u): x must have state_dim entries and u must be admissible.
State eval_field(const ControlledDynamics& dyn, std::span<const double> x, Control u);

/// Euler: x + dt f(x,u). Midpoint: the half step x + (dt/2) f(x,u) used for
/// running-cost quadrature.
State flow_step(const ControlledDynamics& dyn, const FlowStep& step, const State& x, Control u);

/// states[0] = x0, states[k+1] = flow_step(states[k], controls[k]).
std::vector<State> rollout(const ControlledDynamics& dyn, const FlowStep& step, const State& x0,
                           std::span<const Control> controls);

inline State euler_step(const ControlledDynamics& dyn, double dt, const State& x, Control u) {
  const State f = dyn(x, u);
  return {x[0] + dt * f[0], x[1] + dt * f[1]};
}

inline State half_step(const ControlledDynamics& dyn, double dt, const State& x, Control u) {
  const State f = dyn(x, u);
  const double half = 0.5 * dt;
  return {x[0] + half * f[0], x[1] + half * f[1]};
}

}  // namespace hjrl
