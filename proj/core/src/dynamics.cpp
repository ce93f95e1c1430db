#include "hjrl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hjrl/error.hpp"

namespace hjrl {

ControlSet::ControlSet(std::vector<Control> actions) : actions_(std::move(actions)) {
  require(!actions_.empty(), "control set must be non-empty");
  for (Control u : actions_) {
    require(std::isfinite(u), "controls must be finite");
  }
}

ControlSet ControlSet::bang_bang(double a_max) {
  require(a_max > 0.0 && std::isfinite(a_max), "a_max must be positive");
  return ControlSet({-a_max, +a_max});
}

bool ControlSet::contains(Control u) const noexcept {
  return std::find(actions_.begin(), actions_.end(), u) != actions_.end();
}

ControlledDynamics::ControlledDynamics(VectorField field, ControlSet controls,
                                       double lipschitz_const_x, double speed_bound_on_roi)
    : field_(std::move(field)),
      controls_(std::move(controls)),
      lipschitz_x_(lipschitz_const_x),
      speed_bound_(speed_bound_on_roi) {
  require(static_cast<bool>(field_), "vector field must be callable");
  require(lipschitz_x_ >= 0.0, "Lipschitz constant must be nonnegative");
  require(speed_bound_ >= 0.0, "speed bound must be nonnegative");
}

ControlledDynamics double_integrator(double a_max, double velocity_bound) {
  require(velocity_bound >= 0.0, "velocity bound must be nonnegative");
  auto controls = ControlSet::bang_bang(a_max);
  // |f(x,u) - f(y,u)| = |x2 - y2| <= |x - y|, so L_f = 1.
  return ControlledDynamics([](const State& x, Control u) { return State{x[1], u}; },
                            std::move(controls), 1.0, std::hypot(velocity_bound, a_max));
}

State eval_field(const ControlledDynamics& dyn, std::span<const double> x, Control u) {
  if (x.size() != ControlledDynamics::state_dim) {
    throw ContractViolation("state has " + std::to_string(x.size()) + " components, expected " +
                            std::to_string(ControlledDynamics::state_dim));
  }
  if (!dyn.controls().contains(u)) {
    throw ContractViolation("control " + std::to_string(u) + " is not in the control set");
  }
  return dyn(State{x[0], x[1]}, u);
}

State flow_step(const ControlledDynamics& dyn, const FlowStep& step, const State& x, Control u) {
  require(step.dt > 0.0, "flow step dt must be positive");
  switch (step.scheme) {
    case FlowScheme::ExplicitEuler:
      return euler_step(dyn, step.dt, x, u);
    case FlowScheme::Midpoint:
      return half_step(dyn, step.dt, x, u);
  }
  throw ContractViolation("unknown flow scheme");
}

std::vector<State> rollout(const ControlledDynamics& dyn, const FlowStep& step, const State& x0,
                           std::span<const Control> controls) {
  require(!controls.empty(), "rollout needs at least one control");
  std::vector<State> states;
  states.reserve(controls.size() + 1);
  states.push_back(x0);
  for (Control u : controls) {
    states.push_back(flow_step(dyn, step, states.back(), u));
  }
  return states;
}

}  // namespace hjrl
