#pragma once

#include <cstddef>
#include <limits>

#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"

namespace hjrl {

struct BackupChoice {
  double value = 0.0;
  std::size_t action = 0;  // index into the control set
};

/// One semi-Lagrangian Bellman backup at x:
///
///   min_u  w * h(x + dt/2 f(x,u)) + gamma * next(x + dt f(x,u))
///
/// `next` supplies the continuation value at the Euler successor. Ties go to
/// the earliest control. The grid solver, the MDP view and the TD target all
/// route through this function so they share one arithmetic path.
template <class Continuation>
BackupChoice backup_at(const ControlledDynamics& dyn, const TravelCost& cost,
                       const DiscountConfig& disc, const State& x, Continuation&& next) {
  BackupChoice best{std::numeric_limits<double>::infinity(), 0};
  const auto actions = dyn.controls().actions();
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const State f = dyn(x, actions[a]);
    const double half = 0.5 * disc.dt;
    const State mid{x[0] + half * f[0], x[1] + half * f[1]};
    const State succ{x[0] + disc.dt * f[0], x[1] + disc.dt * f[1]};
    const double q = disc.weight * cost(mid) + disc.gamma * next(succ);
    if (q < best.value) {
      best = {q, a};
    }
  }
  return best;
}

}  // namespace hjrl
