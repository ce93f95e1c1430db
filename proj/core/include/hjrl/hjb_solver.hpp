#pragma once

#include <functional>
#include <vector>

#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"
#include "hjrl/grid.hpp"

namespace hjrl {

struct SweepConfig {
  DiscountConfig disc = make_discount(1.0, 0.05);
  double tol = 1e-6;   // stop once the sup-norm change is <= tol
  int max_iters = 2000;
};

struct ValueSolution {
  ScalarField field;
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
  std::vector<double> deltas;  // deltas[k] = |V^{k+1} - V^k|_inf
};

/// slices[k] is the value at time-to-go k * dt.
struct TimeDependentSolution {
  std::vector<ScalarField> slices;
  Horizon horizon;
  double dt = 0.0;

  const ScalarField& final_slice() const { return slices.back(); }
};

/// Synchronous semi-Lagrangian Bellman sweep: every output node reads only V.
ScalarField sl_backup(const ScalarField& V, const SweepConfig& cfg, const ControlledDynamics& dyn,
                      const TravelCost& cost);

/// Value iteration V^{k+1} = T V^k from V^0 = seed (zero when omitted).
ValueSolution solve_stationary(const SweepConfig& cfg, const ControlledDynamics& dyn,
                               const TravelCost& cost, const Grid2& grid);
ValueSolution solve_stationary(const SweepConfig& cfg, const ControlledDynamics& dyn,
                               const TravelCost& cost, const ScalarField& seed);

/// Marches slices[k+1] = sl_backup(slices[k]) from zero data for T / dt steps.
/// A zero discount rate gives the undiscounted travel cost.
TimeDependentSolution solve_travel_finite_horizon(const SweepConfig& cfg,
                                                  const ControlledDynamics& dyn,
                                                  const TravelCost& cost, const Grid2& grid,
                                                  const Horizon& horizon);

/// Minimum-over-time reach recursion
///   U_{k+1}(x) = min(l(x), min_u U_k(x + dt f(x,u))),  U_0 = l.
TimeDependentSolution solve_reach_min_over_time(const ControlledDynamics& dyn, const Grid2& grid,
                                                const Horizon& horizon, double dt,
                                                const std::function<double(const State&)>& l);

/// Signed distance to the target circle, |x| - r.
std::function<double(const State&)> target_signed_distance(const TravelCost& cost);

}  // namespace hjrl
