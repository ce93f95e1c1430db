#include "hjrl/hjb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjrl/backup.hpp"
#include "hjrl/error.hpp"
#include "hjrl/parallel.hpp"

namespace hjrl {

ScalarField sl_backup(const ScalarField& V, const SweepConfig& cfg, const ControlledDynamics& dyn,
                      const TravelCost& cost) {
  const Grid2& g = V.grid();
  std::vector<double> out(g.size());
  auto next = [&V](const State& s) { return interpolate(V, s); };
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      out[k] = backup_at(dyn, cost, cfg.disc, g.node(k), next).value;
    }
  });
  return ScalarField(g, std::move(out));
}

ValueSolution solve_stationary(const SweepConfig& cfg, const ControlledDynamics& dyn,
                               const TravelCost& cost, const Grid2& grid) {
  return solve_stationary(cfg, dyn, cost, ScalarField::filled(grid, 0.0));
}

ValueSolution solve_stationary(const SweepConfig& cfg, const ControlledDynamics& dyn,
                               const TravelCost& cost, const ScalarField& seed) {
  require(cfg.disc.rate > 0.0, "stationary solve needs a positive discount rate");
  require(cfg.tol > 0.0, "tolerance must be positive");
  require(cfg.max_iters > 0, "max_iters must be positive");

  ValueSolution sol{seed, 0, std::numeric_limits<double>::infinity(), false, {}};
  while (sol.iterations < cfg.max_iters) {
    ScalarField next = sl_backup(sol.field, cfg, dyn, cost);
    const double delta = sup_distance(next, sol.field);
    sol.field = std::move(next);
    sol.deltas.push_back(delta);
    sol.final_delta = delta;
    ++sol.iterations;
    if (delta <= cfg.tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

TimeDependentSolution solve_travel_finite_horizon(const SweepConfig& cfg,
                                                  const ControlledDynamics& dyn,
                                                  const TravelCost& cost, const Grid2& grid,
                                                  const Horizon& horizon) {
  const int steps = horizon_steps(horizon, cfg.disc.dt);
  TimeDependentSolution sol{{ScalarField::filled(grid, 0.0)}, horizon, cfg.disc.dt};
  sol.slices.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k < steps; ++k) {
    sol.slices.push_back(sl_backup(sol.slices.back(), cfg, dyn, cost));
  }
  return sol;
}

TimeDependentSolution solve_reach_min_over_time(const ControlledDynamics& dyn, const Grid2& grid,
                                                const Horizon& horizon, double dt,
                                                const std::function<double(const State&)>& l) {
  const int steps = horizon_steps(horizon, dt);
  const ScalarField target = ScalarField::sample(grid, l);
  TimeDependentSolution sol{{target}, horizon, dt};
  sol.slices.reserve(static_cast<std::size_t>(steps) + 1);
  const auto actions = dyn.controls().actions();
  for (int k = 0; k < steps; ++k) {
    const ScalarField& prev = sol.slices.back();
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t n = begin; n < end; ++n) {
        const State x = grid.node(n);
        double best = target[n];
        for (Control u : actions) {
          best = std::min(best, interpolate(prev, euler_step(dyn, dt, x, u)));
        }
        out[n] = best;
      }
    });
    sol.slices.emplace_back(grid, std::move(out));
  }
  return sol;
}

std::function<double(const State&)> target_signed_distance(const TravelCost& cost) {
  const double r = cost.radius();
  return [r](const State& x) { return norm(x) - r; };
}

}  // namespace hjrl
