#include "hjrl/costs.hpp"

#include <algorithm>
#include <cmath>

#include "hjrl/error.hpp"

namespace hjrl {

TravelCost::TravelCost(double radius, double scale) : radius_(radius), scale_(scale) {
  require(radius_ > 0.0 && std::isfinite(radius_), "target radius must be positive");
  require(scale_ >= 0.0 && std::isfinite(scale_), "cost scale must be nonnegative");
}

double eval_cost(const TravelCost& cost, const State& x) { return cost(x); }

CalibrationReport check_calibration(const TravelCost& cost, std::span<const State> samples) {
  require(!samples.empty(), "calibration check needs at least one sample");
  CalibrationReport report;
  for (const State& x : samples) {
    const double h = cost(x);
    if (cost.on_target(x)) {
      if (!(h < 0.0)) {
        report.violations.push_back({x, CalibrationFault::NonnegativeOnTarget, h});
      }
    } else if (h != 0.0) {
      report.violations.push_back({x, CalibrationFault::NonzeroOffTarget, h});
    }
  }
  return report;
}

DiscountConfig make_discount(double rate, double dt) {
  require(rate >= 0.0 && std::isfinite(rate), "discount rate must be nonnegative");
  require(dt > 0.0 && std::isfinite(dt), "step dt must be positive");
  DiscountConfig d;
  d.rate = rate;
  d.dt = dt;
  d.gamma = std::exp(-rate * dt);
  // expm1 keeps (1 - gamma) / rate accurate for small rate * dt.
  d.weight = rate > 0.0 ? -std::expm1(-rate * dt) / rate : dt;
  return d;
}

ValueRange value_range(const TravelCost& cost, const DiscountConfig& disc) {
  require(disc.rate > 0.0, "value range needs a positive discount rate");
  return {-cost.bound() / disc.rate, 0.0};
}

Horizon make_horizon(double T, bool forward) {
  require(T > 0.0 && std::isfinite(T), "horizon T must be positive");
  return {T, forward};
}

int horizon_steps(const Horizon& horizon, double dt) {
  require(dt > 0.0, "step dt must be positive");
  require(horizon.T >= 0.0, "horizon T must be nonnegative");
  const double ratio = horizon.T / dt;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) > 1e-9 * std::max(1.0, k)) {
    throw ContractViolation("horizon is not an integer number of steps");
  }
  return static_cast<int>(k);
}

}  // namespace hjrl
