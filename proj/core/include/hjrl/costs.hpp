#pragma once

#include <span>
#include <vector>

#include "hjrl/types.hpp"

namespace hjrl {

/// Travel cost h(x) = -scale * (radius - |x|) inside the open disk |x| < radius
/// and 0 elsewhere. Independent of the control and of time for the benchmark.
class TravelCost {
 public:
  TravelCost(double radius = 1.0, double scale = 1.0);

  double radius() const noexcept { return radius_; }
  double scale() const noexcept { return scale_; }
  /// M_h = scale * radius, so -M_h <= h <= 0.
  double bound() const noexcept { return scale_ * radius_; }

  /// Membership in the open target disk.
  bool on_target(const State& x) const noexcept { return norm(x) < radius_; }

  double operator()(const State& x) const noexcept {
    const double d = norm(x);
    return d < radius_ ? -scale_ * (radius_ - d) : 0.0;
  }

 private:
  double radius_;
  double scale_;
};

double eval_cost(const TravelCost& cost, const State& x);

enum class CalibrationFault {
  NonzeroOffTarget,     // h != 0 outside the target
  NonnegativeOnTarget,  // h >= 0 inside the target
};

struct CalibrationViolation {
  State x;
  CalibrationFault fault;
  double value;
};

struct CalibrationReport {
  std::vector<CalibrationViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

CalibrationReport check_calibration(const TravelCost& cost, std::span<const State> samples);

/// Discount bookkeeping for one backup of length dt:
/// gamma = exp(-rate dt), weight = (1 - gamma) / rate (dt when rate = 0).
struct DiscountConfig {
  double rate = 1.0;
  double dt = 0.05;
  double gamma = 0.0;
  double weight = 0.0;
};

DiscountConfig make_discount(double rate, double dt);

struct ValueRange {
  double lo;
  double hi;
};

/// [-M_h / rate, 0]; undefined for rate = 0.
ValueRange value_range(const TravelCost& cost, const DiscountConfig& disc);

struct Horizon {
  double T = 1.0;
  bool forward = true;  // solved in time-to-go tau = T - t
};

Horizon make_horizon(double T, bool forward = true);

/// Number of steps K with K * dt == T; throws unless T / dt is an integer.
int horizon_steps(const Horizon& horizon, double dt);

}  // namespace hjrl
