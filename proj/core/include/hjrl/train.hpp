#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"
#include "hjrl/grid.hpp"
#include "hjrl/siren.hpp"

namespace hjrl {

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  int batch_size = 256;
  int steps = 50000;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  int target_refresh = 200;  // steps between target-network copies
  Optimizer optimizer = Optimizer::Adam;  // plain SGD at this rate stalls far above the PDE value
  int width = 100;
  double omega0 = 30.0;
  bool normalize_inputs = true;  // feed the network ROI coordinates mapped to [-1, 1]
  int probe_every = 500;
  int probe_count = 1024;
  double divergence_factor = 10.0;
};

/// Thrown when the running mean loss blows up relative to its early value.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainLog {
  std::vector<double> loss;            // per step, mean squared TD error
  std::vector<int> probe_steps;
  std::vector<double> probe_residual;  // mean squared Bellman residual on a fixed probe set
};

struct TrainResult {
  SirenNet net;
  TrainLog log;
};

/// Fitted-value TD training. States are drawn uniformly over `roi`, targets
/// come from a frozen copy of the network refreshed every target_refresh
/// steps, and the squared TD error is minimised. Identical configs and seeds
/// give bitwise-identical weights.
TrainResult train(const TrainConfig& cfg, const TravelCost& cost, const ControlledDynamics& dyn,
                  const DiscountConfig& disc, const Grid2& roi);

/// Mean squared (net - T net) over the columns of `states`.
double mean_bellman_residual(const SirenNet& net, const Eigen::Matrix2Xd& states,
                             const TravelCost& cost, const ControlledDynamics& dyn,
                             const DiscountConfig& disc, const Grid2& roi);

Optimizer parse_optimizer(const std::string& name);
std::string to_string(Optimizer opt);

}  // namespace hjrl
