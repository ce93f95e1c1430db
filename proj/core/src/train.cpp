#include "hjrl/train.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hjrl/error.hpp"

namespace hjrl {

namespace {

Eigen::Matrix2Xd sample_states(std::mt19937_64& rng, const Grid2& roi, int count) {
  std::uniform_real_distribution<double> ux(roi.x_min(), roi.x_max());
  std::uniform_real_distribution<double> uy(roi.y_min(), roi.y_max());
  Eigen::Matrix2Xd states(2, count);
  for (int k = 0; k < count; ++k) {
    states(0, k) = ux(rng);
    states(1, k) = uy(rng);
  }
  return states;
}

class AdamState {
 public:
  explicit AdamState(Eigen::Index n) : m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    ++t_;
    m_ = beta1 * m_ + (1.0 - beta1) * grad;
    v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1, t_);
    const double c2 = 1.0 - std::pow(beta2, t_);
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
  }

 private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  int t_ = 0;
};

}  // namespace

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") {
    return Optimizer::Sgd;
  }
  if (name == "adam") {
    return Optimizer::Adam;
  }
  throw ContractViolation("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string to_string(Optimizer opt) { return opt == Optimizer::Sgd ? "sgd" : "adam"; }

double mean_bellman_residual(const SirenNet& net, const Eigen::Matrix2Xd& states,
                             const TravelCost& cost, const ControlledDynamics& dyn,
                             const DiscountConfig& disc, const Grid2& roi) {
  const Eigen::RowVectorXd pred = net_forward_batch(net, states);
  const Eigen::RowVectorXd target = td_targets(net, states, cost, dyn, disc, roi);
  return (pred - target).squaredNorm() / static_cast<double>(states.cols());
}

TrainResult train(const TrainConfig& cfg, const TravelCost& cost, const ControlledDynamics& dyn,
                  const DiscountConfig& disc, const Grid2& roi) {
  require(disc.rate > 0.0, "training needs a positive discount rate");
  require(cfg.batch_size > 0 && cfg.steps > 0 && cfg.target_refresh > 0,
          "batch_size, steps and target_refresh must be positive");
  require(cfg.learning_rate > 0.0, "learning rate must be positive");
  require(cfg.probe_every > 0 && cfg.probe_count > 0, "probe settings must be positive");

  SirenNet net = make_siren(cfg.seed, cfg.width, cfg.omega0);
  if (cfg.normalize_inputs) {
    net.normalize_inputs_to(roi);
  }
  SirenNet frozen = net;

  // Separate streams so the probe set does not depend on the step count.
  std::mt19937_64 sampler(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 probe_rng(cfg.seed ^ 0xc2b2ae3d27d4eb4fULL);
  const Eigen::Matrix2Xd probes = sample_states(probe_rng, roi, cfg.probe_count);

  AdamState adam(net.parameter_count());
  TrainLog log;
  log.loss.reserve(static_cast<std::size_t>(cfg.steps));

  constexpr int window = 100;
  double window_sum = 0.0;
  double reference = -1.0;

  for (int step = 1; step <= cfg.steps; ++step) {
    const Eigen::Matrix2Xd batch = sample_states(sampler, roi, cfg.batch_size);
    const Eigen::RowVectorXd targets = td_targets(frozen, batch, cost, dyn, disc, roi);
    BatchLoss lg = batch_loss_gradient(net, batch, targets);

    if (cfg.optimizer == Optimizer::Adam) {
      adam.step(net.params(), lg.gradient, cfg.learning_rate);
    } else {
      net.params() -= cfg.learning_rate * lg.gradient;
    }
    if (!net.params().allFinite()) {
      throw TrainingDiverged("non-finite weights at step " + std::to_string(step));
    }

    log.loss.push_back(lg.loss);
    window_sum += lg.loss;
    if (step > window) {
      window_sum -= log.loss[static_cast<std::size_t>(step - window - 1)];
    }
    if (step >= window) {
      const double running = window_sum / window;
      if (step == window) {
        reference = running;
      } else if (reference > 0.0 && running > cfg.divergence_factor * reference) {
        std::ostringstream msg;
        msg << "running mean loss " << running << " at step " << step << " exceeds "
            << cfg.divergence_factor << "x its step-" << window << " value " << reference;
        throw TrainingDiverged(msg.str());
      }
    }

    if (step % cfg.target_refresh == 0) {
      frozen = net;
    }
    if (step % cfg.probe_every == 0) {
      log.probe_steps.push_back(step);
      log.probe_residual.push_back(mean_bellman_residual(net, probes, cost, dyn, disc, roi));
    }
  }
  return {std::move(net), std::move(log)};
}

}  // namespace hjrl
