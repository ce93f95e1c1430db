#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"
#include "hjrl/grid.hpp"

namespace hjrl {

/// Two sine hidden layers and a linear head:
///
///   z  = (x - input_offset) .* input_scale
///   h1 = sin(omega0 * (W1 z + b1))
///   h2 = sin(omega0 * (W2 h1 + b2))
///   y  = w3 . h2 + b3
///
/// All weights live in one flat vector, in the order W1 (column-major),
/// b1, W2 (column-major), b2, w3, b3. Gradients use the same layout.
class SirenNet {
 public:
  static constexpr int input_dim = 2;

  SirenNet(int width = 100, double omega0 = 30.0);

  int width() const noexcept { return width_; }
  double omega0() const noexcept { return omega0_; }
  Eigen::Index parameter_count() const noexcept { return params_.size(); }

  Eigen::VectorXd& params() noexcept { return params_; }
  const Eigen::VectorXd& params() const noexcept { return params_; }

  Eigen::Map<const Eigen::MatrixXd> w1() const;
  Eigen::Map<const Eigen::VectorXd> b1() const;
  Eigen::Map<const Eigen::MatrixXd> w2() const;
  Eigen::Map<const Eigen::VectorXd> b2() const;
  Eigen::Map<const Eigen::VectorXd> w3() const;
  double b3() const { return params_[params_.size() - 1]; }

  Eigen::Map<Eigen::MatrixXd> w1();
  Eigen::Map<Eigen::VectorXd> b1();
  Eigen::Map<Eigen::MatrixXd> w2();
  Eigen::Map<Eigen::VectorXd> b2();
  Eigen::Map<Eigen::VectorXd> w3();
  double& b3() { return params_[params_.size() - 1]; }

  /// Affine input normalisation; identity by default.
  Eigen::Array2d input_offset = Eigen::Array2d::Zero();
  Eigen::Array2d input_scale = Eigen::Array2d::Ones();

  /// Maps the region's bounds onto [-1, 1]^2.
  void normalize_inputs_to(const Grid2& roi);

  bool operator==(const SirenNet& other) const;

 private:
  Eigen::Index off_b1() const { return 2 * width_; }
  Eigen::Index off_w2() const { return 3 * width_; }
  Eigen::Index off_b2() const { return 3 * width_ + width_ * width_; }
  Eigen::Index off_w3() const { return 4 * width_ + width_ * width_; }

  int width_;
  double omega0_;
  Eigen::VectorXd params_;
};

/// Sinusoidal-network initialisation: first layer U(-1/2, 1/2), deeper layers
/// U(+-sqrt(6/fan_in)/omega0), biases U(+-1/sqrt(fan_in)).
SirenNet make_siren(std::uint64_t seed, int width = 100, double omega0 = 30.0);

double net_forward(const SirenNet& net, const State& x);

/// Batched forward pass; inputs are columns.
Eigen::RowVectorXd net_forward_batch(const SirenNet& net, const Eigen::Matrix2Xd& inputs);

/// Gradient of (net(x) - y)^2 with respect to every parameter.
Eigen::VectorXd net_gradient(const SirenNet& net, const State& x, double y);

/// Mean squared error over a batch and its parameter gradient.
struct BatchLoss {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

BatchLoss batch_loss_gradient(const SirenNet& net, const Eigen::Matrix2Xd& inputs,
                              const Eigen::RowVectorXd& targets);

/// TD target: the semi-Lagrangian backup with the network as continuation,
/// successors clamped into the region, result clamped to the value range.
double td_target(const SirenNet& net, const State& x, const TravelCost& cost,
                 const ControlledDynamics& dyn, const DiscountConfig& disc, const Grid2& roi);

/// Batched td_target over the columns of `states`.
Eigen::RowVectorXd td_targets(const SirenNet& net, const Eigen::Matrix2Xd& states,
                              const TravelCost& cost, const ControlledDynamics& dyn,
                              const DiscountConfig& disc, const Grid2& roi);

/// Network evaluated on every node of `grid`.
ScalarField predict_field(const SirenNet& net, const Grid2& grid);

// Checkpoint file:
//   SIREN v1
//   width omega0
//   offset_x offset_y scale_x scale_y
//   parameter_count
//   then one parameter per line in the flat layout order.
void write_checkpoint(const SirenNet& net, std::ostream& out);
void write_checkpoint(const SirenNet& net, const std::filesystem::path& path);
SirenNet read_checkpoint(std::istream& in);
SirenNet read_checkpoint(const std::filesystem::path& path);

}  // namespace hjrl
