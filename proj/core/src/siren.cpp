#include "hjrl/siren.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "hjrl/backup.hpp"
#include "hjrl/error.hpp"

namespace hjrl {

SirenNet::SirenNet(int width, double omega0) : width_(width), omega0_(omega0) {
  require(width > 0, "network width must be positive");
  require(omega0 > 0.0 && std::isfinite(omega0), "omega0 must be positive");
  params_ = Eigen::VectorXd::Zero(5 * width_ + width_ * width_ + 1);
}

Eigen::Map<const Eigen::MatrixXd> SirenNet::w1() const {
  return {params_.data(), width_, input_dim};
}
Eigen::Map<const Eigen::VectorXd> SirenNet::b1() const {
  return {params_.data() + off_b1(), width_};
}
Eigen::Map<const Eigen::MatrixXd> SirenNet::w2() const {
  return {params_.data() + off_w2(), width_, width_};
}
Eigen::Map<const Eigen::VectorXd> SirenNet::b2() const {
  return {params_.data() + off_b2(), width_};
}
Eigen::Map<const Eigen::VectorXd> SirenNet::w3() const {
  return {params_.data() + off_w3(), width_};
}
Eigen::Map<Eigen::MatrixXd> SirenNet::w1() { return {params_.data(), width_, input_dim}; }
Eigen::Map<Eigen::VectorXd> SirenNet::b1() { return {params_.data() + off_b1(), width_}; }
Eigen::Map<Eigen::MatrixXd> SirenNet::w2() {
  return {params_.data() + off_w2(), width_, width_};
}
Eigen::Map<Eigen::VectorXd> SirenNet::b2() { return {params_.data() + off_b2(), width_}; }
Eigen::Map<Eigen::VectorXd> SirenNet::w3() { return {params_.data() + off_w3(), width_}; }

void SirenNet::normalize_inputs_to(const Grid2& roi) {
  input_offset << 0.5 * (roi.x_min() + roi.x_max()), 0.5 * (roi.y_min() + roi.y_max());
  input_scale << 2.0 / (roi.x_max() - roi.x_min()), 2.0 / (roi.y_max() - roi.y_min());
}

bool SirenNet::operator==(const SirenNet& other) const {
  return width_ == other.width_ && omega0_ == other.omega0_ &&
         (input_offset == other.input_offset).all() && (input_scale == other.input_scale).all() &&
         params_ == other.params_;
}

SirenNet make_siren(std::uint64_t seed, int width, double omega0) {
  SirenNet net(width, omega0);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](auto&& block, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index k = 0; k < block.size(); ++k) {
      block.data()[k] = dist(rng);
    }
  };
  const double hidden = std::sqrt(6.0 / width) / omega0;
  fill(net.w1(), 1.0 / SirenNet::input_dim);
  fill(net.b1(), 1.0 / std::sqrt(static_cast<double>(SirenNet::input_dim)));
  fill(net.w2(), hidden);
  fill(net.b2(), 1.0 / std::sqrt(static_cast<double>(width)));
  fill(net.w3(), hidden);
  std::uniform_real_distribution<double> head(-1.0 / std::sqrt(static_cast<double>(width)),
                                              1.0 / std::sqrt(static_cast<double>(width)));
  net.b3() = head(rng);
  return net;
}

namespace {

void require_finite(const SirenNet& net) {
  require(net.params().allFinite(), "network weights must be finite");
}

struct Activations {
  Eigen::MatrixXd z;   // normalised inputs, 2 x B
  Eigen::MatrixXd a1;  // omega0 * (W1 z + b1)
  Eigen::MatrixXd h1;
  Eigen::MatrixXd a2;
  Eigen::MatrixXd h2;
  Eigen::RowVectorXd y;
};

Activations forward_pass(const SirenNet& net, const Eigen::Matrix2Xd& inputs) {
  Activations act;
  act.z = ((inputs.array().colwise() - net.input_offset).colwise() * net.input_scale).matrix();
  act.a1 = net.omega0() * ((net.w1() * act.z).colwise() + net.b1()).array();
  act.h1 = act.a1.array().sin();
  act.a2 = net.omega0() * ((net.w2() * act.h1).colwise() + net.b2()).array();
  act.h2 = act.a2.array().sin();
  act.y = (net.w3().transpose() * act.h2).array() + net.b3();
  return act;
}

}  // namespace

double net_forward(const SirenNet& net, const State& x) {
  require_finite(net);
  Eigen::Matrix2Xd in(2, 1);
  in << x[0], x[1];
  return forward_pass(net, in).y[0];
}

Eigen::RowVectorXd net_forward_batch(const SirenNet& net, const Eigen::Matrix2Xd& inputs) {
  require_finite(net);
  return forward_pass(net, inputs).y;
}

BatchLoss batch_loss_gradient(const SirenNet& net, const Eigen::Matrix2Xd& inputs,
                              const Eigen::RowVectorXd& targets) {
  require(inputs.cols() == targets.size(), "batch inputs and targets differ in length");
  require(inputs.cols() > 0, "batch must be non-empty");
  const Activations act = forward_pass(net, inputs);
  const double batch = static_cast<double>(inputs.cols());
  const Eigen::RowVectorXd residual = act.y - targets;

  BatchLoss out;
  out.loss = residual.squaredNorm() / batch;
  out.gradient = Eigen::VectorXd::Zero(net.parameter_count());

  const int width = net.width();
  const double w0 = net.omega0();
  const Eigen::RowVectorXd gy = (2.0 / batch) * residual;

  // Views into the flat gradient, same layout as the parameters.
  double* g = out.gradient.data();
  Eigen::Map<Eigen::MatrixXd> gw1(g, width, 2);
  Eigen::Map<Eigen::VectorXd> gb1(g + 2 * width, width);
  Eigen::Map<Eigen::MatrixXd> gw2(g + 3 * width, width, width);
  Eigen::Map<Eigen::VectorXd> gb2(g + 3 * width + width * width, width);
  Eigen::Map<Eigen::VectorXd> gw3(g + 4 * width + width * width, width);

  gw3.noalias() = act.h2 * gy.transpose();
  g[out.gradient.size() - 1] = gy.sum();

  const Eigen::MatrixXd da2 = ((net.w3() * gy).array() * act.a2.array().cos()).matrix();
  gw2.noalias() = w0 * (da2 * act.h1.transpose());
  gb2 = w0 * da2.rowwise().sum();

  const Eigen::MatrixXd dh1 = w0 * (net.w2().transpose() * da2);
  const Eigen::MatrixXd da1 = (dh1.array() * act.a1.array().cos()).matrix();
  gw1.noalias() = w0 * (da1 * act.z.transpose());
  gb1 = w0 * da1.rowwise().sum();
  return out;
}

Eigen::VectorXd net_gradient(const SirenNet& net, const State& x, double y) {
  require_finite(net);
  Eigen::Matrix2Xd in(2, 1);
  in << x[0], x[1];
  Eigen::RowVectorXd t(1);
  t << y;
  return batch_loss_gradient(net, in, t).gradient;
}

double td_target(const SirenNet& net, const State& x, const TravelCost& cost,
                 const ControlledDynamics& dyn, const DiscountConfig& disc, const Grid2& roi) {
  const ValueRange range = value_range(cost, disc);
  const double best = backup_at(dyn, cost, disc, x, [&](const State& s) {
                        return net_forward(net, roi.clamp(s));
                      }).value;
  return std::clamp(best, range.lo, range.hi);
}

Eigen::RowVectorXd td_targets(const SirenNet& net, const Eigen::Matrix2Xd& states,
                              const TravelCost& cost, const ControlledDynamics& dyn,
                              const DiscountConfig& disc, const Grid2& roi) {
  require_finite(net);
  const ValueRange range = value_range(cost, disc);
  const Eigen::Index n = states.cols();
  const auto actions = dyn.controls().actions();
  Eigen::RowVectorXd best = Eigen::RowVectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::Matrix2Xd succ(2, n);
  Eigen::RowVectorXd running(n);
  for (Control u : actions) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const State x{states(0, k), states(1, k)};
      const State f = dyn(x, u);
      const double half = 0.5 * disc.dt;
      running[k] = disc.weight * cost(State{x[0] + half * f[0], x[1] + half * f[1]});
      const State s = roi.clamp(State{x[0] + disc.dt * f[0], x[1] + disc.dt * f[1]});
      succ(0, k) = s[0];
      succ(1, k) = s[1];
    }
    const Eigen::RowVectorXd cont = forward_pass(net, succ).y;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double q = running[k] + disc.gamma * cont[k];
      if (q < best[k]) {
        best[k] = q;
      }
    }
  }
  return best.array().max(range.lo).min(range.hi);
}

ScalarField predict_field(const SirenNet& net, const Grid2& grid) {
  require_finite(net);
  Eigen::Matrix2Xd nodes(2, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const State p = grid.node(k);
    nodes(0, static_cast<Eigen::Index>(k)) = p[0];
    nodes(1, static_cast<Eigen::Index>(k)) = p[1];
  }
  std::vector<double> values(grid.size());
  // Chunked so the activation matrices stay small on large grids.
  constexpr Eigen::Index chunk = 4096;
  for (Eigen::Index start = 0; start < nodes.cols(); start += chunk) {
    const Eigen::Index len = std::min(chunk, nodes.cols() - start);
    const Eigen::RowVectorXd y = forward_pass(net, nodes.middleCols(start, len)).y;
    std::copy(y.data(), y.data() + len, values.begin() + start);
  }
  return ScalarField(grid, std::move(values));
}

void write_checkpoint(const SirenNet& net, std::ostream& out) {
  out << "SIREN v1\n"
      << net.width() << ' ' << format_double(net.omega0()) << '\n'
      << format_double(net.input_offset[0]) << ' ' << format_double(net.input_offset[1]) << ' '
      << format_double(net.input_scale[0]) << ' ' << format_double(net.input_scale[1]) << '\n'
      << net.parameter_count() << '\n';
  for (Eigen::Index k = 0; k < net.parameter_count(); ++k) {
    out << format_double(net.params()[k]) << '\n';
  }
}

void write_checkpoint(const SirenNet& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  write_checkpoint(net, out);
}

namespace {

template <class T>
T read_token(std::istringstream& line, std::size_t lineno, const char* what) {
  T v{};
  if (!(line >> v)) {
    throw ParseError(std::string("expected ") + what, lineno);
  }
  return v;
}

}  // namespace

SirenNet read_checkpoint(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](const char* what) {
    ++lineno;
    if (!std::getline(in, line)) {
      throw ParseError(std::string("unexpected end of checkpoint, expected ") + what, lineno);
    }
    return std::istringstream(line);
  };
  {
    auto s = next_line("header");
    if (line != "SIREN v1") {
      throw ParseError("missing 'SIREN v1' header", lineno);
    }
  }
  auto dims = next_line("width omega0");
  const int width = read_token<int>(dims, lineno, "width");
  const double omega0 = read_token<double>(dims, lineno, "omega0");
  if (width <= 0 || !(omega0 > 0.0)) {
    throw ParseError("invalid network dimensions", lineno);
  }
  SirenNet net(width, omega0);
  auto norm_line = next_line("input normalisation");
  for (int k = 0; k < 2; ++k) {
    net.input_offset[k] = read_token<double>(norm_line, lineno, "input offset");
  }
  for (int k = 0; k < 2; ++k) {
    net.input_scale[k] = read_token<double>(norm_line, lineno, "input scale");
  }
  auto count_line = next_line("parameter count");
  const long count = read_token<long>(count_line, lineno, "parameter count");
  if (count != net.parameter_count()) {
    throw ParseError("parameter count does not match width", lineno);
  }
  for (Eigen::Index k = 0; k < net.parameter_count(); ++k) {
    auto s = next_line("parameter");
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || !std::isfinite(v)) {
      throw ParseError("invalid parameter '" + line + "'", lineno);
    }
    net.params()[k] = v;
  }
  return net;
}

SirenNet read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return read_checkpoint(in);
}

}  // namespace hjrl
