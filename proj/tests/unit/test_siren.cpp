#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hjrl/backup.hpp"
#include "hjrl/error.hpp"
#include "hjrl/hjb_solver.hpp"
#include "hjrl/properties.hpp"
#include "hjrl/siren.hpp"
#include "hjrl/train.hpp"

using namespace hjrl;

namespace {

const Grid2 kRoi = Grid2::square(2.5, 201);
const ControlledDynamics kDyn = double_integrator(1.0);
const TravelCost kCost(1.0, 1.0);
const DiscountConfig kDisc = make_discount(1.0, 0.05);

SirenNet zero_net() {
  SirenNet net(100, 30.0);
  net.params().setZero();
  return net;
}

}  // namespace

TEST_CASE("forward examples") {
  SirenNet net = zero_net();
  CHECK(net_forward(net, {0.3, -1.2}) == 0.0);
  net.b3() = -0.25;
  CHECK(net_forward(net, {0.3, -1.2}) == -0.25);

  net.params()[7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(net_forward(net, {0.0, 0.0}), ContractViolation);
}

TEST_CASE("seed-0 golden values") {
  SirenNet net = make_siren(0);
  CHECK(net.parameter_count() == 2 * 100 + 100 + 100 * 100 + 100 + 100 + 1);
  CHECK(net_forward(net, {0.0, 0.0}) == doctest::Approx(-0.048271737912829224).epsilon(1e-12));
  net.normalize_inputs_to(kRoi);
  CHECK(net_forward(net, {0.5, -1.0}) == doctest::Approx(-0.033141316396506887).epsilon(1e-12));
  CHECK(make_siren(0) == make_siren(0));
  CHECK_FALSE(make_siren(0) == make_siren(1));
}

TEST_CASE("initialisation ranges") {
  const SirenNet net = make_siren(5);
  CHECK(net.w1().cwiseAbs().maxCoeff() <= 0.5);
  const double deep = std::sqrt(6.0 / 100.0) / 30.0;
  CHECK(net.w2().cwiseAbs().maxCoeff() <= deep);
  CHECK(net.w3().cwiseAbs().maxCoeff() <= deep);
  CHECK(net.b1().cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(2.0));
  CHECK(net.b2().cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("batched forward matches single evaluations") {
  SirenNet net = make_siren(2);
  net.normalize_inputs_to(kRoi);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  Eigen::Matrix2Xd in(2, 64);
  for (Eigen::Index k = 0; k < in.cols(); ++k) {
    in(0, k) = u(rng);
    in(1, k) = u(rng);
  }
  const Eigen::RowVectorXd y = net_forward_batch(net, in);
  for (Eigen::Index k = 0; k < in.cols(); ++k) {
    CHECK(y[k] == doctest::Approx(net_forward(net, {in(0, k), in(1, k)})).epsilon(1e-13));
  }
}

TEST_CASE("gradient examples") {
  const SirenNet zero = zero_net();
  CHECK(net_gradient(zero, {0.4, 0.1}, 0.0).cwiseAbs().maxCoeff() == 0.0);

  SirenNet net = make_siren(9);
  net.normalize_inputs_to(kRoi);
  const State x{0.7, -0.2};
  const double out = net_forward(net, x);
  const Eigen::VectorXd g1 = net_gradient(net, x, out - 0.125);
  const Eigen::VectorXd g2 = net_gradient(net, x, out - 0.25);
  // Output bias and output weights: d/dtheta (r^2) = 2 r * (1 or h2).
  const Eigen::Index head = net.parameter_count() - 101;
  for (Eigen::Index i = head; i < net.parameter_count(); ++i) {
    CHECK(g2[i] == doctest::Approx(2.0 * g1[i]).epsilon(1e-12));
  }

  // Step 1e-5 central differences on a few nets.
  const auto trials = gradient_suite(3, 2, 100, 30.0, 1e-5, 1e-4, 17);
  for (const auto& t : trials) {
    CHECK(t.max_rel_error <= 1e-5);
  }
}

TEST_CASE("batch loss gradient is the mean of per-sample gradients") {
  SirenNet net = make_siren(4);
  net.normalize_inputs_to(kRoi);
  Eigen::Matrix2Xd in(2, 3);
  in << 0.1, -1.0, 2.0, 0.5, 1.5, -2.2;
  Eigen::RowVectorXd y(3);
  y << -0.5, -0.1, -0.9;
  const BatchLoss bl = batch_loss_gradient(net, in, y);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(net.parameter_count());
  double loss = 0.0;
  for (int k = 0; k < 3; ++k) {
    mean += net_gradient(net, {in(0, k), in(1, k)}, y[k]) / 3.0;
    const double r = net_forward(net, {in(0, k), in(1, k)}) - y[k];
    loss += r * r / 3.0;
  }
  CHECK(bl.loss == doctest::Approx(loss).epsilon(1e-12));
  CHECK((bl.gradient - mean).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + mean.cwiseAbs().maxCoeff()));
  CHECK_THROWS_AS(batch_loss_gradient(net, in, Eigen::RowVectorXd::Zero(2)), ContractViolation);
}

TEST_CASE("td_target examples") {
  SirenNet net = zero_net();
  CHECK(td_target(net, {2.0, 0.0}, kCost, kDyn, kDisc, kRoi) == 0.0);
  CHECK(td_target(net, {0.0, 0.0}, kCost, kDyn, kDisc, kRoi) ==
        doctest::Approx(-(1.0 - std::exp(-0.05)) * 0.975).epsilon(1e-14));

  net.b3() = -0.4;
  CHECK(td_target(net, {2.0, 0.0}, kCost, kDyn, kDisc, kRoi) ==
        doctest::Approx(kDisc.gamma * -0.4).epsilon(1e-15));
  CHECK(td_target(net, {0.0, 0.0}, kCost, kDyn, kDisc, kRoi) ==
        doctest::Approx(kDisc.gamma * -0.4 + kDisc.weight * -0.975).epsilon(1e-14));

  // Targets are clamped into the value range.
  net.b3() = -5.0;
  CHECK(td_target(net, {2.0, 0.0}, kCost, kDyn, kDisc, kRoi) == -1.0);
  net.b3() = 3.0;
  CHECK(td_target(net, {2.0, 0.0}, kCost, kDyn, kDisc, kRoi) == 0.0);
}

TEST_CASE("batched td targets match single targets") {
  SirenNet net = make_siren(6);
  net.normalize_inputs_to(kRoi);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  Eigen::Matrix2Xd in(2, 100);
  for (Eigen::Index k = 0; k < in.cols(); ++k) {
    in(0, k) = u(rng);
    in(1, k) = u(rng);
  }
  const Eigen::RowVectorXd t = td_targets(net, in, kCost, kDyn, kDisc, kRoi);
  for (Eigen::Index k = 0; k < in.cols(); ++k) {
    CHECK(t[k] == doctest::Approx(td_target(net, {in(0, k), in(1, k)}, kCost, kDyn, kDisc, kRoi))
                       .epsilon(1e-13));
  }
}

TEST_CASE("td target formula equals the grid backup with an interpolating continuation") {
  SweepConfig cfg;
  cfg.disc = kDisc;
  const Grid2 g = Grid2::square(2.5, 81);
  const ScalarField v = solve_stationary(cfg, kDyn, kCost, g).field;
  const ScalarField grid_backup = sl_backup(v, cfg, kDyn, kCost);
  const ValueRange range = value_range(kCost, kDisc);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double viaTd = std::clamp(
        backup_at(kDyn, kCost, kDisc, g.node(n),
                  [&](const State& s) { return interpolate(v, g.clamp(s)); })
            .value,
        range.lo, range.hi);
    REQUIRE(viaTd == std::clamp(grid_backup[n], range.lo, range.hi));
  }
}

TEST_CASE("checkpoint round trip") {
  SirenNet net = make_siren(11, 16, 30.0);
  net.normalize_inputs_to(Grid2(-1.0, 3.0, -2.0, 0.5, 5, 5));
  std::stringstream ss;
  write_checkpoint(net, ss);
  const SirenNet back = read_checkpoint(ss);
  CHECK(back == net);
  for (const State x : {State{0.0, 0.0}, State{1.3, -0.7}, State{-4.0, 2.0}}) {
    CHECK(net_forward(back, x) == net_forward(net, x));
  }

  std::stringstream bad("SIREN v1\n16 30\n0 0 1 1\n5\n1\n2\n");
  CHECK_THROWS_AS(read_checkpoint(bad), ParseError);
  std::stringstream header("SIREN v0\n");
  CHECK_THROWS_AS(read_checkpoint(header), ParseError);
}

TEST_CASE("predict_field evaluates every node") {
  SirenNet net = make_siren(1, 20, 30.0);
  net.normalize_inputs_to(kRoi);
  const Grid2 g = Grid2::square(2.5, 11);
  const ScalarField f = predict_field(net, g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(f[n] == doctest::Approx(net_forward(net, g.node(n))).epsilon(1e-13));
  }
}

TEST_CASE("training is deterministic") {
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.width = 32;
  cfg.batch_size = 64;
  cfg.probe_every = 100;
  cfg.probe_count = 128;
  cfg.seed = 42;
  const TrainResult a = train(cfg, kCost, kDyn, kDisc, kRoi);
  const TrainResult b = train(cfg, kCost, kDyn, kDisc, kRoi);
  CHECK(a.net == b.net);
  CHECK(a.log.loss == b.log.loss);
  CHECK(a.log.probe_residual == b.log.probe_residual);
  CHECK(a.log.loss.size() == 300);
  CHECK(a.log.probe_steps.size() == 3);
  cfg.seed = 43;
  CHECK_FALSE(train(cfg, kCost, kDyn, kDisc, kRoi).net == a.net);
}

TEST_CASE("training with zero cost learns the zero value") {
  TrainConfig cfg;
  cfg.steps = 3000;
  cfg.optimizer = Optimizer::Adam;
  cfg.learning_rate = 1e-3;
  cfg.width = 32;
  cfg.probe_every = 1000;
  cfg.probe_count = 256;
  const TravelCost flat(1.0, 0.0);
  const TrainResult r = train(cfg, flat, kDyn, kDisc, kRoi);
  const ScalarField pred = predict_field(r.net, Grid2::square(2.5, 51));
  MESSAGE("largest |V|: " << std::max(std::abs(pred.min()), std::abs(pred.max())));
  CHECK(std::max(std::abs(pred.min()), std::abs(pred.max())) <= 1e-3);
}

TEST_CASE("training contract") {
  TrainConfig cfg;
  CHECK_THROWS_AS(train(cfg, kCost, kDyn, make_discount(0.0, 0.05), kRoi), ContractViolation);
  CHECK(parse_optimizer("sgd") == Optimizer::Sgd);
  CHECK(parse_optimizer("adam") == Optimizer::Adam);
  CHECK(to_string(Optimizer::Adam) == "adam");
  CHECK_THROWS(parse_optimizer("rmsprop"));
}
