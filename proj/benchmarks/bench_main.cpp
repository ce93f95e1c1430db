#include <benchmark/benchmark.h>

#include <random>

#include "hjrl/hjb_solver.hpp"
#include "hjrl/reachability.hpp"
#include "hjrl/siren.hpp"

using namespace hjrl;

namespace {

const ControlledDynamics kDyn = double_integrator(1.0);
const TravelCost kCost(1.0, 1.0);

ScalarField random_field(const Grid2& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 0.0);
  std::vector<double> v(g.size());
  for (auto& x : v) {
    x = d(rng);
  }
  return ScalarField(g, std::move(v));
}

Eigen::Matrix2Xd random_states(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-2.5, 2.5);
  Eigen::Matrix2Xd x(2, n);
  for (int k = 0; k < n; ++k) {
    x(0, k) = d(rng);
    x(1, k) = d(rng);
  }
  return x;
}

}  // namespace

static void BM_Interpolate(benchmark::State& state) {
  const ScalarField f = random_field(Grid2::square(2.5, 201), 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-2.6, 2.6);
  std::vector<State> q(4096);
  for (auto& p : q) {
    p = {d(rng), d(rng)};
  }
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interpolate(f, q[k++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Interpolate);

static void BM_SlBackup(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScalarField v = random_field(Grid2::square(2.5, n), 3);
  const SweepConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sl_backup(v, cfg, kDyn, kCost));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_SlBackup)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_SirenForwardBatch(benchmark::State& state) {
  const SirenNet net = make_siren(0);
  const Eigen::Matrix2Xd x = random_states(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net_forward_batch(net, x));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SirenForwardBatch)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);

static void BM_SirenBatchGradient(benchmark::State& state) {
  const SirenNet net = make_siren(0);
  const Eigen::Matrix2Xd x = random_states(256, 5);
  const Eigen::RowVectorXd y = Eigen::RowVectorXd::Constant(256, -0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_loss_gradient(net, x, y));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_SirenBatchGradient)->Unit(benchmark::kMicrosecond);

static void BM_TdTargets(benchmark::State& state) {
  const SirenNet net = make_siren(0);
  const Eigen::Matrix2Xd x = random_states(256, 6);
  const DiscountConfig disc = make_discount(1.0, 0.05);
  const Grid2 roi = Grid2::square(2.5, 201);
  for (auto _ : state) {
    benchmark::DoNotOptimize(td_targets(net, x, kCost, kDyn, disc, roi));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_TdTargets)->Unit(benchmark::kMicrosecond);

static void BM_OracleMask(benchmark::State& state) {
  const Grid2 g = Grid2::square(10.0, 51);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_mask(g, kCost, OracleConfig{20, 0.05, 2}, kDyn));
  }
}
BENCHMARK(BM_OracleMask)->Unit(benchmark::kMillisecond);

static void BM_TravelFiniteHorizon(benchmark::State& state) {
  const Grid2 g = Grid2::square(10.0, 501);
  SweepConfig cfg;
  cfg.disc = make_discount(0.0, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_travel_finite_horizon(cfg, kDyn, kCost, g, make_horizon(1.0)));
  }
}
BENCHMARK(BM_TravelFiniteHorizon)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
