#include <doctest.h>

#include <cmath>
#include <random>

#include "hjrl/error.hpp"
#include "hjrl/hjb_solver.hpp"

using namespace hjrl;

namespace {

const ControlledDynamics kDyn = double_integrator(1.0);
const TravelCost kCost(1.0, 1.0);

SweepConfig sweep(double rate = 1.0, double dt = 0.05) {
  SweepConfig c;
  c.disc = make_discount(rate, dt);
  return c;
}

ScalarField random_field(const Grid2& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(g.size());
  for (auto& x : v) {
    x = d(rng);
  }
  return ScalarField(g, std::move(v));
}

}  // namespace

TEST_CASE("sl_backup examples") {
  const Grid2 g = Grid2::square(2.5, 201);
  const auto cfg = sweep();
  const ScalarField zero = ScalarField::filled(g, 0.0);
  const ScalarField once = sl_backup(zero, cfg, kDyn, kCost);

  // Node (2, 0): both half-steps stay off the target.
  CHECK(once.at(180, 100) == 0.0);

  // Origin: midpoint (0, +-0.025), h = -0.975, continuation zero.
  const double hand = -(1.0 - std::exp(-0.05)) * 0.975;
  CHECK(once.at(100, 100) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(once.at(100, 100) == doctest::Approx(-0.047552).epsilon(1e-5));

  // Constant continuation off target with interior successors.
  const double c = -0.37;
  const ScalarField cst = sl_backup(ScalarField::filled(g, c), cfg, kDyn, kCost);
  CHECK(cst.at(180, 100) == doctest::Approx(cfg.disc.gamma * c).epsilon(1e-15));
  CHECK(cst.at(20, 150) == doctest::Approx(cfg.disc.gamma * c).epsilon(1e-15));
}

TEST_CASE("sl_backup contraction, monotonicity and constant shift") {
  const Grid2 g = Grid2::square(2.5, 41);
  std::mt19937_64 rng(21);
  for (double rate : {0.5, 1.0, 2.0}) {
    const auto cfg = sweep(rate, 0.05);
    for (int t = 0; t < 10; ++t) {
      const ScalarField a = random_field(g, rng, -2.0, 2.0);
      const ScalarField b = random_field(g, rng, -2.0, 2.0);
      const double lhs = sup_distance(sl_backup(a, cfg, kDyn, kCost), sl_backup(b, cfg, kDyn, kCost));
      const double bound = cfg.disc.gamma * sup_distance(a, b);
      CHECK(lhs <= bound + 8.0 * std::numeric_limits<double>::epsilon() * 4.0);

      std::vector<double> hi(a.values().begin(), a.values().end());
      for (auto& v : hi) {
        v += (rng() % 4 == 0) ? 0.0 : 0.5 * std::generate_canonical<double, 53>(rng);
      }
      const ScalarField ta = sl_backup(a, cfg, kDyn, kCost);
      const ScalarField tb = sl_backup(ScalarField(g, hi), cfg, kDyn, kCost);
      for (std::size_t n = 0; n < g.size(); ++n) {
        REQUIRE(ta[n] <= tb[n]);
      }

      const double c = -0.75;
      std::vector<double> shifted(a.values().begin(), a.values().end());
      for (auto& v : shifted) {
        v += c;
      }
      const ScalarField ts = sl_backup(ScalarField(g, shifted), cfg, kDyn, kCost);
      double worst = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n) {
        worst = std::max(worst, std::abs(ts[n] - (ta[n] + cfg.disc.gamma * c)));
      }
      // Exact in real arithmetic; the shift passes through a few rounded operations.
      CHECK(worst <= 16.0 * std::numeric_limits<double>::epsilon() * 4.0);
    }
  }
}

TEST_CASE("solve_stationary benchmark") {
  const Grid2 g = Grid2::square(2.5, 201);
  const auto cfg = sweep();
  const ValueSolution s = solve_stationary(cfg, kDyn, kCost, g);
  REQUIRE(s.converged);
  CHECK(s.final_delta <= cfg.tol);
  CHECK(s.iterations == static_cast<int>(s.deltas.size()));
  CHECK(s.field.min() >= -1.0 - cfg.tol);
  CHECK(s.field.max() <= cfg.tol);
  CHECK(s.field.at(100, 100) < -cfg.tol);

  for (std::size_t k = 1; k + 1 < s.deltas.size(); ++k) {
    REQUIRE(s.deltas[k + 1] <= cfg.disc.gamma * s.deltas[k] + 1e-12);
  }

  // Fixed-point residual.
  CHECK(sup_distance(sl_backup(s.field, cfg, kDyn, kCost), s.field) <= cfg.tol);

  // Independent of the seed up to the a priori bound.
  const ValueSolution t = solve_stationary(cfg, kDyn, kCost, ScalarField::filled(g, -0.5));
  REQUIRE(t.converged);
  const double bound = 2.0 * cfg.tol / (1.0 - std::exp(-0.05));
  CHECK(bound == doctest::Approx(4.1008e-5).epsilon(1e-4));
  CHECK(sup_distance(s.field, t.field) <= bound);
}

TEST_CASE("solve_stationary edge cases") {
  const Grid2 g = Grid2::square(2.5, 51);
  const ValueSolution z = solve_stationary(sweep(), kDyn, TravelCost(1.0, 0.0), g);
  CHECK(z.converged);
  CHECK(z.iterations == 1);
  CHECK(z.field == ScalarField::filled(g, 0.0));

  CHECK_THROWS_AS(solve_stationary(sweep(0.0), kDyn, kCost, g), ContractViolation);

  SweepConfig capped = sweep();
  capped.max_iters = 3;
  const ValueSolution c = solve_stationary(capped, kDyn, kCost, g);
  CHECK_FALSE(c.converged);
  CHECK(c.iterations == 3);
}

TEST_CASE("finite-horizon travel cost") {
  const Grid2 g = Grid2::square(2.5, 201);
  const auto cfg = sweep(1.0);

  const auto k0 = solve_travel_finite_horizon(cfg, kDyn, kCost, g, Horizon{0.0, true});
  REQUIRE(k0.slices.size() == 1);
  CHECK(k0.slices[0] == ScalarField::filled(g, 0.0));

  const auto k1 = solve_travel_finite_horizon(cfg, kDyn, kCost, g, make_horizon(0.05));
  REQUIRE(k1.slices.size() == 2);
  CHECK(k1.slices[1] == sl_backup(k1.slices[0], cfg, kDyn, kCost));
  CHECK(k1.slices[1].at(100, 100) ==
        doctest::Approx(-(1.0 - std::exp(-0.05)) * 0.975).epsilon(1e-14));
  CHECK(k1.slices[1].at(180, 100) == 0.0);
  CHECK(k1.slices[1].at(0, 0) == 0.0);

  CHECK_THROWS_AS(solve_travel_finite_horizon(cfg, kDyn, kCost, g, make_horizon(0.07)),
                  ContractViolation);

  // Undiscounted travel cost: weight is dt and values stay nonpositive.
  const auto u = solve_travel_finite_horizon(sweep(0.0), kDyn, kCost, Grid2::square(2.5, 51),
                                             make_horizon(1.0));
  CHECK(u.slices.size() == 21);
  CHECK(u.slices[1].at(25, 25) == doctest::Approx(-0.05 * 0.975).epsilon(1e-14));
  for (const auto& s : u.slices) {
    CHECK(s.max() <= 0.0);
  }
}

TEST_CASE("minimum-over-time reach baseline") {
  const Grid2 g = Grid2::square(2.5, 51);
  const auto l = target_signed_distance(kCost);
  const auto k0 = solve_reach_min_over_time(kDyn, g, Horizon{0.0, true}, 0.05, l);
  REQUIRE(k0.slices.size() == 1);
  CHECK(k0.slices[0] == ScalarField::sample(g, l));

  const auto u = solve_reach_min_over_time(kDyn, g, make_horizon(1.0), 0.05, l);
  REQUIRE(u.slices.size() == 21);
  for (std::size_t k = 0; k + 1 < u.slices.size(); ++k) {
    for (std::size_t n = 0; n < g.size(); ++n) {
      REQUIRE(u.slices[k + 1][n] <= u.slices[k][n]);
    }
  }
  for (std::size_t n = 0; n < g.size(); ++n) {
    const State x = g.node(n);
    if (l(x) < 0.0) {
      // Successors heading deeper into the disk can only lower the value.
      for (const auto& s : u.slices) {
        REQUIRE(s[n] <= l(x));
      }
    }
  }
}
