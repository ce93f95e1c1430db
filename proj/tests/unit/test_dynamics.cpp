#include <doctest.h>

#include <random>
#include <vector>

#include "hjrl/dynamics.hpp"
#include "hjrl/error.hpp"

using namespace hjrl;

TEST_CASE("bang-bang control set") {
  const ControlSet set = ControlSet::bang_bang(1.5);
  REQUIRE(set.size() == 2);
  CHECK(set[0] == -1.5);
  CHECK(set[1] == 1.5);
  CHECK(set.contains(1.5));
  CHECK_FALSE(set.contains(0.0));
  CHECK_THROWS_AS(ControlSet(std::vector<Control>{}), ContractViolation);
  CHECK_THROWS_AS(ControlSet::bang_bang(0.0), ContractViolation);
}

TEST_CASE("eval_field on the double integrator") {
  const auto dyn = double_integrator(1.0);
  const std::vector<double> origin{0.0, 0.0};
  const std::vector<double> x{3.0, -2.0};
  CHECK(eval_field(dyn, origin, 1.0) == State{0.0, 1.0});
  CHECK(eval_field(dyn, x, -1.0) == State{-2.0, -1.0});

  const std::vector<double> y{0.0, 1.0};
  CHECK_THROWS_AS(eval_field(dyn, y, 0.0), ContractViolation);

  const std::vector<double> three{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(eval_field(dyn, three, 1.0), ContractViolation);
}

TEST_CASE("flow_step schemes") {
  const auto dyn2 = double_integrator(2.0);
  const auto dyn1 = double_integrator(1.0);
  const FlowStep euler{FlowScheme::ExplicitEuler, 0.05};
  const FlowStep mid{FlowScheme::Midpoint, 0.05};

  CHECK(flow_step(dyn2, euler, {0.0, 0.0}, 2.0) == State{0.0, 0.05 * 2.0});
  CHECK(flow_step(dyn1, euler, {0.0, 1.0}, 1.0) == State{0.05, 1.05});
  CHECK(flow_step(dyn1, mid, {0.0, 0.0}, 1.0) == State{0.0, 0.025});

  CHECK_THROWS_AS(flow_step(dyn1, FlowStep{FlowScheme::ExplicitEuler, 0.0}, {0.0, 0.0}, 1.0),
                  ContractViolation);
  CHECK_THROWS_AS(flow_step(dyn1, FlowStep{FlowScheme::Midpoint, -0.1}, {0.0, 0.0}, 1.0),
                  ContractViolation);
}

TEST_CASE("rollout") {
  const auto dyn = double_integrator(1.0);
  const FlowStep euler{FlowScheme::ExplicitEuler, 0.05};

  const std::vector<Control> up{1.0, 1.0};
  const auto a = rollout(dyn, euler, {0.0, 0.0}, up);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == State{0.0, 0.0});
  CHECK(a[1] == State{0.0, 0.05});
  CHECK(a[2][0] == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(a[2][1] == doctest::Approx(0.1).epsilon(1e-15));

  const std::vector<Control> updown{1.0, -1.0};
  const auto b = rollout(dyn, euler, {0.0, 0.0}, updown);
  CHECK(b[2][0] == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(b[2][1] == 0.0);

  CHECK_THROWS_AS(rollout(dyn, euler, {1.0, 0.0}, std::vector<Control>{}), ContractViolation);
}

TEST_CASE("rollout is bitwise deterministic") {
  const auto dyn = double_integrator(1.0);
  const FlowStep euler{FlowScheme::ExplicitEuler, 0.037};
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.5);
  std::vector<Control> controls(200);
  for (auto& u : controls) {
    u = coin(rng) ? 1.0 : -1.0;
  }
  const auto a = rollout(dyn, euler, {0.3, -0.2}, controls);
  const auto b = rollout(dyn, euler, {0.3, -0.2}, controls);
  CHECK(a == b);
}

TEST_CASE("Euler step is x + dt f(x,u) exactly") {
  const auto dyn = double_integrator(1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> step(1e-3, 0.2);
  for (int k = 0; k < 1000; ++k) {
    const State x{coord(rng), coord(rng)};
    const double dt = step(rng);
    const Control u = k % 2 ? 1.0 : -1.0;
    const State f = dyn(x, u);
    const State y = flow_step(dyn, FlowStep{FlowScheme::ExplicitEuler, dt}, x, u);
    CHECK(y[0] == x[0] + dt * f[0]);
    CHECK(y[1] == x[1] + dt * f[1]);
  }
}

TEST_CASE("two half steps differ from one Euler step by dt^2/4 u in x1 only") {
  const auto dyn = double_integrator(1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const State x{coord(rng), coord(rng)};
    const double dt = 0.05;
    const Control u = k % 2 ? 1.0 : -1.0;
    const FlowStep full{FlowScheme::ExplicitEuler, dt};
    const FlowStep half{FlowScheme::ExplicitEuler, dt / 2};
    const State one = flow_step(dyn, full, x, u);
    const State two = flow_step(dyn, half, flow_step(dyn, half, x, u), u);
    CHECK(two[0] - one[0] == doctest::Approx(dt * dt / 4 * u).epsilon(1e-9));
    CHECK(two[1] == doctest::Approx(one[1]).epsilon(1e-15));
  }
}

TEST_CASE("double integrator constants") {
  const auto dyn = double_integrator(1.0, 2.5);
  CHECK(dyn.lipschitz_const_x() == 1.0);
  CHECK(dyn.speed_bound_on_roi() == doctest::Approx(std::hypot(2.5, 1.0)));
}
