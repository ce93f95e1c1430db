#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hjrl/error.hpp"
#include "hjrl/grid.hpp"

using namespace hjrl;

namespace {

double ulp_of(double v) {
  return std::nextafter(std::abs(v), std::numeric_limits<double>::infinity()) - std::abs(v);
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

TEST_CASE("grid geometry") {
  const Grid2 g = Grid2::square(2.5, 201);
  CHECK(g.dx() == 5.0 / 200.0);
  CHECK(g.x_at(0) == -2.5);
  CHECK(g.x_at(200) == 2.5);
  CHECK(g.y_at(200) == 2.5);
  CHECK(g.x_at(100) == 0.0);
  CHECK(g.node(g.index(3, 7)) == g.node(3, 7));
  CHECK_THROWS_AS(Grid2(0, 1, 0, 1, 1, 5), ContractViolation);
  CHECK_THROWS_AS(Grid2(1, 0, 0, 1, 5, 5), ContractViolation);
}

TEST_CASE("field rejects non-finite values") {
  const Grid2 g = Grid2::square(1.0, 3);
  std::vector<double> v(9, 0.0);
  v[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(g, v), ContractViolation);
  v[4] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ScalarField(g, v), ContractViolation);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(8, 0.0)), ContractViolation);
}

TEST_CASE("interpolate examples") {
  const Grid2 g(0.0, 1.0, 0.0, 1.0, 2, 2);
  const ScalarField f(g, {0.0, 1.0, 1.0, 2.0});
  CHECK(interpolate(f, {0.5, 0.5}) == 1.0);

  std::mt19937_64 rng(11);
  const Grid2 big = Grid2::square(2.5, 41);
  const ScalarField r = random_field(big, rng, -1.0, 1.0);
  for (std::size_t j = 0; j < big.ny(); j += 3) {
    for (std::size_t i = 0; i < big.nx(); i += 3) {
      CHECK(interpolate(r, big.node(i, j)) == r[j * big.nx() + i]);
    }
  }
  for (double y : {-2.5, -1.3, 0.0, 0.77, 2.5}) {
    CHECK(interpolate(r, {big.x_max() + 5.0, y}) == interpolate(r, {big.x_max(), y}));
    CHECK(interpolate(r, {big.x_min() - 1e3, y}) == interpolate(r, {big.x_min(), y}));
    CHECK(interpolate(r, {y, big.y_max() + 0.1}) == interpolate(r, {y, big.y_max()}));
  }
}

TEST_CASE("interpolation is exact on affine functions") {
  const Grid2 g(-2.0, 3.0, -1.0, 4.0, 37, 53);
  const double a = 0.3, b = -1.7, c = 0.45;
  auto f = [&](const State& p) { return a + b * p[0] + c * p[1]; };
  const ScalarField field = ScalarField::sample(g, f);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(g.x_min(), g.x_max()), uy(g.y_min(), g.y_max());
  for (int n = 0; n < 1000; ++n) {
    const State p{ux(rng), uy(rng)};
    const double exact = f(p);
    // Node sampling itself rounds, so measure against the scale of the terms.
    const double scale = std::abs(a) + std::abs(b * p[0]) + std::abs(c * p[1]);
    CHECK(std::abs(interpolate(field, p) - exact) <= 8.0 * ulp_of(scale));
  }
}

TEST_CASE("interpolation is monotone and does not overshoot") {
  std::mt19937_64 rng(7);
  const Grid2 g = Grid2::square(1.0, 17);
  std::uniform_real_distribution<double> u(-1.3, 1.3), bump(0.0, 0.5);
  for (int t = 0; t < 20; ++t) {
    const ScalarField a = random_field(g, rng, -2.0, 2.0);
    std::vector<double> bv(a.values().begin(), a.values().end());
    for (auto& v : bv) {
      v += (rng() % 4 == 0) ? 0.0 : bump(rng);
    }
    const ScalarField b(g, bv);
    for (int n = 0; n < 500; ++n) {
      const State p{u(rng), u(rng)};
      const double va = interpolate(a, p);
      CHECK(va <= interpolate(b, p));
      const State q = g.clamp(p);
      const auto i = std::min<std::size_t>(static_cast<std::size_t>((q[0] - g.x_min()) / g.dx()),
                                           g.nx() - 2);
      const auto j = std::min<std::size_t>(static_cast<std::size_t>((q[1] - g.y_min()) / g.dy()),
                                           g.ny() - 2);
      const double s[4] = {a.at(i, j), a.at(i + 1, j), a.at(i, j + 1), a.at(i + 1, j + 1)};
      CHECK(va >= *std::min_element(s, s + 4));
      CHECK(va <= *std::max_element(s, s + 4));
    }
  }
}

TEST_CASE("clamped queries are constant along outward normals") {
  std::mt19937_64 rng(9);
  const Grid2 g = Grid2::square(1.0, 9);
  const ScalarField f = random_field(g, rng, -1.0, 1.0);
  for (double t : {0.0, 0.1, 1.0, 10.0}) {
    CHECK(interpolate(f, {1.0 + t, 0.3}) == interpolate(f, {1.0, 0.3}));
    CHECK(interpolate(f, {-0.2, -1.0 - t}) == interpolate(f, {-0.2, -1.0}));
  }
}

TEST_CASE("sup_diff") {
  const Grid2 g = Grid2::square(2.5, 201);
  const ScalarField a = ScalarField::filled(g, -0.25);
  const auto same = sup_diff(a, a);
  CHECK(same.max_abs == 0.0);
  CHECK(same.mean_abs == 0.0);

  std::vector<double> v(a.values().begin(), a.values().end());
  v[g.index(17, 42)] += 0.5;
  const auto one = sup_diff(a, ScalarField(g, v));
  CHECK(one.max_abs == 0.5);
  CHECK(one.mean_abs == doctest::Approx(0.5 / 40401.0).epsilon(1e-12));
  CHECK(one.argmax_i == 17);
  CHECK(one.argmax_j == 42);
  CHECK(one.max_abs >= one.mean_abs);

  CHECK_THROWS_AS(sup_diff(a, ScalarField::filled(Grid2::square(2.5, 11), 0.0)),
                  ContractViolation);
}

TEST_CASE("clamp_field") {
  const Grid2 g = Grid2::square(1.0, 5);
  CHECK(clamp_field(ScalarField::filled(g, -5.0), -1.0, 0.0) == ScalarField::filled(g, -1.0));
  CHECK(clamp_field(ScalarField::filled(g, -0.3), -1.0, 0.0) == ScalarField::filled(g, -0.3));
  std::vector<double> v(g.size(), -0.5);
  v[3] = 0.2;
  const ScalarField c = clamp_field(ScalarField(g, v), -1.0, 0.0);
  CHECK(c[3] == 0.0);
  CHECK(c[4] == -0.5);
  CHECK_THROWS_AS(clamp_field(c, 1.0, 0.0), ContractViolation);
}

TEST_CASE("field file round trip and errors") {
  std::mt19937_64 rng(1);
  const Grid2 g(-1.25, 3.5, 0.1, 0.7, 5, 5);
  const ScalarField f = random_field(g, rng, -1e3, 1e3);
  std::stringstream ss;
  write_field(f, ss);
  CHECK(read_field(ss) == f);

  std::stringstream bad_count("FIELD v1\n2 2 0 1 0 1\n1\n2\n3\n");
  CHECK_THROWS_AS(read_field(bad_count), ParseError);

  std::stringstream nan_token("FIELD v1\n2 2 0 1 0 1\n1\nnan\n3\n4\n");
  try {
    read_field(nan_token);
    FAIL("NaN accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }

  std::stringstream bad_header("FIELD v2\n2 2 0 1 0 1\n1\n2\n3\n4\n");
  CHECK_THROWS_AS(read_field(bad_header), ParseError);
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int n = 0; n < 1000; ++n) {
    const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("subsample reads coincident nodes") {
  std::mt19937_64 rng(4);
  const Grid2 fine = Grid2::square(10.0, 501);
  const Grid2 coarse = Grid2::square(10.0, 51);
  const ScalarField f = random_field(fine, rng, -1.0, 1.0);
  const ScalarField c = subsample(f, coarse);
  for (std::size_t j = 0; j < 51; ++j) {
    for (std::size_t i = 0; i < 51; ++i) {
      CHECK(c.at(i, j) == f.at(10 * i, 10 * j));
      CHECK(coarse.node(i, j) == fine.node(10 * i, 10 * j));
    }
  }
  CHECK(subsample(f, fine) == f);
  CHECK_THROWS_AS(subsample(f, Grid2::square(10.0, 50)), ContractViolation);
  CHECK_THROWS_AS(subsample(f, Grid2::square(9.0, 51)), ContractViolation);
}
