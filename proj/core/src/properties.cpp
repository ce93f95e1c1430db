#include "hjrl/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hjrl/error.hpp"

namespace hjrl {

namespace {

ScalarField random_field(const Grid2& grid, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(grid.size());
  for (double& x : v) {
    x = dist(rng);
  }
  return ScalarField(grid, std::move(v));
}

double sup_abs(const ScalarField& f) { return std::max(std::abs(f.min()), std::abs(f.max())); }

}  // namespace

std::vector<ContractionTrial> contraction_suite(const Grid2& grid, const ControlledDynamics& dyn,
                                                const TravelCost& cost,
                                                const std::vector<double>& lambdas,
                                                const std::vector<double>& sigmas, int trials,
                                                std::uint64_t seed) {
  std::vector<ContractionTrial> out;
  std::mt19937_64 rng(seed);
  for (double lambda : lambdas) {
    for (double sigma : sigmas) {
      const OneStepMdp mdp{dyn, cost, make_discount(lambda, sigma), make_horizon(1.0)};
      for (int t = 0; t < trials; ++t) {
        const ScalarField p1 = random_field(grid, rng, -2.0, 2.0);
        const ScalarField p2 = random_field(grid, rng, -2.0, 2.0);
        const ContractionProbe probe = contraction_probe(mdp, p1, p2);
        const double magnitude = std::max(sup_abs(p1), sup_abs(p2)) + mdp.step_cost_bound();
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() * magnitude;
        out.push_back({lambda, sigma, t, probe.lhs, probe.bound, slack,
                       probe.lhs <= probe.bound + slack});
      }
    }
  }
  return out;
}

std::vector<MonotoneTrial> monotonicity_suite(const Grid2& grid, const OneStepMdp& mdp, int trials,
                                              std::uint64_t seed) {
  std::vector<MonotoneTrial> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  // Some nodes get an exactly zero bump so ties are exercised too.
  std::bernoulli_distribution tie(0.25);
  const double tau = std::max(mdp.horizon.T, mdp.sigma());
  for (int t = 0; t < trials; ++t) {
    const ScalarField lower = random_field(grid, rng, -2.0, 2.0);
    std::vector<double> upper(lower.values().begin(), lower.values().end());
    for (double& v : upper) {
      v += tie(rng) ? 0.0 : bump(rng);
    }
    const ScalarField higher(grid, std::move(upper));
    const ScalarField t1 = mdp_sweep(mdp, lower, tau);
    const ScalarField t2 = mdp_sweep(mdp, higher, tau);
    MonotoneTrial trial{t, 0};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (t1[k] > t2[k]) {
        ++trial.violations;
      }
    }
    out.push_back(trial);
  }
  return out;
}

SmoothTestFn consistency_test_fn() { return affine_test_fn(-0.5, 0.3, 0.2, 0.4); }

std::vector<Probe> consistency_probes(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(1.5, 2.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> tau(0.5, 1.0);
  std::vector<Probe> probes;
  probes.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double r = radius(rng);
    const double a = angle(rng);
    probes.push_back({tau(rng), {r * std::cos(a), r * std::sin(a)}});
  }
  return probes;
}

ConsistencyOutcome residual_consistency_suite(const OneStepMdp& mdp,
                                              const std::vector<double>& sigmas, int probe_count,
                                              double lo, double hi, std::uint64_t seed) {
  require(sigmas.size() >= 2, "consistency suite needs at least two sigmas");
  ConsistencyOutcome out;
  out.sigmas = sigmas;
  const auto probes = consistency_probes(probe_count, seed);
  out.reports = consistency_study(mdp, consistency_test_fn(), probes, sigmas);

  const std::size_t np = probes.size();
  const std::size_t nr = sigmas.size() - 1;
  out.ratios.assign(np, std::vector<double>(nr, 0.0));
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t k = 0; k < nr; ++k) {
      const double prev = out.reports[k * np + p].gap;
      const double next = out.reports[(k + 1) * np + p].gap;
      out.ratios[p][k] = prev > 0.0 ? next / prev : std::numeric_limits<double>::quiet_NaN();
    }
  }
  auto in_range = [&](double r) { return r >= lo && r <= hi; };
  out.onset = nr;
  for (std::size_t k = nr; k-- > 0;) {
    bool all = true;
    for (std::size_t p = 0; p < np; ++p) {
      all = all && in_range(out.ratios[p][k]);
    }
    if (!all) {
      break;
    }
    out.onset = k;
  }
  out.ratio_min = std::numeric_limits<double>::infinity();
  out.ratio_max = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t k = out.onset; k < nr; ++k) {
      out.ratio_min = std::min(out.ratio_min, out.ratios[p][k]);
      out.ratio_max = std::max(out.ratio_max, out.ratios[p][k]);
    }
  }
  out.ok = out.onset < nr;
  return out;
}

Eigen::VectorXd finite_difference_gradient(const SirenNet& net, const State& x, double y,
                                           double step) {
  // Plain-loop forward pass, kept apart from the Eigen code being checked.
  // Perturbing one parameter only touches part of the network, so each
  // evaluation recomputes just the affected activations.
  const int w = net.width();
  const double w0 = net.omega0();
  const auto& p = net.params();
  const double z[2] = {(x[0] - net.input_offset[0]) * net.input_scale[0],
                       (x[1] - net.input_offset[1]) * net.input_scale[1]};
  const Eigen::Index o_b1 = 2 * w;
  const Eigen::Index o_w2 = 3 * w;
  const Eigen::Index o_b2 = 3 * w + w * w;
  const Eigen::Index o_w3 = 4 * w + w * w;
  const Eigen::Index o_b3 = 5 * w + w * w;
  auto W1 = [&](const Eigen::VectorXd& q, int i, int c) { return q[c * w + i]; };
  auto W2 = [&](const Eigen::VectorXd& q, int i, int k) { return q[o_w2 + k * w + i]; };

  auto hidden1 = [&](const Eigen::VectorXd& q, int i) {
    return std::sin(w0 * (W1(q, i, 0) * z[0] + W1(q, i, 1) * z[1] + q[o_b1 + i]));
  };
  auto hidden2 = [&](const Eigen::VectorXd& q, const std::vector<double>& h1, int i) {
    double s = q[o_b2 + i];
    for (int k = 0; k < w; ++k) {
      s += W2(q, i, k) * h1[k];
    }
    return std::sin(w0 * s);
  };
  auto output = [&](const Eigen::VectorXd& q, const std::vector<double>& h2) {
    double s = q[o_b3];
    for (int k = 0; k < w; ++k) {
      s += q[o_w3 + k] * h2[k];
    }
    return s;
  };

  std::vector<double> h1(w), h2(w);
  for (int i = 0; i < w; ++i) {
    h1[i] = hidden1(p, i);
  }
  for (int i = 0; i < w; ++i) {
    h2[i] = hidden2(p, h1, i);
  }

  Eigen::VectorXd q = p;
  auto loss_at = [&](Eigen::Index idx) {
    std::vector<double> a = h1;
    std::vector<double> b = h2;
    if (idx < o_w2) {
      const int i = static_cast<int>(idx < o_b1 ? idx % w : idx - o_b1);
      a[i] = hidden1(q, i);
      for (int m = 0; m < w; ++m) {
        b[m] = hidden2(q, a, m);
      }
    } else if (idx < o_w3) {
      const int i = static_cast<int>(idx < o_b2 ? (idx - o_w2) % w : idx - o_b2);
      b[i] = hidden2(q, a, i);
    }
    const double r = output(q, b) - y;
    return r * r;
  };

  Eigen::VectorXd grad(p.size());
  for (Eigen::Index idx = 0; idx < p.size(); ++idx) {
    const double orig = q[idx];
    q[idx] = orig + step;
    const double up = loss_at(idx);
    q[idx] = orig - step;
    const double down = loss_at(idx);
    q[idx] = orig;
    grad[idx] = (up - down) / (2.0 * step);
  }
  return grad;
}

std::vector<GradientTrial> gradient_suite(int nets, int probes_per_net, int width, double omega0,
                                          double fd_step, double floor, std::uint64_t seed) {
  std::vector<GradientTrial> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.5, 2.5);
  std::uniform_real_distribution<double> target(-1.0, 0.0);
  for (int n = 0; n < nets; ++n) {
    SirenNet net = make_siren(rng(), width, omega0);
    net.normalize_inputs_to(Grid2::square(2.5, 2));
    for (int k = 0; k < probes_per_net; ++k) {
      const State x{coord(rng), coord(rng)};
      const double y = target(rng);
      const Eigen::VectorXd exact = net_gradient(net, x, y);
      const Eigen::VectorXd approx = finite_difference_gradient(net, x, y, fd_step);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < exact.size(); ++i) {
        const double denom = std::max({std::abs(exact[i]), std::abs(approx[i]), floor});
        worst = std::max(worst, std::abs(exact[i] - approx[i]) / denom);
      }
      out.push_back({n, k, worst});
    }
  }
  return out;
}

}  // namespace hjrl
