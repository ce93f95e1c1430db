#include "hjrl/bellman_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjrl/error.hpp"
#include "hjrl/parallel.hpp"

namespace hjrl {

namespace {

void require_step(const OneStepMdp& mdp, double tau) {
  // Relative slack so tau = k * sigma built by repeated addition still passes.
  require(tau >= mdp.sigma() * (1.0 - 1e-12), "backup needs tau >= sigma");
}

}  // namespace

SmoothTestFn affine_test_fn(double c0, double c_tau, double c1, double c2) {
  return {
      [=](double tau, const State& x) { return c0 + c_tau * tau + c1 * x[0] + c2 * x[1]; },
      [=](double, const State&) { return State{c1, c2}; },
      [=](double, const State&) { return c_tau; },
  };
}

double derivative_self_check(const SmoothTestFn& phi,
                             const std::vector<std::pair<double, State>>& probes, double step) {
  double worst = 0.0;
  auto rel = [](double exact, double approx) {
    return std::abs(exact - approx) / std::max({std::abs(exact), std::abs(approx), 1e-8});
  };
  for (const auto& [tau, x] : probes) {
    const double ft = (phi.eval(tau + step, x) - phi.eval(tau - step, x)) / (2.0 * step);
    const State g = phi.grad_x(tau, x);
    const double f1 =
        (phi.eval(tau, {x[0] + step, x[1]}) - phi.eval(tau, {x[0] - step, x[1]})) / (2.0 * step);
    const double f2 =
        (phi.eval(tau, {x[0], x[1] + step}) - phi.eval(tau, {x[0], x[1] - step})) / (2.0 * step);
    worst = std::max({worst, rel(phi.dtau(tau, x), ft), rel(g[0], f1), rel(g[1], f2)});
  }
  return worst;
}

MdpBackup mdp_backup(const OneStepMdp& mdp, const ScalarField& continuation, double tau,
                     const State& x) {
  require_step(mdp, tau);
  const auto choice = backup_at(mdp.dyn, mdp.cost, mdp.disc, x,
                                [&](const State& s) { return interpolate(continuation, s); });
  return {choice.value, mdp.dyn.controls()[choice.action], choice.action};
}

MdpBackup mdp_backup(const OneStepMdp& mdp, const SmoothTestFn& phi, double tau, const State& x) {
  require_step(mdp, tau);
  const double prev = tau - mdp.sigma();
  const auto choice = backup_at(mdp.dyn, mdp.cost, mdp.disc, x,
                                [&](const State& s) { return phi.eval(prev, s); });
  return {choice.value, mdp.dyn.controls()[choice.action], choice.action};
}

ScalarField mdp_sweep(const OneStepMdp& mdp, const ScalarField& continuation, double tau) {
  const Grid2& g = continuation.grid();
  std::vector<double> out(g.size());
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      out[k] = mdp_backup(mdp, continuation, tau, g.node(k)).value;
    }
  });
  return ScalarField(g, std::move(out));
}

ContractionProbe contraction_probe(const OneStepMdp& mdp, const ScalarField& psi1,
                                   const ScalarField& psi2) {
  const double input_gap = sup_distance(psi1, psi2);
  const double tau = std::max(mdp.horizon.T, mdp.sigma());
  const ScalarField t1 = mdp_sweep(mdp, psi1, tau);
  const ScalarField t2 = mdp_sweep(mdp, psi2, tau);
  return {sup_distance(t1, t2), mdp.disc.gamma * input_gap};
}

double bellman_residual(const OneStepMdp& mdp, const SmoothTestFn& phi, double tau,
                        const State& x) {
  const double backed_up = mdp_backup(mdp, phi, tau, x).value;
  return (phi.eval(tau, x) - backed_up) / mdp.sigma();
}

double hjb_residual(const SmoothTestFn& phi, const TravelCost& cost, const ControlledDynamics& dyn,
                    double lambda, double tau, const State& x) {
  const State p = phi.grad_x(tau, x);
  double hamiltonian = std::numeric_limits<double>::infinity();
  for (Control u : dyn.controls().actions()) {
    hamiltonian = std::min(hamiltonian, cost(x) + dot(p, dyn(x, u)));
  }
  return phi.dtau(tau, x) - hamiltonian + lambda * phi.eval(tau, x);
}

std::vector<ResidualReport> consistency_study(const OneStepMdp& mdp_template,
                                              const SmoothTestFn& phi,
                                              const std::vector<Probe>& probes,
                                              const std::vector<double>& sigmas) {
  require(!sigmas.empty(), "consistency study needs at least one sigma");
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    require(sigmas[k] > 0.0, "sigmas must be positive");
    require(k == 0 || sigmas[k] < sigmas[k - 1], "sigmas must be strictly decreasing");
  }
  const double lambda = mdp_template.disc.rate;
  std::vector<ResidualReport> reports;
  reports.reserve(sigmas.size() * probes.size());
  for (double sigma : sigmas) {
    OneStepMdp mdp = mdp_template;
    mdp.disc = make_discount(lambda, sigma);
    for (const Probe& pr : probes) {
      ResidualReport r;
      r.sigma = sigma;
      r.tau = pr.tau;
      r.x = pr.x;
      r.bellman_residual = bellman_residual(mdp, phi, pr.tau, pr.x);
      r.hjb_residual = hjb_residual(phi, mdp.cost, mdp.dyn, lambda, pr.tau, pr.x);
      r.gap = std::abs(r.bellman_residual - r.hjb_residual);
      reports.push_back(r);
    }
  }
  return reports;
}

IterationTrace value_iterate_mdp(const OneStepMdp& mdp, const ScalarField& seed, int iters,
                                 bool keep_history) {
  require(mdp.disc.rate > 0.0, "value iteration needs a positive discount rate");
  require(iters >= 0, "iteration count must be nonnegative");
  IterationTrace trace;
  trace.history.push_back(seed);
  ScalarField current = seed;
  // Stationary wiring: the continuation is tau-independent, so any tau >= sigma works.
  const double tau = mdp.sigma();
  for (int k = 0; k < iters; ++k) {
    ScalarField next = mdp_sweep(mdp, current, tau);
    trace.deltas.push_back(sup_distance(next, current));
    current = std::move(next);
    if (keep_history) {
      trace.history.push_back(current);
    }
  }
  if (!keep_history) {
    trace.history.push_back(current);
  }
  return trace;
}

}  // namespace hjrl
