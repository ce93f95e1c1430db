#pragma once

#include <functional>
#include <vector>

#include "hjrl/backup.hpp"
#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"
#include "hjrl/grid.hpp"

namespace hjrl {

/// Deterministic discounted MDP obtained by slicing time into steps of
/// length sigma = disc.dt. States are (tau, x); actions are constant controls
/// held for one step; the step cost is w * h at the half step.
struct OneStepMdp {
  ControlledDynamics dyn;
  TravelCost cost;
  DiscountConfig disc;
  Horizon horizon;

  double sigma() const noexcept { return disc.dt; }
  /// Largest possible |step cost|, w * M_h.
  double step_cost_bound() const noexcept { return disc.weight * cost.bound(); }
};

/// C^1 test function with caller-supplied derivatives.
struct SmoothTestFn {
  std::function<double(double, const State&)> eval;
  std::function<State(double, const State&)> grad_x;
  std::function<double(double, const State&)> dtau;
};

/// phi(tau, x) = c0 + c_tau * tau + c1 * x1 + c2 * x2.
SmoothTestFn affine_test_fn(double c0, double c_tau, double c1, double c2);

/// Largest relative error between the supplied derivatives and central
/// differences of eval, over the given probes.
double derivative_self_check(const SmoothTestFn& phi, const std::vector<std::pair<double, State>>& probes,
                             double step = 1e-5);

struct MdpBackup {
  double value = 0.0;
  Control control = 0.0;
  std::size_t action = 0;
};

/// Numerical Bellman backup at (tau, x). `continuation` is the slice
/// Psi(tau - sigma, .); pass a zero field when tau - sigma lies in the
/// boundary strip [0, sigma). Requires tau >= sigma.
MdpBackup mdp_backup(const OneStepMdp& mdp, const ScalarField& continuation, double tau,
                     const State& x);

/// The same backup applied to an analytic continuation phi(tau - sigma, .).
MdpBackup mdp_backup(const OneStepMdp& mdp, const SmoothTestFn& phi, double tau, const State& x);

/// Whole-grid sweep of mdp_backup at a fixed tau.
ScalarField mdp_sweep(const OneStepMdp& mdp, const ScalarField& continuation, double tau);

struct ContractionProbe {
  double lhs = 0.0;    // |T Psi1 - T Psi2|_inf over the nodes
  double bound = 0.0;  // exp(-lambda sigma) |Psi1 - Psi2|_inf
};

ContractionProbe contraction_probe(const OneStepMdp& mdp, const ScalarField& psi1,
                                   const ScalarField& psi2);

/// (phi - T phi) / sigma at (tau, x), with T applied to phi directly.
double bellman_residual(const OneStepMdp& mdp, const SmoothTestFn& phi, double tau,
                        const State& x);

/// phi_tau - min_u [h + grad phi . f] + lambda phi.
double hjb_residual(const SmoothTestFn& phi, const TravelCost& cost, const ControlledDynamics& dyn,
                    double lambda, double tau, const State& x);

struct ResidualReport {
  double sigma = 0.0;
  double tau = 0.0;
  State x{};
  double bellman_residual = 0.0;
  double hjb_residual = 0.0;
  double gap = 0.0;
};

struct Probe {
  double tau;
  State x;
};

/// Bellman vs HJB residual gap for every (sigma, probe), ordered by sigma
/// then probe. `sigmas` must be strictly decreasing; each sigma replaces the
/// template's step with the template's discount rate kept.
std::vector<ResidualReport> consistency_study(const OneStepMdp& mdp_template,
                                              const SmoothTestFn& phi,
                                              const std::vector<Probe>& probes,
                                              const std::vector<double>& sigmas);

struct IterationTrace {
  std::vector<ScalarField> history;  // history[k] = Phi_k, including the seed
  std::vector<double> deltas;        // deltas[k] = |Phi_{k+1} - Phi_k|_inf
};

/// k-fold application of the stationary backup starting from seed.
IterationTrace value_iterate_mdp(const OneStepMdp& mdp, const ScalarField& seed, int iters,
                                 bool keep_history = true);

}  // namespace hjrl
