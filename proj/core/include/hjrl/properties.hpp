#pragma once

#include <cstdint>
#include <vector>

#include "hjrl/bellman_mdp.hpp"
#include "hjrl/grid.hpp"
#include "hjrl/siren.hpp"

namespace hjrl {

// Randomised property drivers shared by the `properties` command and the
// acceptance suite. Every run is reproducible from its seed.

struct ContractionTrial {
  double lambda = 0.0;
  double sigma = 0.0;
  int trial = 0;
  double lhs = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // 8 ulps at the magnitude of the fields involved
  bool ok = false;
};

std::vector<ContractionTrial> contraction_suite(const Grid2& grid, const ControlledDynamics& dyn,
                                                const TravelCost& cost,
                                                const std::vector<double>& lambdas,
                                                const std::vector<double>& sigmas, int trials,
                                                std::uint64_t seed);

struct MonotoneTrial {
  int trial = 0;
  std::size_t violations = 0;  // nodes where T Psi1 > T Psi2
};

std::vector<MonotoneTrial> monotonicity_suite(const Grid2& grid, const OneStepMdp& mdp, int trials,
                                              std::uint64_t seed);

struct ConsistencyOutcome {
  std::vector<ResidualReport> reports;
  std::vector<double> sigmas;
  /// ratios[p][k] = gap(sigmas[k+1]) / gap(sigmas[k]) for probe p.
  std::vector<std::vector<double>> ratios;
  /// First k from which every later ratio lies in [lo, hi]; sigmas.size() - 1
  /// when no such k exists.
  std::size_t onset = 0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  bool ok = false;
};

/// Affine test function and off-target probes; ratios must fall in [lo, hi]
/// from the onset on, and at least one ratio must remain after the onset.
ConsistencyOutcome residual_consistency_suite(const OneStepMdp& mdp,
                                              const std::vector<double>& sigmas, int probe_count,
                                              double lo, double hi, std::uint64_t seed);

/// The affine test function used by residual_consistency_suite.
SmoothTestFn consistency_test_fn();

/// Deterministic off-target probes with |x| in [1.5, 2.5] and tau in [0.5, 1].
std::vector<Probe> consistency_probes(int count, std::uint64_t seed);

struct GradientTrial {
  int net = 0;
  int probe = 0;
  double max_rel_error = 0.0;
};

/// Relative error |a - b| / max(|a|, |b|, floor) between analytic gradients
/// and central differences of the squared loss.
std::vector<GradientTrial> gradient_suite(int nets, int probes_per_net, int width, double omega0,
                                          double fd_step, double floor, std::uint64_t seed);

/// Central differences of (net(x) - y)^2 for every parameter.
Eigen::VectorXd finite_difference_gradient(const SirenNet& net, const State& x, double y,
                                           double step);

}  // namespace hjrl
