#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"
#include "hjrl/grid.hpp"

namespace hjrl {

/// Nodes flagged as members of the strict backward-reachable tube.
struct BrtMask {
  Grid2 grid;
  std::vector<bool> inside;

  std::size_t count() const;
  bool at(std::size_t i, std::size_t j) const { return inside[grid.index(i, j)]; }
};

/// inside[k] = value[k] < threshold. The threshold must be negative; it is
/// the numerical stand-in for the strict inequality V < 0.
BrtMask extract_brt(const ScalarField& value, double threshold = -1e-6);

struct OracleConfig {
  int n_steps = 20;
  double dt = 0.05;
  int max_switches = 2;
};

/// Exhaustive check over piecewise bang-bang controls with at most
/// max_switches switches placed on the dt grid: true iff some Euler rollout
/// is inside the open target disk at a step index in [0, n_steps).
bool oracle_reachable(const State& x0, const TravelCost& target, const OracleConfig& cfg,
                      const ControlledDynamics& dyn);

/// oracle_reachable on every node of `grid`.
BrtMask oracle_mask(const Grid2& grid, const TravelCost& target, const OracleConfig& cfg,
                    const ControlledDynamics& dyn);

struct MaskDisagreement {
  std::size_t i;
  std::size_t j;
  bool in_band;
};

struct MaskComparison {
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t out_of_band = 0;  // disagreements farther than band_cells from a's frontier
  std::vector<MaskDisagreement> cells;
};

/// Frontier nodes of `a` are those with an 8-neighbour of the other label. A
/// disagreement is in band when some frontier node lies within band_cells
/// (Chebyshev distance).
MaskComparison compare_masks(const BrtMask& a, const BrtMask& b, int band_cells);

/// ASCII bitmap (P1), top row = largest y, 1 = inside.
void write_pbm(const BrtMask& mask, const std::filesystem::path& path);

/// CSV rows `i,j,x1,x2,in_band`.
void write_disagreements_csv(const MaskComparison& cmp, const Grid2& grid,
                             const std::filesystem::path& path);

}  // namespace hjrl
