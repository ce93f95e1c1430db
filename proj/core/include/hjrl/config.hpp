#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hjrl/costs.hpp"
#include "hjrl/dynamics.hpp"
#include "hjrl/grid.hpp"
#include "hjrl/hjb_solver.hpp"
#include "hjrl/reachability.hpp"
#include "hjrl/train.hpp"

namespace hjrl {

struct RoiConfig {
  double x_min = -2.5;
  double x_max = 2.5;
  double y_min = -2.5;
  double y_max = 2.5;
  std::size_t nx = 201;
  std::size_t ny = 201;

  Grid2 grid() const { return Grid2(x_min, x_max, y_min, y_max, nx, ny); }
};

/// Everything one experiment run needs. Defaults are the benchmark values:
/// dt = 0.05, rate = 1, tol = 1e-6, 2000 sweeps, Stage I on [-10, 10]^2 with
/// 501^2 nodes, Stage II on [-2.5, 2.5]^2 with 201^2 nodes.
struct ExperimentConfig {
  std::uint64_t seed = 0;

  double a_max = 1.0;
  double radius = 1.0;
  double scale = 1.0;
  double rate = 1.0;
  double dt = 0.05;
  double tol = 1e-6;
  int max_iters = 2000;

  RoiConfig stage1_roi{-10.0, 10.0, -10.0, 10.0, 501, 501};
  double horizon = 1.0;
  double brt_threshold = -1e-6;
  int band_cells = 2;
  int max_switches = 2;
  bool run_oracle = true;
  // Masks are compared on this coarser grid over the Stage I region; its
  // nodes must coincide with solver nodes.
  std::size_t compare_nx = 51;
  std::size_t compare_ny = 51;

  RoiConfig stage2_roi{};
  TrainConfig train{};

  TravelCost cost() const { return TravelCost(radius, scale); }
  DiscountConfig discount() const { return make_discount(rate, dt); }
  SweepConfig sweep() const { return {discount(), tol, max_iters}; }
  /// Dynamics with M_f bounded over the given region's velocity range.
  ControlledDynamics dynamics(const RoiConfig& roi) const;
  TrainConfig train_config() const;
};

/// INI-style text: `key = value` lines, `[section]` headers, `#` comments.
/// Unknown keys and malformed values raise ParseError naming the key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text with every key written out.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace hjrl
