#include "hjrl/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hjrl/error.hpp"
#include "hjrl/parallel.hpp"

namespace hjrl {

std::size_t BrtMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), true));
}

BrtMask extract_brt(const ScalarField& value, double threshold) {
  require(threshold < 0.0, "BRT threshold must be negative");
  BrtMask mask{value.grid(), std::vector<bool>(value.grid().size())};
  for (std::size_t k = 0; k < mask.inside.size(); ++k) {
    mask.inside[k] = value[k] < threshold;
  }
  return mask;
}

namespace {

// Conservative rejection: true only when no control sequence of |u| <= a_max
// can put an Euler rollout of the double integrator into the disk within
// `remaining` more steps (checked steps are 0..remaining, inclusive).
bool provably_unreachable(const State& x, int remaining, double dt, double a_max, double r) {
  constexpr double slack = 1e-9;
  for (int m = 0; m <= remaining; ++m) {
    const double md = m * dt;
    const double v_lo = x[1] - md * a_max;
    const double v_hi = x[1] + md * a_max;
    const double v_min_abs = (v_lo <= 0.0 && v_hi >= 0.0) ? 0.0 : std::min(std::abs(v_lo), std::abs(v_hi));
    if (v_min_abs >= r + slack) {
      continue;
    }
    const double drift = x[0] + md * x[1];
    const double spread = dt * dt * a_max * 0.5 * m * (m - 1);
    const double p_lo = drift - spread;
    const double p_hi = drift + spread;
    const double p_min_abs = (p_lo <= 0.0 && p_hi >= 0.0) ? 0.0 : std::min(std::abs(p_lo), std::abs(p_hi));
    if (p_min_abs < r + slack) {
      return false;
    }
  }
  return true;
}

struct OracleSearch {
  const TravelCost& target;
  const OracleConfig& cfg;
  const ControlledDynamics& dyn;
  double a_max;
  bool prune;

  // The state is at step k and control `action` is about to be applied.
  bool search(const State& x, int k, std::size_t action, int switches_left) const {
    if (target.on_target(x)) {
      return true;
    }
    if (k + 1 >= cfg.n_steps) {
      return false;
    }
    if (prune && provably_unreachable(x, cfg.n_steps - 1 - k, cfg.dt, a_max, target.radius())) {
      return false;
    }
    const auto actions = dyn.controls().actions();
    const State next = euler_step(dyn, cfg.dt, x, actions[action]);
    if (search(next, k + 1, action, switches_left)) {
      return true;
    }
    if (switches_left > 0) {
      for (std::size_t other = 0; other < actions.size(); ++other) {
        if (other != action && search(next, k + 1, other, switches_left - 1)) {
          return true;
        }
      }
    }
    return false;
  }
};

}  // namespace

bool oracle_reachable(const State& x0, const TravelCost& target, const OracleConfig& cfg,
                      const ControlledDynamics& dyn) {
  require(cfg.n_steps >= 1, "oracle needs at least one step");
  require(cfg.dt > 0.0, "oracle dt must be positive");
  require(cfg.max_switches >= 0 && cfg.max_switches <= 3, "max_switches must be in [0, 3]");
  // The kinematic pruning bound is specific to x' = (x2, u) with |u| <= a_max.
  double a_max = 0.0;
  for (Control u : dyn.controls().actions()) {
    a_max = std::max(a_max, std::abs(u));
  }
  const State probe{0.3, -0.7};
  const bool is_double_integrator =
      dyn(probe, a_max) == State{probe[1], a_max} && dyn(probe, -a_max) == State{probe[1], -a_max};
  const OracleSearch s{target, cfg, dyn, a_max, is_double_integrator};
  for (std::size_t a = 0; a < dyn.controls().size(); ++a) {
    if (s.search(x0, 0, a, cfg.max_switches)) {
      return true;
    }
  }
  return false;
}

BrtMask oracle_mask(const Grid2& grid, const TravelCost& target, const OracleConfig& cfg,
                    const ControlledDynamics& dyn) {
  std::vector<char> flags(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      flags[k] = oracle_reachable(grid.node(k), target, cfg, dyn) ? 1 : 0;
    }
  });
  BrtMask mask{grid, std::vector<bool>(grid.size())};
  for (std::size_t k = 0; k < flags.size(); ++k) {
    mask.inside[k] = flags[k] != 0;
  }
  return mask;
}

MaskComparison compare_masks(const BrtMask& a, const BrtMask& b, int band_cells) {
  require(a.grid == b.grid, "masks live on different grids");
  require(band_cells >= 0, "band width must be nonnegative");
  const Grid2& g = a.grid;
  const auto nx = static_cast<long>(g.nx());
  const auto ny = static_cast<long>(g.ny());

  std::vector<bool> frontier(g.size(), false);
  for (long j = 0; j < ny; ++j) {
    for (long i = 0; i < nx; ++i) {
      const bool here = a.inside[g.index(i, j)];
      for (long dj = -1; dj <= 1 && !frontier[g.index(i, j)]; ++dj) {
        for (long di = -1; di <= 1; ++di) {
          const long ii = i + di;
          const long jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) {
            continue;
          }
          if (a.inside[g.index(ii, jj)] != here) {
            frontier[g.index(i, j)] = true;
            break;
          }
        }
      }
    }
  }

  auto near_frontier = [&](long i, long j) {
    for (long jj = std::max(0L, j - band_cells); jj <= std::min(ny - 1, j + band_cells); ++jj) {
      for (long ii = std::max(0L, i - band_cells); ii <= std::min(nx - 1, i + band_cells); ++ii) {
        if (frontier[g.index(ii, jj)]) {
          return true;
        }
      }
    }
    return false;
  };

  MaskComparison cmp;
  for (long j = 0; j < ny; ++j) {
    for (long i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (a.inside[k] == b.inside[k]) {
        ++cmp.agreements;
        continue;
      }
      ++cmp.disagreements;
      const bool in_band = near_frontier(i, j);
      if (!in_band) {
        ++cmp.out_of_band;
      }
      cmp.cells.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), in_band});
    }
  }
  return cmp;
}

void write_pbm(const BrtMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  const Grid2& g = mask.grid;
  out << "P1\n" << g.nx() << ' ' << g.ny() << '\n';
  for (std::size_t r = 0; r < g.ny(); ++r) {
    const std::size_t j = g.ny() - 1 - r;
    for (std::size_t i = 0; i < g.nx(); ++i) {
      out << (mask.at(i, j) ? '1' : '0') << (i + 1 == g.nx() ? '\n' : ' ');
    }
  }
}

void write_disagreements_csv(const MaskComparison& cmp, const Grid2& grid,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "i,j,x1,x2,in_band\n";
  for (const auto& c : cmp.cells) {
    out << c.i << ',' << c.j << ',' << format_double(grid.x_at(c.i)) << ','
        << format_double(grid.y_at(c.j)) << ',' << (c.in_band ? 1 : 0) << '\n';
  }
}

}  // namespace hjrl
