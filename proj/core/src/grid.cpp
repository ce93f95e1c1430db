#include "hjrl/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hjrl/error.hpp"

namespace hjrl {

namespace {

// Cell coordinates this close to an integer are snapped onto the node so that
// node queries return the stored value exactly.
constexpr double kNodeSnap = 1e-11;

struct AxisStencil {
  std::size_t lo;
  double t;
};

AxisStencil locate(double p, double min, double max, double step, std::size_t n) {
  const double q = std::clamp(p, min, max);
  double s = (q - min) / step;
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < kNodeSnap) {
    s = nearest;
  }
  const double last_cell = static_cast<double>(n - 2);
  double cell = std::floor(s);
  cell = std::clamp(cell, 0.0, last_cell);
  const double t = std::clamp(s - cell, 0.0, 1.0);
  return {static_cast<std::size_t>(cell), t};
}

// Endpoint-weighted so nested grids over one region share node coordinates.
double node_coord(double lo, double hi, std::size_t k, std::size_t n) {
  const auto m = static_cast<double>(n - 1);
  const auto t = static_cast<double>(k);
  return ((m - t) * lo + t * hi) / m;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  require(a.grid() == b.grid(), "fields live on different grids");
}

}  // namespace

Grid2::Grid2(double x_min, double x_max, double y_min, double y_max, std::size_t nx,
             std::size_t ny)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), nx_(nx), ny_(ny) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
              std::isfinite(y_max),
          "grid bounds must be finite");
  require(x_min < x_max && y_min < y_max, "grid bounds must be increasing");
  require(nx >= 2 && ny >= 2, "grid needs at least two nodes per axis");
  dx_ = (x_max - x_min) / static_cast<double>(nx - 1);
  dy_ = (y_max - y_min) / static_cast<double>(ny - 1);
}

Grid2 Grid2::square(double half_width, std::size_t n) {
  return Grid2(-half_width, half_width, -half_width, half_width, n, n);
}

double Grid2::x_at(std::size_t i) const noexcept { return node_coord(x_min_, x_max_, i, nx_); }

double Grid2::y_at(std::size_t j) const noexcept { return node_coord(y_min_, y_max_, j, ny_); }

State Grid2::clamp(const State& p) const noexcept {
  return {std::clamp(p[0], x_min_, x_max_), std::clamp(p[1], y_min_, y_max_)};
}

ScalarField::ScalarField(Grid2 grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "value count does not match the grid");
  for (double v : values_) {
    require(std::isfinite(v), "field values must be finite");
  }
}

ScalarField ScalarField::filled(const Grid2& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const Grid2& grid,
                                const std::function<double(const State&)>& fn) {
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = fn(grid.node(k));
  }
  return ScalarField(grid, std::move(values));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double interpolate(const ScalarField& field, const State& p) {
  const Grid2& g = field.grid();
  const auto [i, tx] = locate(p[0], g.x_min(), g.x_max(), g.dx(), g.nx());
  const auto [j, ty] = locate(p[1], g.y_min(), g.y_max(), g.dy(), g.ny());

  const std::size_t k00 = g.index(i, j);
  const double v00 = field[k00];
  const double v10 = field[k00 + 1];
  const double v01 = field[k00 + g.nx()];
  const double v11 = field[k00 + g.nx() + 1];

  // Weighted sum with nonnegative weights: every product and partial sum is
  // nondecreasing in each node value, so the rounded result is monotone too.
  const double sx = 1.0 - tx;
  const double sy = 1.0 - ty;
  const double v = (sx * sy) * v00 + (tx * sy) * v10 + (sx * ty) * v01 + (tx * ty) * v11;

  // The clamp removes last-bit overshoot and makes constant cells exact.
  const double lo = std::min(std::min(v00, v10), std::min(v01, v11));
  const double hi = std::max(std::max(v00, v10), std::max(v01, v11));
  return std::clamp(v, lo, hi);
}

FieldStats sup_diff(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  FieldStats stats;
  double sum = 0.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    sum += d;
    if (d > stats.max_abs) {
      stats.max_abs = d;
      arg = k;
    }
  }
  stats.mean_abs = sum / static_cast<double>(a.grid().size());
  stats.argmax_i = arg % a.grid().nx();
  stats.argmax_j = arg / a.grid().nx();
  return stats;
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

ScalarField clamp_field(const ScalarField& field, double lo, double hi) {
  require(lo <= hi, "clamp range must satisfy lo <= hi");
  std::vector<double> out(field.values().begin(), field.values().end());
  for (double& v : out) {
    v = std::clamp(v, lo, hi);
  }
  return ScalarField(field.grid(), std::move(out));
}

ScalarField subsample(const ScalarField& field, const Grid2& coarse) {
  const Grid2& fine = field.grid();
  require(fine.x_min() == coarse.x_min() && fine.x_max() == coarse.x_max() &&
              fine.y_min() == coarse.y_min() && fine.y_max() == coarse.y_max(),
          "subsample grids cover different regions");
  require(coarse.nx() <= fine.nx() && (fine.nx() - 1) % (coarse.nx() - 1) == 0 &&
              coarse.ny() <= fine.ny() && (fine.ny() - 1) % (coarse.ny() - 1) == 0,
          "coarse nodes do not land on fine nodes");
  const std::size_t sx = (fine.nx() - 1) / (coarse.nx() - 1);
  const std::size_t sy = (fine.ny() - 1) / (coarse.ny() - 1);
  std::vector<double> out(coarse.size());
  for (std::size_t j = 0; j < coarse.ny(); ++j) {
    for (std::size_t i = 0; i < coarse.nx(); ++i) {
      out[coarse.index(i, j)] = field.at(i * sx, j * sy);
    }
  }
  return ScalarField(coarse, std::move(out));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_field(const ScalarField& field, std::ostream& out) {
  const Grid2& g = field.grid();
  out << "FIELD v1\n"
      << g.nx() << ' ' << g.ny() << ' ' << format_double(g.x_min()) << ' '
      << format_double(g.x_max()) << ' ' << format_double(g.y_min()) << ' '
      << format_double(g.y_max()) << '\n';
  for (double v : field.values()) {
    out << format_double(v) << '\n';
  }
}

void write_field(const ScalarField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  write_field(field, out);
}

namespace {

double parse_number(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("expected a number, got '" + std::string(token) + "'", line);
  }
  if (!std::isfinite(v)) {
    throw ParseError("non-finite value '" + std::string(token) + "'", line);
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ScalarField read_field(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || trim(line) != "FIELD v1") {
    throw ParseError("missing 'FIELD v1' header", lineno);
  }
  ++lineno;
  if (!std::getline(in, line)) {
    throw ParseError("missing grid header", lineno);
  }
  std::istringstream header(line);
  std::string tok[6];
  for (auto& t : tok) {
    if (!(header >> t)) {
      throw ParseError("grid header needs 'nx ny x_min x_max y_min y_max'", lineno);
    }
  }
  std::string extra;
  if (header >> extra) {
    throw ParseError("trailing data in grid header", lineno);
  }
  const double nxd = parse_number(tok[0], lineno);
  const double nyd = parse_number(tok[1], lineno);
  if (nxd < 2 || nyd < 2 || nxd != std::floor(nxd) || nyd != std::floor(nyd)) {
    throw ParseError("node counts must be integers >= 2", lineno);
  }
  std::optional<Grid2> grid;
  try {
    grid.emplace(parse_number(tok[2], lineno), parse_number(tok[3], lineno),
                 parse_number(tok[4], lineno), parse_number(tok[5], lineno),
                 static_cast<std::size_t>(nxd), static_cast<std::size_t>(nyd));
  } catch (const ContractViolation& e) {
    throw ParseError(e.what(), lineno);
  }
  std::vector<double> values;
  values.reserve(grid->size());
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) {
      continue;
    }
    if (values.size() == grid->size()) {
      throw ParseError("more values than nx*ny", lineno);
    }
    values.push_back(parse_number(t, lineno));
  }
  if (values.size() != grid->size()) {
    throw ParseError("expected " + std::to_string(grid->size()) + " values, found " +
                         std::to_string(values.size()),
                     lineno);
  }
  return ScalarField(*grid, std::move(values));
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return read_field(in);
}

void write_pgm(const ScalarField& field, double lo, double hi,
               const std::filesystem::path& path) {
  require(lo < hi, "graymap range must satisfy lo < hi");
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  const Grid2& g = field.grid();
  out << "P2\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  // Top image row is the largest y.
  for (std::size_t r = 0; r < g.ny(); ++r) {
    const std::size_t j = g.ny() - 1 - r;
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double t = std::clamp((field.at(i, j) - lo) / (hi - lo), 0.0, 1.0);
      out << static_cast<int>(std::lround(255.0 * t)) << (i + 1 == g.nx() ? '\n' : ' ');
    }
  }
}

}  // namespace hjrl
