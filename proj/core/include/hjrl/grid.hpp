#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hjrl/types.hpp"

namespace hjrl {

/// Vertex-centred uniform grid: node 0 sits on the lower bound and node n-1
/// on the upper bound of each axis.
class Grid2 {
 public:
  Grid2(double x_min, double x_max, double y_min, double y_max, std::size_t nx, std::size_t ny);

  /// Square region [-half_width, half_width]^2 with n x n nodes.
  static Grid2 square(double half_width, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  std::size_t size() const noexcept { return nx_ * ny_; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
  double x_at(std::size_t i) const noexcept;
  double y_at(std::size_t j) const noexcept;
  State node(std::size_t i, std::size_t j) const noexcept { return {x_at(i), y_at(j)}; }
  State node(std::size_t flat) const noexcept { return node(flat % nx_, flat / nx_); }

  /// Componentwise projection onto the rectangle.
  State clamp(const State& p) const noexcept;

  bool operator==(const Grid2&) const = default;

 private:
  double x_min_, x_max_, y_min_, y_max_;
  std::size_t nx_, ny_;
  double dx_, dy_;
};

/// Node samples on a Grid2, row-major (x fastest). Every entry is finite.
class ScalarField {
 public:
  ScalarField(Grid2 grid, std::vector<double> values);

  static ScalarField filled(const Grid2& grid, double value);
  static ScalarField sample(const Grid2& grid, const std::function<double(const State&)>& fn);

  const Grid2& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t flat) const noexcept { return values_[flat]; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[grid_.index(i, j)]; }

  double min() const;
  double max() const;

  bool operator==(const ScalarField&) const = default;

 private:
  Grid2 grid_;
  std::vector<double> values_;
};

/// Bilinear interpolation after clamping the query point to the grid. Exact
/// at nodes, monotone in the field values and never leaves the range of the
/// four stencil values.
double interpolate(const ScalarField& field, const State& p);

struct FieldStats {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t argmax_i = 0;
  std::size_t argmax_j = 0;
};

/// Max and mean of |a - b| over the nodes of a shared grid.
FieldStats sup_diff(const ScalarField& a, const ScalarField& b);

/// Sup norm of a - b; the grids must match.
double sup_distance(const ScalarField& a, const ScalarField& b);

ScalarField clamp_field(const ScalarField& field, double lo, double hi);

/// Values at the nodes of `coarse`, which must cover the same rectangle with
/// every coarse node on a node of field's grid.
ScalarField subsample(const ScalarField& field, const Grid2& coarse);

// Plain-text field file:
//   FIELD v1
//   nx ny x_min x_max y_min y_max
//   then nx*ny values, row-major, one per line (shortest round-trip decimal).
void write_field(const ScalarField& field, std::ostream& out);
void write_field(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_field(std::istream& in);
ScalarField read_field(const std::filesystem::path& path);

/// ASCII graymap (P2); lo maps to 0 and hi to 255, values outside saturate.
void write_pgm(const ScalarField& field, double lo, double hi, const std::filesystem::path& path);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace hjrl
