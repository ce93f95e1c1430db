#pragma once

#include <array>
#include <cmath>

namespace hjrl {

/// Planar state (x1 = position, x2 = velocity for the double integrator).
using State = std::array<double, 2>;

/// Scalar control input.
using Control = double;

inline State operator+(const State& a, const State& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline State operator-(const State& a, const State& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline State operator*(double s, const State& a) { return {s * a[0], s * a[1]}; }

inline double dot(const State& a, const State& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const State& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1]); }

}  // namespace hjrl
