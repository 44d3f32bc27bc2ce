#pragma once

// Adaptive Simpson quadrature and running integrals.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oscrit::quad {

using Integrand = std::function<double(double)>;

/// Accept a panel when its error estimate is below abs (shared out by width)
/// plus rel times the panel's own magnitude.
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;

  Tolerance() = default;
  Tolerance(double both) : abs(both), rel(both) {}  // NOLINT(google-explicit-constructor)
  Tolerance(double abs_tol, double rel_tol) : abs(abs_tol), rel(rel_tol) {}
};

inline constexpr int kMaxDepth = 60;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;         // sum of per-panel Richardson estimates
  bool depth_capped = false;  // some panel hit kMaxDepth; value is a best estimate
  std::size_t evaluations = 0;
};

/// Integrates f over [a, b]. `breakpoints` (any order, points outside (a, b)
/// ignored) split the range into pieces that are integrated separately, so
/// kinks and narrow features there are never straddled by a panel.
QuadResult integrate_adaptive(const Integrand& f, double a, double b, Tolerance tol = {},
                              std::span<const double> breakpoints = {});

struct CumulativeTable {
  std::vector<double> grid;    // grid[0] == a
  std::vector<double> values;  // values[k] ~ integral of f from a to grid[k]
  double a = 0.0;
  Tolerance tol;
  bool depth_capped = false;
};

/// Running integral of f from a, summed panel by panel between consecutive
/// grid points so the total cost is linear in the grid size. `grid` must be
/// ascending with grid[0] >= a; a is prepended when grid[0] > a.
CumulativeTable cumulative(const Integrand& f, double a, std::span<const double> grid,
                           Tolerance tol = {}, std::span<const double> breakpoints = {});

}  // namespace oscrit::quad
