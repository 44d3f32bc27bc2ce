#pragma once

// Dormand-Prince 5(4) embedded pair, one step at a time. Drivers own the
// step-size loop so they can add breakpoints, rescaling or blow-up checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace oscrit::rk45 {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct StepResult {
  Vec<N> y;          // fifth-order solution at t + h
  Vec<N> dy;         // f(t + h, y), reusable as the next step's first stage
  double error = 0;  // weighted max-norm of the embedded error estimate; accept when <= 1
};

/// `f(t, y)` returns dy/dt. `k1` must be f(t, y).
template <std::size_t N, class F>
StepResult<N> step(F&& f, double t, const Vec<N>& y, const Vec<N>& k1, double h, double rel_tol,
                   double abs_tol) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // fifth minus fourth order weights
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Vec<N> tmp;
  auto stage = [&](auto&& combine) {
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * combine(i);
    return tmp;
  };
  const Vec<N> k2 = f(t + c2 * h, stage([&](std::size_t i) { return a21 * k1[i]; }));
  const Vec<N> k3 = f(t + c3 * h, stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }));
  const Vec<N> k4 = f(t + c4 * h, stage([&](std::size_t i) {
                        return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
                      }));
  const Vec<N> k5 = f(t + c5 * h, stage([&](std::size_t i) {
                        return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                      }));
  const Vec<N> k6 = f(t + h, stage([&](std::size_t i) {
                        return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
                      }));
  StepResult<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  }
  out.dy = f(t + h, out.y);
  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * out.dy[i]);
    const double scale = abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(out.y[i]));
    err = std::max(err, std::fabs(e) / scale);
  }
  out.error = std::isfinite(err) ? err : HUGE_VAL;
  return out;
}

/// Standard controller: safety 0.9, factor clamped to [0.2, 5] (at most 1
/// after a rejection).
inline double next_step(double h, double error, bool accepted) {
  double factor = error > 0.0 ? 0.9 * std::pow(error, -0.2) : 5.0;
  factor = std::clamp(factor, 0.2, accepted ? 5.0 : 1.0);
  return h * factor;
}

}  // namespace oscrit::rk45
