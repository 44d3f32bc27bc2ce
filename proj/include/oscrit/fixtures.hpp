#pragma once

// Built-in coefficient fixtures: the Lazer equation phi''' + phi = 0 and the
// two worked examples (a power-law p with a corrected r, and a train of
// narrow bumps in p).

#include <optional>
#include <string>
#include <vector>

#include "oscrit/coeffs.hpp"
#include "oscrit/expr.hpp"

namespace oscrit::fixtures {

struct Fixture {
  std::string name;
  std::string description;
  std::string p, q, r;
  expr::ParamMap params;
  double t0 = 1.0;
  std::optional<std::string> declared_d;
  std::optional<std::string> split_p1;
  std::optional<std::string> split_p2;
  double alpha = 1.0;  // alpha used by the worked example
};

/// "lazer", "example31", "example32". Throws std::invalid_argument otherwise.
const Fixture& get(const std::string& name);
std::vector<std::string> names();

/// Power-law example: p = -M t^g, q = 0 and
///   r = N t^b - [disc >= 0 ? min(0, u*^3 - M t^g u*^2 + M g t^(g-1) u*) : 0]
/// with disc = M^2 t^(2g) - 3 M g t^(g-1), u* = (sqrt(disc) + M t^g) / 3,
/// so that the minimum function is exactly N t^b.
std::string example31_r();

/// `overrides` replace fixture parameter values (unknown names are added).
coeffs::CoefficientModel build(const Fixture& f, const expr::ParamMap& overrides = {});

}  // namespace oscrit::fixtures
