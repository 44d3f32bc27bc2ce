#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "oscrit/expr.hpp"

namespace oscrit::expr {

namespace {

bool is_comparison(Op op) {
  return op == Op::kLess || op == Op::kLessEq || op == Op::kGreater || op == Op::kGreaterEq;
}

void collect_comparisons(const NodePtr& n, std::vector<NodePtr>& out) {
  if (is_comparison(n->op)) out.push_back(n);
  for (const auto& a : n->args) collect_comparisons(a, out);
}

double ulp_at(double x) {
  const double ax = std::max(std::fabs(x), std::numeric_limits<double>::min());
  return std::nextafter(ax, std::numeric_limits<double>::infinity()) - ax;
}

class SwitchFinder {
 public:
  SwitchFinder(std::span<const Expr> exprs, const ParamMap& params) {
    for (const auto& e : exprs) {
      std::vector<NodePtr> cmps;
      collect_comparisons(e.root_ptr(), cmps);
      for (const auto& c : cmps) tests_.emplace_back(Expr(c), params);
    }
  }

  bool empty() const { return tests_.empty(); }

  // Switching points of every comparison between consecutive sample points.
  void find(std::span<const double> samples, std::vector<double>& out) const {
    for (const auto& test : tests_) {
      std::optional<bool> prev;
      double prev_t = 0.0;
      for (double s : samples) {
        std::optional<bool> cur = truth(test, s);
        if (cur && prev && *cur != *prev) out.push_back(bisect(test, prev_t, s, *prev));
        if (cur) {
          prev = cur;
          prev_t = s;
        }
      }
    }
  }

 private:
  static std::optional<bool> truth(const Compiled& c, double t) {
    try {
      return c(t) != 0.0;
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }

  static double bisect(const Compiled& c, double lo, double hi, bool lo_value) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      auto v = truth(c, mid);
      if (!v) break;
      if (*v == lo_value) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  std::vector<Compiled> tests_;
};

// True when some piece between consecutive points is narrower than the
// representable resolution at its position.
bool unresolvable(double lo, double hi, std::vector<double> pts, double min_ulps) {
  pts.push_back(lo);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double w = pts[i] - pts[i - 1];
    if (w < min_ulps * ulp_at(pts[i])) return true;
  }
  return false;
}

}  // namespace

BreakpointScan scan_breakpoints(std::span<const Expr> exprs, const ParamMap& params, double a,
                                double b, const BreakpointOptions& options) {
  BreakpointScan scan;
  scan.resolved_until = b;
  if (!(b > a)) return scan;

  const bool has_floor =
      std::any_of(exprs.begin(), exprs.end(), [](const Expr& e) { return e.uses(Fn::kFloor); });
  SwitchFinder finder(exprs, params);
  if (!has_floor && finder.empty()) return scan;

  if (!has_floor) {
    std::vector<double> samples;
    constexpr int kUniform = 64;
    for (int i = 0; i <= kUniform; ++i) samples.push_back(a + (b - a) * i / kUniform);
    if (a > 0.0 && b / a > 10.0) {
      const double decades = std::log10(b / a);
      const int n = static_cast<int>(std::ceil(32.0 * decades));
      for (int i = 1; i < n; ++i) samples.push_back(a * std::pow(b / a, double(i) / n));
    }
    std::sort(samples.begin(), samples.end());
    std::vector<double> found;
    finder.find(samples, found);
    std::sort(found.begin(), found.end());
    for (double p : found) {
      if (p > a && p < b) scan.points.push_back(p);
    }
    scan.points.erase(std::unique(scan.points.begin(), scan.points.end()), scan.points.end());
    return scan;
  }

  std::size_t cells = 0;
  for (double n = std::floor(a); n < b; n += 1.0) {
    const double c0 = std::max(a, n);
    const double c1 = std::min(b, n + 1.0);
    if (c1 <= c0) continue;
    if (cells++ >= options.max_cells) {
      scan.truncated = true;
      scan.resolved_until = c0;
      scan.reason = "breakpoint scan capped at " + std::to_string(options.max_cells) + " unit cells";
      break;
    }
    // Sample strictly inside the cell on the right so floor() stays constant.
    std::vector<double> samples;
    samples.push_back(c0);
    for (int k = 1; k < 8; ++k) samples.push_back(c0 + (c1 - c0) * k / 8.0);
    const double right = (c1 == n + 1.0) ? std::nextafter(c1, c0) : c1;
    samples.push_back(right);
    std::vector<double> found;
    finder.find(samples, found);
    found.erase(std::remove_if(found.begin(), found.end(),
                               [&](double p) { return !(p > c0 && p < c1); }),
                found.end());
    if (unresolvable(c0, c1, found, options.min_piece_ulps)) {
      scan.truncated = true;
      scan.resolved_until = c0;
      scan.reason = "coefficient features near t=" + std::to_string(c0) +
                    " are narrower than double precision resolves";
      break;
    }
    if (c0 > a) scan.points.push_back(c0);
    std::sort(found.begin(), found.end());
    scan.points.insert(scan.points.end(), found.begin(), found.end());
  }
  scan.points.erase(std::unique(scan.points.begin(), scan.points.end()), scan.points.end());
  return scan;
}

}  // namespace oscrit::expr
