#include "oscrit/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oscrit::quad {

namespace {

// Seed nodes are shifted by this fraction of a panel so that they never line
// up with integer breakpoints of floor-based coefficients.
const double kJitter = (std::sqrt(2.0) - 1.0) / 8.0;

struct Simpson {
  const Integrand& f;
  double rel;
  QuadResult& out;

  double eval(double x) {
    ++out.evaluations;
    return f(x);
  }

  double refine(double a, double b, double fa, double fm, double fb, double whole, double abs_budget,
                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double sum = left + right;
    const double delta = sum - whole;
    const double limit = 15.0 * (abs_budget + rel * std::fabs(sum));
    const bool tiny = !(lm > a && m > lm && rm > m && b > rm);
    if (std::fabs(delta) <= limit || tiny) {
      out.error += std::fabs(delta) / 15.0;
      return sum + delta / 15.0;
    }
    if (depth >= kMaxDepth) {
      out.depth_capped = true;
      out.error += std::fabs(delta) / 15.0;
      return sum + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * abs_budget, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * abs_budget, depth + 1);
  }

  double panel(double a, double b, double abs_budget) {
    const double m = 0.5 * (a + b);
    const double fa = eval(a);
    const double fm = eval(m);
    const double fb = eval(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return refine(a, b, fa, fm, fb, whole, abs_budget, 1);
  }
};

std::vector<double> seed_nodes(double lo, double hi, int min_panels) {
  std::vector<double> nodes{lo};
  if (lo > 0.0 && hi / lo > 10.0) {
    const int m = std::max(min_panels, static_cast<int>(std::ceil(8.0 * std::log10(hi / lo))));
    for (int k = 1; k < m; ++k) nodes.push_back(lo * std::pow(hi / lo, (k + kJitter) / m));
  } else {
    for (int k = 1; k < min_panels; ++k) nodes.push_back(lo + (hi - lo) * (k + kJitter) / min_panels);
  }
  nodes.push_back(hi);
  return nodes;
}

}  // namespace

QuadResult integrate_adaptive(const Integrand& f, double a, double b, Tolerance tol,
                              std::span<const double> breakpoints) {
  QuadResult out;
  if (a == b) return out;
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive requires a < b");

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(b);
  const bool split = cuts.size() > 2;
  const int min_panels = split ? 2 : 16;

  Simpson s{f, tol.rel, out};
  const double width = b - a;
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const auto nodes = seed_nodes(cuts[i - 1], cuts[i], min_panels);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
      const double lo = nodes[k - 1];
      const double hi = nodes[k];
      if (!(hi > lo)) continue;
      total += s.panel(lo, hi, tol.abs * (hi - lo) / width);
    }
  }
  out.value = total;
  return out;
}

CumulativeTable cumulative(const Integrand& f, double a, std::span<const double> grid, Tolerance tol,
                           std::span<const double> breakpoints) {
  CumulativeTable table;
  table.a = a;
  table.tol = tol;
  if (grid.empty()) {
    table.grid.push_back(a);
    table.values.push_back(0.0);
    return table;
  }
  if (grid.front() < a) throw std::invalid_argument("cumulative grid starts before a");
  table.grid.push_back(a);
  table.values.push_back(0.0);
  double running = 0.0;
  double prev = a;
  for (double t : grid) {
    if (t < prev) throw std::invalid_argument("cumulative grid must be ascending");
    if (t == prev) {
      if (t != table.grid.back()) {
        table.grid.push_back(t);
        table.values.push_back(running);
      }
      continue;
    }
    const QuadResult r = integrate_adaptive(f, prev, t, tol, breakpoints);
    table.depth_capped = table.depth_capped || r.depth_capped;
    running += r.value;
    table.grid.push_back(t);
    table.values.push_back(running);
    prev = t;
  }
  return table;
}

}  // namespace oscrit::quad
