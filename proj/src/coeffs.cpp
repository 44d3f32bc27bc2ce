#include "oscrit/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace oscrit::coeffs {

namespace {

constexpr double kValidationSpan = 1e4;
constexpr std::size_t kValidationSamples = 1000;

double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double g_at(const CoefficientSample& c, double u) {
  return ((u + c.p) * u + (c.q - c.dp)) * u + c.r;
}

}  // namespace

CoefficientModel::CoefficientModel(expr::Expr p, expr::Expr q, expr::Expr r, expr::ParamMap params,
                                   double t0, std::optional<expr::Expr> declared_d)
    : p_(std::move(p)),
      q_(std::move(q)),
      r_(std::move(r)),
      p_prime_(expr::differentiate(p_)),
      declared_d_(std::move(declared_d)),
      params_(std::move(params)),
      t0_(t0) {
  if (!(t0_ > 0.0)) throw ModelError("t0 must be positive");
  cp_ = expr::Compiled(p_, params_);
  cq_ = expr::Compiled(q_, params_);
  cr_ = expr::Compiled(r_, params_);
  cdp_ = expr::Compiled(p_prime_, params_);
  if (declared_d_) cd_ = expr::Compiled(*declared_d_, params_);
}

CoefficientSample CoefficientModel::at(double t) const { return {cp_(t), cdp_(t), cq_(t), cr_(t)}; }

std::optional<double> CoefficientModel::declared_d_at(double t) const {
  if (!declared_d_) return std::nullopt;
  return cd_(t);
}

std::vector<expr::Expr> CoefficientModel::expressions() const {
  std::vector<expr::Expr> out{p_, p_prime_, q_, r_};
  if (declared_d_) out.push_back(*declared_d_);
  return out;
}

bool CoefficientModel::has_breakpoints() const {
  const auto all = expressions();
  return std::any_of(all.begin(), all.end(), [](const expr::Expr& e) { return e.has_breakpoints(); });
}

CoefficientModel build_model(const std::string& p_src, const std::string& q_src,
                             const std::string& r_src, const expr::ParamMap& params, double t0,
                             const std::optional<std::string>& declared_d_src) {
  if (!(t0 > 0.0)) throw ModelError("t0 must be positive (got " + std::to_string(t0) + ")");
  for (const auto& [name, value] : params) {
    if (name == "t" || name == "pi") throw ModelError("parameter name '" + name + "' is reserved");
    if (!std::isfinite(value)) throw ModelError("parameter '" + name + "' is not finite");
  }
  std::optional<expr::Expr> d;
  if (declared_d_src) d = expr::parse(*declared_d_src, params);
  CoefficientModel model(expr::parse(p_src, params), expr::parse(q_src, params),
                         expr::parse(r_src, params), params, t0, std::move(d));

  const auto grid = SampleGrid::jittered(t0, t0 + kValidationSpan, kValidationSamples);
  for (double t : grid.points) {
    try {
      const auto c = model.at(t);
      if (!std::isfinite(c.p + c.dp + c.q + c.r)) throw expr::EvalError("non-finite coefficient");
      if (model.declared_d()) (void)model.declared_d_at(t);
    } catch (const expr::EvalError& e) {
      throw ModelError("coefficients do not evaluate at t=" + std::to_string(t) + ": " + e.what());
    }
  }
  return model;
}

double p_minus(const CoefficientModel& model, double t) { return std::min(model.p_at(t), 0.0); }

double cubic_g(const CoefficientModel& model, double t, double u) { return g_at(model.at(t), u); }

double d_closed(const CoefficientSample& c) {
  const double disc = c.p * c.p + 3.0 * (c.dp - c.q);
  if (disc < 0.0) return c.r;
  const double root = std::sqrt(disc);
  // Larger root of G' = 3u^2 + 2pu + (q - p'); the rationalised form avoids
  // cancellation when p > 0.
  const double u_star = c.p > 0.0 ? (c.dp - c.q) / (root + c.p) : (root - c.p) / 3.0;
  if (u_star < 0.0) return c.r;
  return std::min(c.r, g_at(c, u_star));
}

double d_closed(const CoefficientModel& model, double t) { return d_closed(model.at(t)); }

double default_u_max(const CoefficientSample& c) {
  return 10.0 * (1.0 + std::fabs(c.p) + std::sqrt(std::fabs(c.q - c.dp)));
}

double d_oracle(const CoefficientModel& model, double t, double u_max, int n_grid) {
  const auto c = model.at(t);
  auto g = [&c](double u) { return g_at(c, u); };
  const double h = u_max / n_grid;
  int best = 0;
  double best_value = g(0.0);
  for (int k = 1; k <= n_grid; ++k) {
    const double v = g(k * h);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = std::max(0.0, (best - 1) * h);
  const double hi = std::min(u_max, (best + 1) * h);
  const double u = golden_section_min(g, lo, hi, 1e-10);
  return std::min({best_value, g(u), g(0.0)});
}

double d_oracle(const CoefficientModel& model, double t) {
  return d_oracle(model, t, default_u_max(model.at(t)), 100000);
}

double d_effective(const CoefficientModel& model, double t) {
  if (auto d = model.declared_d_at(t)) return *d;
  return d_closed(model, t);
}

SampleGrid SampleGrid::jittered(double a, double b, std::size_t n) {
  SampleGrid grid;
  if (n == 0) return grid;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const bool logarithmic = a > 0.0 && b / a > 10.0;
  for (std::size_t i = 0; i < n; ++i) {
    double frac = std::fmod(static_cast<double>(i) * golden, 1.0);
    const double u = (static_cast<double>(i) + frac) / static_cast<double>(n);
    grid.points.push_back(logarithmic ? a * std::pow(b / a, u) : a + (b - a) * u);
  }
  std::sort(grid.points.begin(), grid.points.end());
  return grid;
}

void SampleGrid::add_piece_midpoints(const CoefficientModel& model, double a, double b,
                                     std::size_t max_pieces) {
  if (!model.has_breakpoints()) return;
  expr::BreakpointOptions opts;
  opts.max_cells = max_pieces;
  const auto exprs = model.expressions();
  const auto scan = expr::scan_breakpoints(exprs, model.params(), a, b, opts);
  std::vector<double> cuts{a};
  cuts.insert(cuts.end(), scan.points.begin(), scan.points.end());
  cuts.push_back(scan.resolved_until);
  for (std::size_t i = 1; i < cuts.size() && i <= max_pieces; ++i) {
    if (cuts[i] > cuts[i - 1]) points.push_back(0.5 * (cuts[i - 1] + cuts[i]));
  }
  std::sort(points.begin(), points.end());
}

namespace {

ConditionCheck check_sign(const std::string& name, const std::function<double(double)>& f,
                          const std::function<bool(double)>& ok, const SampleGrid& grid) {
  ConditionCheck out;
  out.condition = name;
  out.samples = grid.points.size();
  for (double t : grid.points) {
    double v = 0.0;
    try {
      v = f(t);
    } catch (const expr::EvalError& e) {
      out.status = SignStatus::kViolated;
      out.witness_t = t;
      out.note = e.what();
      return out;
    }
    if (!ok(v)) {
      out.status = SignStatus::kViolated;
      out.witness_t = t;
      out.witness_value = v;
      return out;
    }
  }
  return out;
}

}  // namespace

SignReport check_condition_a(const CoefficientModel& model, const SampleGrid& grid) {
  SignReport report;
  report.r_positive = check_sign(
      "r(t) > 0", [&](double t) { return model.r_at(t); }, [](double v) { return v > 0.0; }, grid);
  report.q_nonpositive = check_sign(
      "q(t) <= 0", [&](double t) { return model.q_at(t); }, [](double v) { return v <= 0.0; }, grid);
  return report;
}

SplitError::SplitError(const std::string& message, double witness_t, double deviation)
    : std::runtime_error(message), witness_t_(witness_t), deviation_(deviation) {}

SplitModel::SplitModel(CoefficientModel base, expr::Expr p_minus_1, expr::Expr p_minus_2)
    : base_(std::move(base)), p1_(std::move(p_minus_1)), p2_(std::move(p_minus_2)) {
  c1_ = expr::Compiled(p1_, base_.params());
  c2_ = expr::Compiled(p2_, base_.params());
}

SplitModel make_split(const CoefficientModel& model, const std::optional<std::string>& p1_src,
                      const std::optional<std::string>& p2_src) {
  using namespace expr::build;
  expr::Expr p1 = p1_src ? expr::parse(*p1_src, model.params()) : expr::Expr(constant(0.0), "0");
  expr::Expr p2 = p2_src ? expr::parse(*p2_src, model.params())
                         : expr::Expr(call(expr::Fn::kMin, model.p().root_ptr(), constant(0.0)));
  SplitModel split(model, std::move(p1), std::move(p2));

  const double t0 = model.t0();
  auto grid = SampleGrid::jittered(t0, t0 + kValidationSpan, 2 * kValidationSamples);
  grid.add_piece_midpoints(model, t0, t0 + kValidationSpan);

  double worst = 0.0;
  double worst_t = t0;
  for (double t : grid.points) {
    double a = 0.0;
    double b = 0.0;
    double pm = 0.0;
    try {
      a = split.p_minus_1_at(t);
      b = split.p_minus_2_at(t);
      pm = p_minus(model, t);
    } catch (const expr::EvalError& e) {
      throw SplitError(std::string("split does not evaluate: ") + e.what(), t, 0.0);
    }
    if (a > 1e-12) throw SplitError("p_minus_1 is positive at t=" + std::to_string(t), t, a);
    if (b > 1e-12) throw SplitError("p_minus_2 is positive at t=" + std::to_string(t), t, b);
    const double dev = std::fabs(a + b - pm);
    if (dev > 1e-9 * std::fabs(pm) + 1e-12 && dev > worst) {
      worst = dev;
      worst_t = t;
    }
  }
  if (worst > 0.0) {
    throw SplitError("p_minus_1 + p_minus_2 differs from p_- by up to " + std::to_string(worst) +
                         " (at t=" + std::to_string(worst_t) + ")",
                     worst_t, worst);
  }
  return split;
}

}  // namespace oscrit::coeffs
