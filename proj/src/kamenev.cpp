#include "oscrit/kamenev.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oscrit::kamenev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLazerConstant = 2.0 / (3.0 * std::sqrt(3.0));

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Breakpoints of the expressions an integrand depends on, and how far they
// could be resolved.
struct Domain {
  std::vector<double> breakpoints;
  double horizon = kInf;
  std::string warning;
};

Domain scan_domain(const std::vector<expr::Expr>& exprs, const expr::ParamMap& params, double a,
                   double b, const expr::BreakpointOptions& opts) {
  Domain d;
  const bool any =
      std::any_of(exprs.begin(), exprs.end(), [](const expr::Expr& e) { return e.has_breakpoints(); });
  if (!any) return d;
  const auto scan = expr::scan_breakpoints(exprs, params, a, b, opts);
  d.breakpoints = scan.points;
  if (scan.truncated) {
    d.horizon = scan.resolved_until;
    d.warning = scan.reason + "; samples beyond t=" + fmt(scan.resolved_until) + " dropped";
  }
  return d;
}

std::vector<expr::Expr> d_dependencies(const coeffs::CoefficientModel& m) {
  if (m.declared_d()) return {*m.declared_d()};
  return {m.p(), m.p_prime(), m.q(), m.r()};
}

std::vector<expr::Expr> with_p(std::vector<expr::Expr> v, const coeffs::CoefficientModel& m) {
  v.push_back(m.p());
  return v;
}

bool is_integer(double a) { return std::floor(a) == a; }

// Extra cut points accumulating geometrically at t, so a non-smooth
// (t - tau)^alpha factor is resolved without deep recursion.
void add_grading(std::vector<double>& cuts, double a, double t) {
  for (int k = 1; k <= 30; ++k) cuts.push_back(t - (t - a) * std::ldexp(1.0, -k));
}

struct Window {
  std::size_t w = 0;
  double running_end = 0.0;   // running extreme over all samples
  double running_prev = 0.0;  // running extreme up to the end of the previous window
  double last = 0.0;          // extreme over the last window
  double prev = 0.0;          // extreme over the previous window
};

template <class Pick>
Window windows(std::span<const Sample> s, const Policy& policy, Pick pick) {
  Window out;
  const std::size_t n = s.size();
  out.w = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(n * policy.window_fraction)));
  out.w = std::min(out.w, n / 2);
  auto extreme = [&](std::size_t from, std::size_t to) {
    double v = s[from].s;
    for (std::size_t i = from; i < to; ++i) v = pick(v, s[i].s);
    return v;
  };
  out.running_end = extreme(0, n);
  out.running_prev = extreme(0, n - out.w);
  out.last = extreme(n - out.w, n);
  out.prev = extreme(n - 2 * out.w, n - out.w);
  return out;
}

Verdict too_few(std::size_t n, const Policy& policy, double threshold) {
  Verdict v;
  v.evidence.threshold = threshold;
  v.note = "only " + std::to_string(n) + " samples (need " + std::to_string(policy.min_samples) + ")";
  return v;
}

}  // namespace

std::vector<double> GeometricGrid::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) out.push_back(t_start * std::pow(ratio, k));
  return out;
}

GeometricGrid GeometricGrid::starting_after(double t0, double ratio, int count) {
  return {t0 * ratio, ratio, count};
}

std::string to_string(CriterionId id) {
  switch (id) {
    case CriterionId::kThm31B: return "THM31B";
    case CriterionId::kThm32C: return "THM32C";
    case CriterionId::kThm32D: return "THM32D";
    case CriterionId::kThm33E: return "THM33E";
    case CriterionId::kThm33G: return "THM33G";
    case CriterionId::kLazer: return "LAZER";
    case CriterionId::kCor31: return "COR31";
  }
  return "?";
}

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kDiverges: return "DIVERGES";
    case VerdictKind::kBounded: return "BOUNDED";
    case VerdictKind::kBoundedBelow: return "BOUNDED_BELOW";
    case VerdictKind::kUnboundedBelow: return "UNBOUNDED_BELOW";
    case VerdictKind::kInconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(ConditionStatus status) {
  switch (status) {
    case ConditionStatus::kEstablished: return "ESTABLISHED";
    case ConditionStatus::kRefuted: return "REFUTED";
    case ConditionStatus::kUndetermined: return "UNDETERMINED";
  }
  return "?";
}

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::kThm31: return "THM31";
    case TheoremId::kThm32: return "THM32";
    case TheoremId::kThm33: return "THM33";
    case TheoremId::kLazer: return "LAZER";
    case TheoremId::kCor31: return "COR31";
  }
  return "?";
}

std::string to_string(Overall overall) {
  switch (overall) {
    case Overall::kApplies: return "APPLIES";
    case Overall::kDoesNotApply: return "DOES_NOT_APPLY";
    case Overall::kInconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

double default_threshold(double s_at_ratio4) { return 1e3 * (1.0 + std::fabs(s_at_ratio4)); }

Verdict classify_limsup(std::span<const Sample> samples, const Policy& policy, double threshold) {
  if (samples.size() < std::max<std::size_t>(policy.min_samples, 2)) {
    return too_few(samples.size(), policy, threshold);
  }
  const auto w = windows(samples, policy, [](double a, double b) { return std::max(a, b); });
  Verdict v;
  v.evidence.running_max = w.running_end;
  v.evidence.running_min = windows(samples, policy, [](double a, double b) { return std::min(a, b); }).running_end;
  v.evidence.last_window_max = w.last;
  v.evidence.previous_window_max = w.prev;
  v.evidence.growth_factor = w.prev > 0.0 ? w.last / w.prev : (w.last > 0.0 ? kInf : 0.0);
  v.evidence.threshold = threshold;
  v.evidence.window = w.w;

  if (w.running_end > threshold && w.last >= policy.rho * std::max(w.prev, 0.0)) {
    v.kind = VerdictKind::kDiverges;
    v.note = "running max " + fmt(w.running_end) + " exceeds threshold " + fmt(threshold) +
             " and still grows by " + fmt(v.evidence.growth_factor) + "x per window";
    return v;
  }
  const double change = std::fabs(w.running_end - w.running_prev);
  const double scale = std::max(std::fabs(w.running_end), std::fabs(w.running_prev));
  if (w.running_end < threshold && change <= policy.stable_rel * scale) {
    v.kind = VerdictKind::kBounded;
    v.note = "running max settled at " + fmt(w.running_end) + " over the last window";
    return v;
  }
  v.note = "running max " + fmt(w.running_end) + " neither settled nor past the threshold " +
           fmt(threshold);
  return v;
}

Verdict classify_liminf(std::span<const Sample> samples, const Policy& policy, double threshold) {
  if (samples.size() < std::max<std::size_t>(policy.min_samples, 2)) {
    return too_few(samples.size(), policy, threshold);
  }
  const auto w = windows(samples, policy, [](double a, double b) { return std::min(a, b); });
  Verdict v;
  v.evidence.running_min = w.running_end;
  v.evidence.running_max = windows(samples, policy, [](double a, double b) { return std::max(a, b); }).running_end;
  v.evidence.threshold = threshold;
  v.evidence.window = w.w;
  v.evidence.growth_factor = w.prev < 0.0 ? w.last / w.prev : (w.last < 0.0 ? kInf : 0.0);

  if (w.running_end > -threshold &&
      w.running_end >= w.running_prev - policy.stable_rel * (1.0 + std::fabs(w.running_prev))) {
    v.kind = VerdictKind::kBoundedBelow;
    v.note = "running min settled at " + fmt(w.running_end);
    return v;
  }
  if (w.running_end < -threshold && w.last <= policy.rho * std::min(w.prev, 0.0)) {
    v.kind = VerdictKind::kUnboundedBelow;
    v.note = "running min " + fmt(w.running_end) + " below -threshold and still falling";
    return v;
  }
  v.note = "running min " + fmt(w.running_end) + " has not settled";
  return v;
}

double kamenev_transform(const quad::Integrand& f, double T, double alpha, double t,
                         std::span<const double> breakpoints, quad::Tolerance tol) {
  if (!(T > 0.0)) throw std::invalid_argument("kamenev_transform requires T > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("kamenev_transform requires alpha > 0");
  if (!(t > T)) throw std::invalid_argument("kamenev_transform requires t > T");
  const double scale = alpha * (alpha + 1.0) / std::pow(t, alpha + 1.0);
  if (alpha >= 1.0) {
    auto g = [&](double tau) { return std::pow(t - tau, alpha - 1.0) * f(tau); };
    return scale * quad::integrate_adaptive(g, T, t, tol, breakpoints).value;
  }
  // int_T^t (t-tau)^{alpha-1} f(tau) dtau = (1/alpha) int_0^{(t-T)^alpha} f(t - s^{1/alpha}) ds
  const double inv = 1.0 / alpha;
  auto g = [&](double s) { return f(t - std::pow(s, inv)); };
  std::vector<double> mapped;
  for (double b : breakpoints) {
    if (b > T && b < t) mapped.push_back(std::pow(t - b, alpha));
  }
  const double upper = std::pow(t - T, alpha);
  return scale * inv * quad::integrate_adaptive(g, 0.0, upper, tol, mapped).value;
}

CriterionOptions default_options(const coeffs::CoefficientModel& model) {
  CriterionOptions o;
  o.grid = GeometricGrid::starting_after(model.t0());
  return o;
}

namespace {

// Evaluates S on the grid up to the domain's horizon, stopping at the first
// evaluation error, then classifies the trajectory.
CriterionTrajectory run_trajectory(CriterionId id, std::optional<double> alpha,
                                   const std::function<double(double)>& S,
                                   const std::vector<double>& grid, double t0, const Domain& dom,
                                   const CriterionOptions& options, bool liminf) {
  CriterionTrajectory traj;
  traj.id = id;
  traj.alpha = alpha;
  if (!dom.warning.empty()) traj.warnings.push_back(to_string(id) + ": " + dom.warning);

  double threshold = 0.0;
  if (options.policy.threshold) {
    threshold = *options.policy.threshold;
  } else {
    try {
      threshold = default_threshold(S(t0 * std::pow(options.grid.ratio, 4)));
    } catch (const expr::EvalError& e) {
      traj.warnings.push_back(to_string(id) + ": threshold probe failed: " + e.what());
      threshold = 1e3;
    }
  }
  for (double t : grid) {
    if (t > dom.horizon) break;
    try {
      const double s = S(t);
      if (!std::isfinite(s)) throw expr::EvalError("non-finite functional value");
      traj.samples.push_back({t, s});
    } catch (const expr::EvalError& e) {
      traj.warnings.push_back(to_string(id) + ": evaluation stopped at t=" + fmt(t) + ": " + e.what());
      break;
    }
  }
  traj.verdict = liminf ? classify_liminf(traj.samples, options.policy, threshold)
                        : classify_limsup(traj.samples, options.policy, threshold);
  return traj;
}

// Running integral of f from t0 through the grid, as a trajectory.
CriterionTrajectory run_cumulative(CriterionId id, const quad::Integrand& f,
                                   const coeffs::CoefficientModel& model, const Domain& dom,
                                   const CriterionOptions& options, bool liminf,
                                   std::string label = {}) {
  CriterionTrajectory traj;
  traj.id = id;
  if (label.empty()) label = to_string(id);
  if (!dom.warning.empty()) traj.warnings.push_back(label + ": " + dom.warning);
  const double t0 = model.t0();

  double threshold = 0.0;
  if (options.policy.threshold) {
    threshold = *options.policy.threshold;
  } else {
    try {
      const double probe = t0 * std::pow(options.grid.ratio, 4);
      threshold = default_threshold(
          quad::integrate_adaptive(f, t0, probe, options.tol, dom.breakpoints).value);
    } catch (const expr::EvalError& e) {
      traj.warnings.push_back(label + ": threshold probe failed: " + e.what());
      threshold = 1e3;
    }
  }
  double running = 0.0;
  double prev = t0;
  for (double t : options.grid.points()) {
    if (t > dom.horizon) break;
    if (t < prev) continue;
    try {
      const auto r = quad::integrate_adaptive(f, prev, t, options.tol, dom.breakpoints);
      traj.depth_capped = traj.depth_capped || r.depth_capped;
      running += r.value;
      if (!std::isfinite(running)) throw expr::EvalError("non-finite integral");
    } catch (const expr::EvalError& e) {
      traj.warnings.push_back(label + ": evaluation stopped at t=" + fmt(t) + ": " + e.what());
      break;
    }
    traj.samples.push_back({t, running});
    prev = t;
  }
  if (traj.depth_capped) traj.warnings.push_back(label + ": quadrature depth cap reached");
  traj.verdict = liminf ? classify_liminf(traj.samples, options.policy, threshold)
                        : classify_limsup(traj.samples, options.policy, threshold);
  return traj;
}

double grid_end(const CriterionOptions& options) {
  const auto pts = options.grid.points();
  return pts.empty() ? options.grid.t_start : pts.back();
}

double lazer_integrand(const coeffs::CoefficientModel& m, double tau) {
  const double q = m.q_at(tau);
  return m.r_at(tau) - kLazerConstant * std::pow(std::max(-q, 0.0), 1.5);
}

}  // namespace

CriterionTrajectory cumulative_d(const coeffs::CoefficientModel& model, CriterionId id,
                                 const CriterionOptions& options) {
  if (id != CriterionId::kThm32C && id != CriterionId::kThm33E) {
    throw std::invalid_argument("cumulative_d handles THM32C and THM33E only");
  }
  const Domain dom = scan_domain(d_dependencies(model), model.params(), model.t0(),
                                 grid_end(options), options.breakpoints);
  auto f = [&model](double tau) { return coeffs::d_effective(model, tau); };
  return run_cumulative(id, f, model, dom, options, id == CriterionId::kThm33E);
}

CriterionTrajectory criterion_lazer(const coeffs::CoefficientModel& model,
                                    const CriterionOptions& options) {
  const Domain dom = scan_domain({model.q(), model.r()}, model.params(), model.t0(),
                                 grid_end(options), options.breakpoints);
  auto f = [&model](double tau) { return lazer_integrand(model, tau); };
  auto traj = run_cumulative(CriterionId::kLazer, f, model, dom, options, false);
  const auto grid = coeffs::SampleGrid::jittered(model.t0(), grid_end(options), 1000);
  for (double t : grid.points) {
    if (model.p_at(t) != 0.0) {
      traj.warnings.push_back("LAZER: p is not identically zero (p(" + fmt(t) + ") = " +
                              fmt(model.p_at(t)) + "); the integral equals int D only when p = 0");
      break;
    }
  }
  return traj;
}

CriterionTrajectory criterion_kamenev(const coeffs::CoefficientModel& model, double alpha,
                                      CriterionId id, const CriterionOptions& options) {
  const double t0 = model.t0();
  std::vector<expr::Expr> deps;
  std::function<double(double, double)> integrand;  // (t, tau)
  double power = 0.0;                              // S = t^{-power} * int integrand
  switch (id) {
    case CriterionId::kThm31B:
    case CriterionId::kThm32D: {
      if (!(alpha > 0.0)) throw std::invalid_argument(to_string(id) + " requires alpha > 0");
      deps = with_p(d_dependencies(model), model);
      power = alpha + 1.0;
      const bool b = id == CriterionId::kThm31B;
      integrand = [&model, alpha, b](double t, double tau) {
        const double w = t - tau;
        const double pm = coeffs::p_minus(model, tau);
        const double penalty = b ? (alpha + 1.0) / 9.0 * pm * pm : (alpha + 1.0) * pm;
        return std::pow(w, alpha) * (w * coeffs::d_effective(model, tau) - penalty);
      };
      break;
    }
    case CriterionId::kThm33G:
      if (!(alpha > 1.0)) throw std::invalid_argument("THM33G requires alpha > 1");
      deps = d_dependencies(model);
      power = alpha;
      integrand = [&model, alpha](double t, double tau) {
        return std::pow(t - tau, alpha) * coeffs::d_effective(model, tau);
      };
      break;
    case CriterionId::kCor31:
      if (!(alpha > 1.0)) throw std::invalid_argument("COR31 requires alpha > 1");
      deps = {model.q(), model.r()};
      power = alpha;
      integrand = [&model, alpha](double t, double tau) {
        return std::pow(t - tau, alpha) * lazer_integrand(model, tau);
      };
      break;
    default:
      throw std::invalid_argument("criterion_kamenev handles THM31B, THM32D, THM33G and COR31");
  }

  const Domain dom = scan_domain(deps, model.params(), t0, grid_end(options), options.breakpoints);
  const bool grade = !is_integer(alpha);
  auto S = [&](double t) {
    std::vector<double> cuts;
    for (double p : dom.breakpoints) {
      if (p > t0 && p < t) cuts.push_back(p);
    }
    if (grade) add_grading(cuts, t0, t);
    auto f = [&](double tau) { return integrand(t, tau); };
    const auto r = quad::integrate_adaptive(f, t0, t, options.tol, cuts);
    return r.value / std::pow(t, power);
  };
  return run_trajectory(id, alpha, S, options.grid.points(), t0, dom, options, false);
}

IntegrabilityReport check_33f(const coeffs::SplitModel& split, const CriterionOptions& options) {
  IntegrabilityReport rep;
  const auto& model = split.base();
  const double t0 = model.t0();
  const double end = grid_end(options);
  const Domain dom = scan_domain({split.p_minus_1(), split.p_minus_2()}, model.params(), t0, end,
                                 options.breakpoints);
  auto f = [&split](double tau) { return std::fabs(split.p_minus_1_at(tau)); };
  rep.integral = run_cumulative(CriterionId::kThm33E, f, model, dom, options, false, "int |p_-1|");
  rep.warnings = rep.integral.warnings;
  rep.integrable = rep.integral.verdict.kind == VerdictKind::kBounded;

  // sup |p_{-,2}| early vs late on a log scale, including piece midpoints
  // so narrow features are not skipped.
  const double horizon = std::min(end, dom.horizon);
  auto grid = coeffs::SampleGrid::jittered(t0, horizon, 4000);
  grid.add_piece_midpoints(model, t0, horizon);
  const double split_point = t0 * std::pow(horizon / t0, 0.75);
  try {
    for (double t : grid.points) {
      double& sup = t < split_point ? rep.sup_early : rep.sup_late;
      sup = std::max(sup, std::fabs(split.p_minus_2_at(t)));
    }
    rep.bounded = std::isfinite(rep.sup_late) &&
                  rep.sup_late <= (1.0 + options.policy.stable_rel) * rep.sup_early + 1e-12;
  } catch (const expr::EvalError& e) {
    rep.warnings.push_back(std::string("p_minus_2 does not evaluate: ") + e.what());
    rep.bounded = false;
  }
  return rep;
}

namespace {

ConditionStatus from_limsup(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::kDiverges: return ConditionStatus::kEstablished;
    case VerdictKind::kBounded: return ConditionStatus::kRefuted;
    default: return ConditionStatus::kUndetermined;
  }
}

ConditionResult limsup_condition(const std::string& letter, CriterionTrajectory traj) {
  ConditionResult c;
  c.condition = letter;
  c.status = from_limsup(traj.verdict);
  c.detail = to_string(traj.id) + " " + to_string(traj.verdict.kind) + ": " + traj.verdict.note;
  c.trajectory = std::move(traj);
  return c;
}

ConditionResult sign_condition(const coeffs::CoefficientModel& model, double end) {
  auto grid = coeffs::SampleGrid::jittered(model.t0(), end, 2000);
  grid.add_piece_midpoints(model, model.t0(), std::min(end, model.t0() + 1e4));
  ConditionResult c;
  c.condition = "a";
  c.signs = coeffs::check_condition_a(model, grid);
  if (c.signs->holds()) {
    c.status = ConditionStatus::kEstablished;
    c.detail = "r > 0 and q <= 0 on " + std::to_string(grid.points.size()) + " samples";
  } else {
    c.status = ConditionStatus::kRefuted;
    const auto& bad = c.signs->r_positive.holds() ? c.signs->q_nonpositive : c.signs->r_positive;
    c.detail = bad.condition + " violated at t=" + fmt(bad.witness_t.value_or(0.0));
    if (!bad.note.empty()) c.detail += " (" + bad.note + ")";
  }
  return c;
}

ConditionResult p_zero_condition(const coeffs::CoefficientModel& model, double end) {
  auto grid = coeffs::SampleGrid::jittered(model.t0(), end, 2000);
  ConditionResult c;
  c.condition = "p=0";
  c.status = ConditionStatus::kEstablished;
  c.detail = "p vanishes on " + std::to_string(grid.points.size()) + " samples";
  for (double t : grid.points) {
    double v = 0.0;
    try {
      v = model.p_at(t);
    } catch (const expr::EvalError& e) {
      v = std::numeric_limits<double>::quiet_NaN();
    }
    if (v != 0.0) {
      c.status = ConditionStatus::kRefuted;
      c.detail = "p(" + fmt(t) + ") = " + fmt(v);
      break;
    }
  }
  return c;
}

}  // namespace

TheoremReport theorem_verdict(const coeffs::CoefficientModel& model, TheoremId theorem,
                              std::optional<double> alpha, const CriterionOptions& options,
                              const coeffs::SplitModel* split) {
  TheoremReport rep;
  rep.theorem = theorem;
  const double end = grid_end(options);
  auto need_alpha = [&](double lower) {
    if (!alpha || !(*alpha > lower)) {
      throw std::invalid_argument(to_string(theorem) + " requires alpha > " + fmt(lower));
    }
    rep.alpha = alpha;
    return *alpha;
  };

  switch (theorem) {
    case TheoremId::kThm31: {
      const double a = need_alpha(0.0);
      rep.conditions.push_back(sign_condition(model, end));
      rep.conditions.push_back(
          limsup_condition("b", criterion_kamenev(model, a, CriterionId::kThm31B, options)));
      break;
    }
    case TheoremId::kThm32: {
      const double a = need_alpha(0.0);
      rep.conditions.push_back(sign_condition(model, end));
      rep.conditions.push_back(limsup_condition("c", cumulative_d(model, CriterionId::kThm32C, options)));
      rep.conditions.push_back(
          limsup_condition("d", criterion_kamenev(model, a, CriterionId::kThm32D, options)));
      break;
    }
    case TheoremId::kThm33: {
      if (split == nullptr) throw std::invalid_argument("THM33 requires a split of p_-");
      const double a = need_alpha(1.0);
      rep.conditions.push_back(sign_condition(model, end));

      auto e = cumulative_d(model, CriterionId::kThm33E, options);
      ConditionResult ce;
      ce.condition = "e";
      ce.status = e.verdict.kind == VerdictKind::kBoundedBelow     ? ConditionStatus::kEstablished
                  : e.verdict.kind == VerdictKind::kUnboundedBelow ? ConditionStatus::kRefuted
                                                                   : ConditionStatus::kUndetermined;
      ce.detail = "THM33E " + to_string(e.verdict.kind) + ": " + e.verdict.note;
      ce.trajectory = std::move(e);
      rep.conditions.push_back(std::move(ce));

      auto f = check_33f(*split, options);
      ConditionResult cf;
      cf.condition = "f";
      if (f.integrable && f.bounded) {
        cf.status = ConditionStatus::kEstablished;
      } else if (f.integral.verdict.kind == VerdictKind::kDiverges) {
        cf.status = ConditionStatus::kRefuted;
      }
      cf.detail = std::string("int |p_-1| ") + to_string(f.integral.verdict.kind) + " (" +
                  f.integral.verdict.note + "); sup |p_-2| early " + fmt(f.sup_early) + ", late " +
                  fmt(f.sup_late) + (f.bounded ? " (stable)" : " (not stable)");
      for (const auto& w : f.warnings) rep.warnings.push_back(w);
      f.integral.warnings.clear();
      cf.trajectory = std::move(f.integral);
      rep.conditions.push_back(std::move(cf));

      rep.conditions.push_back(
          limsup_condition("g", criterion_kamenev(model, a, CriterionId::kThm33G, options)));
      break;
    }
    case TheoremId::kLazer:
      rep.conditions.push_back(p_zero_condition(model, end));
      rep.conditions.push_back(sign_condition(model, end));
      rep.conditions.push_back(limsup_condition("integral", criterion_lazer(model, options)));
      break;
    case TheoremId::kCor31: {
      const double a = need_alpha(1.0);
      rep.conditions.push_back(p_zero_condition(model, end));
      rep.conditions.push_back(sign_condition(model, end));
      rep.conditions.push_back(
          limsup_condition("weighted", criterion_kamenev(model, a, CriterionId::kCor31, options)));
      break;
    }
  }

  bool all = true;
  bool refuted = false;
  for (const auto& c : rep.conditions) {
    all = all && c.status == ConditionStatus::kEstablished;
    refuted = refuted || c.status == ConditionStatus::kRefuted;
    if (c.trajectory) {
      for (const auto& w : c.trajectory->warnings) rep.warnings.push_back(w);
    }
  }
  rep.overall = refuted ? Overall::kDoesNotApply : all ? Overall::kApplies : Overall::kInconclusive;
  return rep;
}

}  // namespace oscrit::kamenev
