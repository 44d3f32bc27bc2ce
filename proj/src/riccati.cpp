#include "oscrit/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oscrit/rk45.hpp"

namespace oscrit::riccati {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

// Generic adaptive driver for small systems. `accept` sees each accepted
// state and may stop the integration by returning a message.
template <std::size_t N, class F, class Accept>
std::string drive(F&& rhs, double t0, rk45::Vec<N> y, double t_max, const Controls& c,
                  std::span<const double> stops, Accept&& accept) {
  std::vector<double> targets;
  for (double s : stops) {
    if (s > t0 && s < t_max) targets.push_back(s);
  }
  targets.push_back(t_max);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  double t = t0;
  auto k1 = rhs(t, y);
  double h = std::min(c.h_max, 1e-3);
  std::size_t idx = 0;
  while (t < t_max) {
    const double target = targets[idx];
    double hh = std::min(h, c.h_max);
    bool land = false;
    if (t + 1.0001 * hh >= target) {
      hh = target - t;
      land = true;
    }
    const double ulp = std::nextafter(std::fabs(t), HUGE_VAL) - std::fabs(t);
    if (!land && hh < 16.0 * ulp) return "step size underflow at t=" + fmt(t);
    const auto res = rk45::step<N>(rhs, t, y, k1, hh, c.rel_tol, c.abs_tol);
    if (res.error > 1.0) {
      h = rk45::next_step(hh, res.error, false);
      continue;
    }
    t = land ? target : t + hh;
    y = res.y;
    k1 = res.dy;
    const double proposed = rk45::next_step(hh, res.error, true);
    h = land ? std::max(h, proposed) : proposed;
    if (land) ++idx;
    std::string stop = accept(t, y);
    if (!stop.empty()) return stop;
  }
  return {};
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::kReachedEnd: return "REACHED_END";
    case Status::kBlowUp: return "BLOW_UP";
    case Status::kStepUnderflow: return "STEP_UNDERFLOW";
  }
  return "?";
}

std::string to_string(Variant v) { return v == Variant::kAsWritten ? "AS_WRITTEN" : "LINEARIZED"; }

RiccatiTrajectory solve_riccati1(const RiccatiProblem& prob, double t_max, const Controls& controls,
                                 std::span<const double> stops) {
  if (!(t_max > prob.t_start)) throw std::invalid_argument("t_max must exceed t_start");
  RiccatiTrajectory traj;
  traj.samples.push_back({prob.t_start, prob.y_start});
  auto rhs = [&prob](double t, const rk45::Vec<1>& y) -> rk45::Vec<1> {
    return {-(prob.f(t) * y[0] * y[0] + prob.g(t) * y[0] + prob.h(t))};
  };
  bool blew_up = false;
  const std::string stop = drive<1>(rhs, prob.t_start, {prob.y_start}, t_max, controls, stops,
                                    [&](double t, const rk45::Vec<1>& y) -> std::string {
                                      traj.samples.push_back({t, y[0]});
                                      if (!(std::fabs(y[0]) <= controls.blowup)) {
                                        blew_up = true;
                                        return "|y| exceeded " + fmt(controls.blowup) + " at t=" + fmt(t);
                                      }
                                      return {};
                                    });
  if (!stop.empty()) {
    traj.message = stop;
    if (blew_up) {
      traj.status = Status::kBlowUp;
      traj.escape_time = traj.samples.back().t;
    } else {
      // Steps collapse as the solution escapes; report that as a blow-up too.
      traj.status = Status::kStepUnderflow;
      traj.escape_time = traj.samples.back().t;
    }
  }
  return traj;
}

double sample_at(const RiccatiTrajectory& traj, double t) {
  const auto& s = traj.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const RiccatiSample& a, double v) { return a.t < v; });
  if (it == s.end() || it->t != t) throw std::invalid_argument("t=" + fmt(t) + " is not a sample");
  return it->y;
}

ResidualReport riccati2_residual(const coeffs::CoefficientModel& model,
                                 const ode::SolutionTrajectory& traj) {
  constexpr double kFloorLimit = 1e-8;
  const auto zeros = ode::count_zeros(traj);
  const double after = zeros.empty() ? -std::numeric_limits<double>::infinity() : zeros.back().t_hi;
  ResidualReport rep;
  rep.window_start = zeros.empty() ? traj.t_start : after;
  for (const auto& s : traj.samples) {
    if (s.t <= after) continue;
    const double phi = s.y[0];
    if (phi == 0.0) throw ZeroInWindow("phi vanishes at t=" + fmt(s.t) + " inside the window", s.t);
    const double a = s.y[1] / phi;
    const double b = s.y[2] / phi;
    const double c = s.y[3] / phi;
    const double y = a;
    const double dy = b - a * a;
    const double ddy = c - a * b - 2.0 * a * dy;
    const double p = model.p_at(s.t);
    const double q = model.q_at(s.t);
    const double r = model.r_at(s.t);
    const double res = ddy + (3.0 * y + p) * dy + y * y * y + p * y * y + q * y + r;
    // Next to the zero y is unbounded and the terms cancel below double
    // precision; the window opens once the rounding floor is small.
    if (rep.residual.empty()) {
      const double terms = std::fabs(ddy) + std::fabs((3.0 * y + p) * dy) + std::fabs(y * y * y) +
                           std::fabs(p * y * y) + std::fabs(q * y) + std::fabs(r);
      if (std::numeric_limits<double>::epsilon() * terms > kFloorLimit) {
        ++rep.skipped;
        continue;
      }
      rep.window_start = s.t;
    }
    rep.residual.emplace_back(s.t, res);
    rep.max_abs = std::max(rep.max_abs, std::fabs(res));
  }
  if (rep.residual.size() < 2) {
    const double where = zeros.empty() ? traj.t_end() : zeros.back().t_zero;
    throw ZeroInWindow("phi has a zero at t=" + fmt(where) + " leaving no nonvanishing tail", where);
  }
  rep.window_end = rep.residual.back().first;
  return rep;
}

double bernoulli_closed(double u_T1, double T1, const Fn& p_minus_fn, double t, quad::Tolerance tol) {
  if (!(u_T1 > 0.0)) throw std::invalid_argument("bernoulli_closed requires u(T1) > 0");
  if (t < T1) throw std::invalid_argument("bernoulli_closed requires t >= T1");
  if (t == T1) return u_T1;
  auto E = [&](double s) {
    if (s == T1) return 1.0;
    return std::exp(-quad::integrate_adaptive(p_minus_fn, T1, s, tol).value);
  };
  const double inner = quad::integrate_adaptive(E, T1, t, tol).value;
  return u_T1 * E(t) / (1.0 + 1.5 * u_T1 * inner);
}

ComparisonReport comparison_check(const RiccatiProblem& prob1, const RiccatiProblem& prob2,
                                  const EtaFunction& eta1, const EtaFunction& eta2, double gamma,
                                  double t_max, Variant variant, const Controls& controls) {
  const double t0 = prob1.t_start;
  if (prob2.t_start != t0) throw std::invalid_argument("both problems must start at the same t0");
  if (!(t_max > t0)) throw std::invalid_argument("t_max must exceed t0");
  ComparisonReport rep;
  rep.variant = variant;
  rep.gamma = gamma;

  // Preconditions, sampled.
  const auto grid = coeffs::SampleGrid::jittered(t0, t_max, 1000);
  std::vector<double> pts{t0};
  pts.insert(pts.end(), grid.points.begin(), grid.points.end());
  pts.push_back(t_max);
  auto first_failure = [&](const std::function<bool(double)>& ok) -> std::optional<double> {
    for (double t : pts) {
      if (!ok(t)) return t;
    }
    return std::nullopt;
  };
  if (auto w = first_failure([&](double t) { return prob1.f(t) >= 0.0; })) {
    rep.precondition_violations.push_back("f1 >= 0 fails at t=" + fmt(*w));
  }
  auto inequality = [&](const EtaFunction& eta, const RiccatiProblem& p, const std::string& name) {
    auto w = first_failure([&](double t) {
      const double e = eta.value(t);
      return eta.derivative(t) + p.f(t) * e * e + p.g(t) * e + p.h(t) >= -1e-9;
    });
    if (w) rep.precondition_violations.push_back(name + " violates its differential inequality at t=" + fmt(*w));
  };
  inequality(eta1, prob1, "eta1");
  inequality(eta2, prob2, "eta2");
  const double y20 = prob2.y_start;
  if (y20 > eta1.value(t0)) rep.precondition_violations.push_back("y2(t0) > eta1(t0)");
  if (y20 > eta2.value(t0)) rep.precondition_violations.push_back("y2(t0) > eta2(t0)");
  if (gamma < y20 || gamma > eta1.value(t0)) {
    rep.precondition_violations.push_back("gamma outside [y2(t0), eta1(t0)]");
  }

  // State: y1, y2, A = int [f1 (eta1 + eta2) + g1], I = int exp(A) * delta.
  const bool squared = variant == Variant::kAsWritten;
  auto rhs = [&](double t, const rk45::Vec<4>& s) -> rk45::Vec<4> {
    const double y1 = s[0];
    const double y2 = s[1];
    const double f1 = prob1.f(t), g1 = prob1.g(t), h1 = prob1.h(t);
    const double f2 = prob2.f(t), g2 = prob2.g(t), h2 = prob2.h(t);
    const double df = squared ? (f2 - f1) * (f2 - f1) : (f2 - f1);
    const double delta = df * y2 * y2 + (g2 - g1) * y2 + h2 - h1;
    return {-(f1 * y1 * y1 + g1 * y1 + h1), -(f2 * y2 * y2 + g2 * y2 + h2),
            f1 * (eta1.value(t) + eta2.value(t)) + g1, std::exp(s[2]) * delta};
  };

  rep.hypothesis_ok = true;
  rep.ordering_ok = true;
  auto record = [&](double t, const rk45::Vec<4>& s) {
    ComparisonSample cs{t, s[0], s[1], gamma - y20 + s[3]};
    rep.trace.push_back(cs);
    if (cs.hypothesis < -1e-9) rep.hypothesis_ok = false;
    if (cs.y1 < cs.y2 - std::max(1e-8, 1e-6 * std::fabs(cs.y2))) {
      if (rep.ordering_ok) rep.first_violation = cs;
      rep.ordering_ok = false;
    }
  };
  const rk45::Vec<4> start{gamma, y20, 0.0, 0.0};
  record(t0, start);
  rep.termination = drive<4>(rhs, t0, start, t_max, controls, {},
                             [&](double t, const rk45::Vec<4>& s) -> std::string {
                               record(t, s);
                               if (!(std::fabs(s[0]) <= controls.blowup) ||
                                   !(std::fabs(s[1]) <= controls.blowup)) {
                                 return "blow-up at t=" + fmt(t) + "; comparison window truncated";
                               }
                               return {};
                             });
  rep.t_end = rep.trace.back().t;
  return rep;
}

}  // namespace oscrit::riccati
