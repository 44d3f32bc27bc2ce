#include "oscrit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "oscrit/rk45.hpp"

namespace oscrit::ode {

namespace {

using State = rk45::Vec<3>;

constexpr double kRescaleHigh = 1e15;
constexpr double kRescaleLow = 1e-15;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double log_abs(double v, int scale_exp) { return std::log(std::fabs(v)) + scale_exp * std::log(2.0); }

std::vector<double> landing_points(const coeffs::CoefficientModel& model, double a, double b,
                                   std::span<const double> stops, std::vector<std::string>& warnings) {
  std::vector<double> pts;
  const std::vector<expr::Expr> exprs{model.p(), model.q(), model.r()};
  const bool any = std::any_of(exprs.begin(), exprs.end(),
                               [](const expr::Expr& e) { return e.has_breakpoints(); });
  if (any) {
    const auto scan = expr::scan_breakpoints(exprs, model.params(), a, b);
    pts = scan.points;
    if (scan.truncated) {
      warnings.push_back(scan.reason + "; steps beyond t=" + fmt(scan.resolved_until) +
                         " are not aligned with coefficient features");
    }
  }
  for (double s : stops) {
    if (s > a && s < b) pts.push_back(s);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kReachedEnd: return "REACHED_END";
    case Termination::kBlowUp: return "BLOW_UP";
    case Termination::kStepUnderflow: return "STEP_UNDERFLOW";
    case Termination::kEvalError: return "EVAL_ERROR";
    case Termination::kStepLimit: return "STEP_LIMIT";
  }
  return "?";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::kOscillatoryEvidence: return "OSCILLATORY_EVIDENCE";
    case Classification::kType21: return "TYPE_2_1";
    case Classification::kType32: return "TYPE_3_2";
    case Classification::kUnclassified: return "UNCLASSIFIED";
  }
  return "?";
}

SolutionTrajectory integrate_third_order(const coeffs::CoefficientModel& model, double t_start,
                                         const std::array<double, 3>& initial, double t_max,
                                         const Controls& controls, std::span<const double> stops) {
  if (!(t_max > t_start)) throw std::invalid_argument("t_max must exceed the start time");
  if (!(controls.rel_tol > 0.0) || !(controls.abs_tol > 0.0) || !(controls.h_max > 0.0)) {
    throw std::invalid_argument("tolerances and h_max must be positive");
  }
  SolutionTrajectory traj;
  traj.t_start = t_start;
  traj.initial = initial;
  const auto targets = landing_points(model, t_start, t_max, stops, traj.warnings);

  auto rhs = [&model](double t, const State& y) -> State {
    return {y[1], y[2], -model.p_at(t) * y[2] - model.q_at(t) * y[1] - model.r_at(t) * y[0]};
  };

  State y{initial[0], initial[1], initial[2]};
  int scale = 0;
  double t = t_start;
  auto record = [&](const State& dy) {
    traj.samples.push_back({t, {y[0], y[1], y[2], dy[2]}, scale});
  };

  try {
    State k1 = rhs(t, y);
    record(k1);
    std::size_t idx = 0;
    double piece_start = t_start;
    double h = std::min(controls.h_max, 1e-3);
    traj.stats.min_step = std::numeric_limits<double>::infinity();

    while (t < t_max) {
      if (traj.stats.accepted + traj.stats.rejected >= controls.max_steps) {
        traj.status = Termination::kStepLimit;
        traj.message = "step limit reached at t=" + fmt(t);
        break;
      }
      const double target = targets[idx];
      const double cap = std::min(controls.h_max, (target - piece_start) / 8.0);
      double hh = std::min(h, cap);
      bool land = false;
      if (t + 1.0001 * hh >= target) {
        hh = target - t;
        land = true;
      }
      const double ulp = std::nextafter(std::fabs(t), HUGE_VAL) - std::fabs(t);
      if (!land && hh < 16.0 * ulp) {
        traj.status = Termination::kStepUnderflow;
        traj.message = "step size underflow at t=" + fmt(t);
        break;
      }
      const auto res = rk45::step<3>(rhs, t, y, k1, hh, controls.rel_tol, controls.abs_tol);
      if (res.error > 1.0) {
        ++traj.stats.rejected;
        h = rk45::next_step(hh, res.error, false);
        continue;
      }
      t = land ? target : t + hh;
      y = res.y;
      k1 = res.dy;
      ++traj.stats.accepted;
      traj.stats.max_step = std::max(traj.stats.max_step, hh);
      traj.stats.min_step = std::min(traj.stats.min_step, hh);
      const double proposed = rk45::next_step(hh, res.error, true);
      h = land ? std::max(h, proposed) : proposed;
      if (land) {
        piece_start = target;
        ++idx;
      }

      const double m = std::max({std::fabs(y[0]), std::fabs(y[1]), std::fabs(y[2])});
      if (!std::isfinite(m)) {
        traj.status = Termination::kBlowUp;
        traj.message = "non-finite state at t=" + fmt(t);
        break;
      }
      if (m > kRescaleHigh || (m < kRescaleLow && m > 0.0)) {
        if (!controls.renormalize && m > kRescaleHigh) {
          record(k1);
          traj.status = Termination::kBlowUp;
          traj.message = "|state| exceeded 1e15 at t=" + fmt(t);
          break;
        }
        if (controls.renormalize) {
          const int e = std::ilogb(m);
          for (auto& v : y) v = std::ldexp(v, -e);
          for (auto& v : k1) v = std::ldexp(v, -e);
          scale += e;
          ++traj.stats.rescalings;
        }
      }
      record(k1);
    }
  } catch (const expr::EvalError& e) {
    traj.status = Termination::kEvalError;
    traj.message = "coefficient evaluation failed near t=" + fmt(t) + ": " + e.what();
  }
  if (traj.stats.accepted == 0) traj.stats.min_step = 0.0;
  return traj;
}

std::array<SolutionTrajectory, 3> fundamental_basis(const coeffs::CoefficientModel& model,
                                                    double t_max, const Controls& controls,
                                                    std::span<const double> stops) {
  const double t0 = model.t0();
  return {integrate_third_order(model, t0, {1, 0, 0}, t_max, controls, stops),
          integrate_third_order(model, t0, {0, 1, 0}, t_max, controls, stops),
          integrate_third_order(model, t0, {0, 0, 1}, t_max, controls, stops)};
}

SignedLog wronskian(const std::array<SolutionTrajectory, 3>& basis, double t) {
  double m[3][3];
  int scale = 0;
  for (int j = 0; j < 3; ++j) {
    const auto& s = basis[j].samples;
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const TrajSample& a, double v) { return a.t < v; });
    if (it == s.end() || it->t != t) {
      throw std::invalid_argument("wronskian: t=" + fmt(t) + " is not a sample of every solution");
    }
    for (int i = 0; i < 3; ++i) m[i][j] = it->y[i];
    scale += it->scale_exp;
  }
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (det == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
  return {sign_of(det), log_abs(det, scale)};
}

SignedLog tracked_wronskian(const coeffs::CoefficientModel& model, double t1, const Controls& controls) {
  const double t0 = model.t0();
  if (!(t1 > t0)) throw std::invalid_argument("tracked_wronskian requires t1 > t0");
  std::vector<std::string> ignored;
  const auto targets = landing_points(model, t0, t1, {}, ignored);
  using Frame = rk45::Vec<9>;  // column j in entries 3j..3j+2
  auto rhs = [&model](double t, const Frame& y) -> Frame {
    const double p = model.p_at(t), q = model.q_at(t), r = model.r_at(t);
    Frame d{};
    for (int j = 0; j < 3; ++j) {
      d[3 * j] = y[3 * j + 1];
      d[3 * j + 1] = y[3 * j + 2];
      d[3 * j + 2] = -p * y[3 * j + 2] - q * y[3 * j + 1] - r * y[3 * j];
    }
    return d;
  };
  Frame y{1, 0, 0, 0, 1, 0, 0, 0, 1};
  double log_r = 0.0;
  // Modified Gram-Schmidt; the frame stays orthonormal and log|det| moves
  // into log_r.
  auto orthonormalise = [&]() {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < j; ++k) {
        double dot = 0.0;
        for (int i = 0; i < 3; ++i) dot += y[3 * k + i] * y[3 * j + i];
        for (int i = 0; i < 3; ++i) y[3 * j + i] -= dot * y[3 * k + i];
      }
      double n = 0.0;
      for (int i = 0; i < 3; ++i) n += y[3 * j + i] * y[3 * j + i];
      n = std::sqrt(n);
      if (!(n > 0.0) || !std::isfinite(n)) throw std::runtime_error("basis degenerated");
      for (int i = 0; i < 3; ++i) y[3 * j + i] /= n;
      log_r += std::log(n);
    }
  };

  double t = t0;
  Frame k1 = rhs(t, y);
  double h = std::min(controls.h_max, 1e-3);
  double piece_start = t0;
  std::size_t idx = 0;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > controls.max_steps) throw std::runtime_error("tracked_wronskian: step limit");
    const double target = targets[idx];
    double hh = std::min(h, std::min(controls.h_max, (target - piece_start) / 8.0));
    bool land = false;
    if (t + 1.0001 * hh >= target) {
      hh = target - t;
      land = true;
    }
    const double ulp = std::nextafter(std::fabs(t), HUGE_VAL) - std::fabs(t);
    if (!land && hh < 16.0 * ulp) throw std::runtime_error("tracked_wronskian: step size underflow at t=" + fmt(t));
    const auto res = rk45::step<9>(rhs, t, y, k1, hh, controls.rel_tol, controls.abs_tol);
    if (res.error > 1.0) {
      h = rk45::next_step(hh, res.error, false);
      continue;
    }
    t = land ? target : t + hh;
    y = res.y;
    const double proposed = rk45::next_step(hh, res.error, true);
    h = land ? std::max(h, proposed) : proposed;
    if (land) {
      piece_start = target;
      ++idx;
    }
    orthonormalise();
    k1 = rhs(t, y);
  }
  const double det = y[0] * (y[4] * y[8] - y[7] * y[5]) - y[3] * (y[1] * y[8] - y[7] * y[2]) +
                     y[6] * (y[1] * y[5] - y[4] * y[2]);
  return {sign_of(det), log_r + std::log(std::fabs(det))};
}

double interpolate_phi(const TrajSample& a, const TrajSample& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double k = std::ldexp(1.0, b.scale_exp - a.scale_exp);
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double h3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h5 = 0.5 * (s3 - 2 * s4 + s5);
  return a.y[0] * h0 + h * a.y[1] * h1 + h * h * a.y[2] * h2 +
         k * (b.y[0] * h3 + h * b.y[1] * h4 + h * h * b.y[2] * h5);
}

std::vector<ZeroRecord> count_zeros(const SolutionTrajectory& traj, double zero_tol) {
  std::vector<ZeroRecord> zeros;
  const auto& s = traj.samples;
  std::size_t last = s.size();  // index of the last sample with phi != 0
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].y[0] == 0.0) continue;
    if (last < s.size() && sign_of(s[i].y[0]) != sign_of(s[last].y[0])) {
      ZeroRecord z;
      if (last + 1 == i) {
        double lo = s[last].t;
        double hi = s[i].t;
        const double lo_sign = sign_of(s[last].y[0]);
        while (hi - lo > zero_tol) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double v = interpolate_phi(s[last], s[i], mid);
          if (v == 0.0) {
            lo = hi = mid;
            break;
          }
          (sign_of(v) == lo_sign ? lo : hi) = mid;
        }
        z.t_lo = lo;
        z.t_hi = hi;
        z.t_zero = 0.5 * (lo + hi);
        z.refined = hi - lo <= zero_tol;
      } else {
        // phi vanished exactly at the intermediate sample(s).
        z.t_lo = s[last].t;
        z.t_hi = s[i].t;
        z.t_zero = s[last + 1].t;
      }
      zeros.push_back(z);
    }
    last = i;
  }
  return zeros;
}

Classification classify_tail(const SolutionTrajectory& traj, const ClassifyOptions& options,
                                std::span<const ZeroRecord> zeros_in) {
  std::vector<ZeroRecord> own;
  std::span<const ZeroRecord> zeros = zeros_in;
  if (zeros.empty()) {
    own = count_zeros(traj);
    zeros = own;
  }
  if (traj.samples.size() < 2) return Classification::kUnclassified;
  const double t_end = traj.t_end();
  const double tail_start = t_end - options.tail_fraction * (t_end - traj.t_start);

  if (zeros.size() >= options.min_zeros) {
    const double last = zeros.back().t_zero;
    if (last >= tail_start && last >= t_end / 10.0) return Classification::kOscillatoryEvidence;
  }
  if (!zeros.empty() && zeros.back().t_hi > tail_start) return Classification::kUnclassified;

  const auto& s = traj.samples;
  auto first = std::lower_bound(s.begin(), s.end(), tail_start,
                                [](const TrajSample& a, double v) { return a.t < v; });
  if (first == s.end() || std::distance(first, s.end()) < 2) return Classification::kUnclassified;

  bool type21 = true;
  bool type32 = true;
  const double orient = sign_of(first->y[0]);
  for (auto it = first; it != s.end(); ++it) {
    const double sp = sign_of(it->y[0]);
    const double sd = sign_of(it->y[1]);
    const double sdd = sign_of(it->y[2]);
    if (sp == 0.0 || sd != -sp || sdd != sp) type21 = false;
    if (orient == 0.0 || orient * it->y[0] <= 0.0 || orient * it->y[1] < 0.0) type32 = false;
    if (!type21 && !type32) break;
  }
  if (type21) {
    const auto& a = *first;
    const auto& b = s.back();
    const bool decreasing = log_abs(b.y[1], b.scale_exp) < log_abs(a.y[1], a.scale_exp) &&
                            log_abs(b.y[2], b.scale_exp) < log_abs(a.y[2], a.scale_exp);
    if (decreasing) return Classification::kType21;
  }
  if (type32) return Classification::kType32;
  return Classification::kUnclassified;
}

SolutionSummary summarize(const SolutionTrajectory& traj, std::string label, double zero_tol,
                          const ClassifyOptions& options) {
  SolutionSummary out;
  out.label = std::move(label);
  out.initial = traj.initial;
  out.status = traj.status;
  out.t_end = traj.t_end();
  out.steps = traj.stats.accepted;
  out.warnings = traj.warnings;
  if (traj.truncated()) out.warnings.push_back(traj.message);
  const auto zeros = count_zeros(traj, zero_tol);
  out.zero_count = zeros.size();
  if (!zeros.empty()) out.last_zero = zeros.back().t_zero;
  if (zeros.size() >= 2) {
    const std::size_t n = std::min<std::size_t>(5, zeros.size() - 1);
    out.tail_spacing = (zeros.back().t_zero - zeros[zeros.size() - 1 - n].t_zero) / n;
  }
  out.classification = zeros.empty() ? classify_tail(traj, options)
                                     : classify_tail(traj, options, zeros);
  return out;
}

OscillationReport oscillation_report(const coeffs::CoefficientModel& model, double t_max,
                                     int n_random, std::uint64_t seed, const Controls& controls,
                                     const ClassifyOptions& classify) {
  if (n_random < 1) throw std::invalid_argument("oscillation_report needs at least one random combination");
  OscillationReport rep;
  rep.t0 = model.t0();
  rep.t_max = t_max;
  rep.n_random = n_random;
  rep.seed = seed;
  rep.controls = controls;
  rep.classify = classify;

  std::vector<std::pair<std::string, std::array<double, 3>>> initial{
      {"basis e1", {1, 0, 0}}, {"basis e2", {0, 1, 0}}, {"basis e3", {0, 0, 1}}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < n_random; ++k) {
    std::array<double, 3> v{};
    double norm = 0.0;
    while (norm == 0.0) {
      for (auto& x : v) x = normal(rng);
      norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    for (auto& x : v) x /= norm;
    initial.emplace_back("random " + std::to_string(k + 1), v);
  }
  for (const auto& [label, y0] : initial) {
    const auto traj = integrate_third_order(model, rep.t0, y0, t_max, controls);
    rep.solutions.push_back(summarize(traj, label, controls.zero_tol, classify));
    if (rep.solutions.back().classification == Classification::kOscillatoryEvidence) {
      rep.has_oscillatory_evidence = true;
    }
  }
  return rep;
}

}  // namespace oscrit::ode
