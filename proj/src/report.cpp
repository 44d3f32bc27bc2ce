#include "oscrit/report.hpp"

#include <charconv>
#include <cmath>

namespace oscrit::report {

namespace {

// JSON has no infinities; they appear in growth factors.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json optional_num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json check_json(const coeffs::ConditionCheck& c) {
  Json j;
  j["condition"] = c.condition;
  j["status"] = c.holds() ? "HOLDS_ON_SAMPLES" : "VIOLATED";
  j["witness_t"] = optional_num(c.witness_t);
  j["witness_value"] = optional_num(c.witness_value);
  if (!c.note.empty()) j["note"] = c.note;
  j["samples"] = c.samples;
  return j;
}

Json trajectory_json(const kamenev::CriterionTrajectory& t) {
  Json j;
  j["criterion_id"] = kamenev::to_string(t.id);
  j["alpha"] = optional_num(t.alpha);
  j["verdict"] = report::to_json(t.verdict);
  j["samples"] = t.samples.size();
  if (!t.samples.empty()) {
    j["first"] = Json::array({num(t.samples.front().t), num(t.samples.front().s)});
    j["last"] = Json::array({num(t.samples.back().t), num(t.samples.back().s)});
  }
  j["depth_capped"] = t.depth_capped;
  return j;
}

}  // namespace

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json to_json(const kamenev::Verdict& v) {
  Json j;
  j["kind"] = kamenev::to_string(v.kind);
  Json e;
  e["running_max"] = num(v.evidence.running_max);
  e["running_min"] = num(v.evidence.running_min);
  e["last_window_max"] = num(v.evidence.last_window_max);
  e["previous_window_max"] = num(v.evidence.previous_window_max);
  e["growth_factor"] = num(v.evidence.growth_factor);
  e["threshold"] = num(v.evidence.threshold);
  e["window"] = v.evidence.window;
  j["evidence"] = e;
  j["note"] = v.note;
  return j;
}

Json to_json(const coeffs::SignReport& s) {
  Json j;
  j["basis"] = "sample-based";
  j["r_positive"] = check_json(s.r_positive);
  j["q_nonpositive"] = check_json(s.q_nonpositive);
  return j;
}

Json to_json(const kamenev::TheoremReport& r) {
  Json j;
  j["theorem"] = kamenev::to_string(r.theorem);
  j["alpha"] = optional_num(r.alpha);
  j["overall"] = kamenev::to_string(r.overall);
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    Json cj;
    cj["condition"] = c.condition;
    cj["status"] = kamenev::to_string(c.status);
    cj["detail"] = c.detail;
    if (c.trajectory) cj["trajectory"] = trajectory_json(*c.trajectory);
    if (c.signs) cj["signs"] = to_json(*c.signs);
    conds.push_back(cj);
  }
  j["conditions"] = conds;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const kamenev::Policy& p) {
  Json j;
  j["threshold"] = p.threshold ? num(*p.threshold) : Json("auto: 1e3*(1+|S(t0*ratio^4)|)");
  j["rho"] = p.rho;
  j["window_fraction"] = p.window_fraction;
  j["stable_rel"] = p.stable_rel;
  j["min_samples"] = p.min_samples;
  return j;
}

Json to_json(const ode::Controls& c) {
  Json j;
  j["rel_tol"] = c.rel_tol;
  j["abs_tol"] = c.abs_tol;
  j["h_max"] = c.h_max;
  j["zero_tol"] = c.zero_tol;
  j["renormalize"] = c.renormalize;
  return j;
}

Json to_json(const ode::OscillationReport& r) {
  Json j;
  j["t0"] = r.t0;
  j["t_max"] = r.t_max;
  j["n_random"] = r.n_random;
  j["seed"] = r.seed;
  j["tail_fraction"] = r.classify.tail_fraction;
  j["min_zeros"] = r.classify.min_zeros;
  Json sols = Json::array();
  for (const auto& s : r.solutions) {
    Json sj;
    sj["label"] = s.label;
    sj["initial"] = Json::array({num(s.initial[0]), num(s.initial[1]), num(s.initial[2])});
    sj["zero_count"] = s.zero_count;
    sj["last_zero"] = optional_num(s.last_zero);
    sj["tail_spacing"] = optional_num(s.tail_spacing);
    sj["classification"] = ode::to_string(s.classification);
    sj["status"] = ode::to_string(s.status);
    sj["t_end"] = num(s.t_end);
    sj["steps"] = s.steps;
    sj["warnings"] = s.warnings;
    sols.push_back(sj);
  }
  j["solutions"] = sols;
  j["overall"] = r.has_oscillatory_evidence ? "HAS_OSCILLATORY_EVIDENCE" : "NO_OSCILLATORY_EVIDENCE";
  return j;
}

Json to_json(const riccati::ComparisonReport& r) {
  Json j;
  j["variant"] = riccati::to_string(r.variant);
  j["gamma"] = num(r.gamma);
  j["preconditions_ok"] = r.preconditions_ok();
  j["precondition_violations"] = r.precondition_violations;
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["ordering_ok"] = r.ordering_ok;
  if (r.first_violation) {
    const auto& v = *r.first_violation;
    j["first_violation"] = {{"t", num(v.t)}, {"y1", num(v.y1)}, {"y2", num(v.y2)}};
  } else {
    j["first_violation"] = nullptr;
  }
  double min_h = r.trace.empty() ? 0.0 : r.trace.front().hypothesis;
  double min_gap = r.trace.empty() ? 0.0 : r.trace.front().y1 - r.trace.front().y2;
  for (const auto& s : r.trace) {
    min_h = std::min(min_h, s.hypothesis);
    min_gap = std::min(min_gap, s.y1 - s.y2);
  }
  j["min_hypothesis"] = num(min_h);
  j["min_y1_minus_y2"] = num(min_gap);
  j["t_end"] = num(r.t_end);
  j["termination"] = r.termination.empty() ? Json("REACHED_END") : Json(r.termination);
  j["samples"] = r.trace.size();
  return j;
}

void write_trajectories_csv(std::ostream& os, std::span<const kamenev::TheoremReport> reports) {
  os << "t,S,criterion_id,alpha\r\n";
  for (const auto& r : reports) {
    for (const auto& c : r.conditions) {
      if (!c.trajectory) continue;
      const auto& tr = *c.trajectory;
      // The (f) integral is not a criterion functional; label it explicitly.
      const std::string id = r.theorem == kamenev::TheoremId::kThm33 && c.condition == "f"
                                 ? "THM33F_INT_ABS_P1"
                                 : kamenev::to_string(tr.id);
      const std::string alpha = tr.alpha ? number(*tr.alpha) : "";
      for (const auto& s : tr.samples) {
        os << number(s.t) << ',' << number(s.s) << ',' << csv_field(id) << ',' << alpha << "\r\n";
      }
    }
  }
}

}  // namespace oscrit::report
