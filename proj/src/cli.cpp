#include "oscrit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "oscrit/fixtures.hpp"
#include "oscrit/kamenev.hpp"
#include "oscrit/ode.hpp"
#include "oscrit/report.hpp"
#include "oscrit/riccati.hpp"

namespace oscrit::cli {

namespace {

using report::Json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coefficient model arguments shared by check, verify and sweep.
struct ModelArgs {
  std::string fixture;
  std::optional<std::string> p, q, r, d_declared, split_p1, split_p2;
  std::vector<std::string> params;
  std::optional<double> t0;

  void add(CLI::App& app) {
    app.add_option("--fixture", fixture, "Built-in model: lazer, example31, example32");
    app.add_option("--p", p, "Coefficient p(t)");
    app.add_option("--q", q, "Coefficient q(t)");
    app.add_option("--r", r, "Coefficient r(t)");
    app.add_option("--param", params, "Parameter binding name=value (repeatable)");
    app.add_option("--t0", t0, "Left endpoint t0 > 0");
    app.add_option("--d-declared", d_declared,
                   "Minimum function D(t) to use instead of the closed form");
    app.add_option("--split-p1", split_p1, "p_-,1 for the splitting p_- = p_-,1 + p_-,2");
    app.add_option("--split-p2", split_p2, "p_-,2 for the splitting");
  }
};

struct ResolvedModel {
  std::string p, q, r;
  expr::ParamMap params;
  double t0 = 1.0;
  std::optional<std::string> d_declared, split_p1, split_p2;
  std::optional<double> fixture_alpha;
};

expr::ParamMap parse_params(const std::vector<std::string>& bindings) {
  expr::ParamMap out;
  for (const auto& b : bindings) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value, got '" + b + "'");
    const std::string name = b.substr(0, eq);
    const std::string value = b.substr(eq + 1);
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(v)) {
      throw ConfigError("--param " + name + ": '" + value + "' is not a finite number");
    }
    out[name] = v;
  }
  return out;
}

ResolvedModel resolve(const ModelArgs& a) {
  ResolvedModel m;
  if (!a.fixture.empty()) {
    if (a.p || a.q || a.r) throw ConfigError("use either --fixture or explicit --p/--q/--r, not both");
    const auto& f = fixtures::get(a.fixture);
    m.p = f.p;
    m.q = f.q;
    m.r = f.r;
    m.params = f.params;
    m.t0 = f.t0;
    m.d_declared = f.declared_d;
    m.split_p1 = f.split_p1;
    m.split_p2 = f.split_p2;
    m.fixture_alpha = f.alpha;
  } else {
    if (!a.r) throw ConfigError("--r (or --fixture) is required");
    m.p = a.p.value_or("0");
    m.q = a.q.value_or("0");
    m.r = *a.r;
  }
  for (const auto& [k, v] : parse_params(a.params)) m.params[k] = v;
  if (a.t0) m.t0 = *a.t0;
  if (a.d_declared) m.d_declared = a.d_declared;
  if (a.split_p1) m.split_p1 = a.split_p1;
  if (a.split_p2) m.split_p2 = a.split_p2;
  return m;
}

Json echo(const ResolvedModel& m, const std::string& fixture) {
  Json j;
  j["fixture"] = fixture.empty() ? Json(nullptr) : Json(fixture);
  j["p"] = m.p;
  j["q"] = m.q;
  j["r"] = m.r;
  Json params = Json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  j["params"] = params;
  j["t0"] = m.t0;
  j["d_declared"] = m.d_declared ? Json(*m.d_declared) : Json(nullptr);
  j["split_p1"] = m.split_p1 ? Json(*m.split_p1) : Json(nullptr);
  j["split_p2"] = m.split_p2 ? Json(*m.split_p2) : Json(nullptr);
  return j;
}

coeffs::CoefficientModel build(const ResolvedModel& m) {
  return coeffs::build_model(m.p, m.q, m.r, m.params, m.t0, m.d_declared);
}

// Criterion settings shared by check and sweep.
struct CriterionArgs {
  std::vector<double> alpha;
  std::vector<std::string> theorems{"all"};
  double ratio = 1.15;
  int count = 120;
  std::optional<double> theta;
  double rho = 2.0;
  double quad_tol = 1e-9;

  void add(CLI::App& app, const std::string& default_theorems) {
    theorems = {default_theorems};
    app.add_option("--alpha", alpha, "Kamenev exponent(s), comma separated")->delimiter(',');
    app.add_option("--theorem", theorems, "all or a list of lazer,thm31,thm32,thm33,cor31")
        ->delimiter(',');
    app.add_option("--ratio", ratio, "Geometric grid ratio")->capture_default_str();
    app.add_option("--count", count, "Geometric grid size")->capture_default_str();
    app.add_option("--theta", theta, "Divergence threshold (default 1e3*(1+|S(t0*ratio^4)|))");
    app.add_option("--rho", rho, "Required growth factor per window")->capture_default_str();
    app.add_option("--quad-tol", quad_tol, "Quadrature tolerance (abs and rel)")->capture_default_str();
  }
};

std::vector<kamenev::TheoremId> theorem_list(const std::vector<std::string>& names) {
  using kamenev::TheoremId;
  std::vector<TheoremId> out;
  auto add = [&](TheoremId id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  std::vector<std::string> split;
  for (const auto& entry : names) {
    std::stringstream ss(entry);
    std::string item;
    while (std::getline(ss, item, ',')) split.push_back(item);
  }
  for (auto n : split) {
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "all") {
      for (auto id : {TheoremId::kLazer, TheoremId::kThm31, TheoremId::kThm32, TheoremId::kThm33,
                      TheoremId::kCor31}) {
        add(id);
      }
    } else if (n == "lazer") {
      add(TheoremId::kLazer);
    } else if (n == "thm31") {
      add(TheoremId::kThm31);
    } else if (n == "thm32") {
      add(TheoremId::kThm32);
    } else if (n == "thm33") {
      add(TheoremId::kThm33);
    } else if (n == "cor31") {
      add(TheoremId::kCor31);
    } else {
      throw ConfigError("unknown theorem '" + n + "'");
    }
  }
  if (out.empty()) throw ConfigError("no theorem selected");
  return out;
}

kamenev::CriterionOptions criterion_options(const coeffs::CoefficientModel& model,
                                            const CriterionArgs& a) {
  if (!(a.ratio > 1.0)) throw ConfigError("--ratio must exceed 1");
  if (a.count < 16) throw ConfigError("--count must be at least 16");
  if (!(a.rho > 1.0)) throw ConfigError("--rho must exceed 1");
  if (!(a.quad_tol > 0.0)) throw ConfigError("--quad-tol must be positive");
  if (a.theta && !(*a.theta > 0.0)) throw ConfigError("--theta must be positive");
  auto o = kamenev::default_options(model);
  o.grid = kamenev::GeometricGrid::starting_after(model.t0(), a.ratio, a.count);
  o.policy.threshold = a.theta;
  o.policy.rho = a.rho;
  o.tol = quad::Tolerance(a.quad_tol);
  return o;
}

std::vector<double> alphas_for(const CriterionArgs& a, const ResolvedModel& m) {
  std::vector<double> out = a.alpha;
  if (out.empty()) out.push_back(m.fixture_alpha.value_or(1.0));
  for (double v : out) {
    if (!(v > 0.0)) throw ConfigError("--alpha values must be positive");
  }
  return out;
}

Json criterion_echo(const CriterionArgs& a, const std::vector<double>& alphas,
                    const std::vector<kamenev::TheoremId>& theorems,
                    const kamenev::CriterionOptions& o) {
  Json j;
  j["alpha"] = alphas;
  Json t = Json::array();
  for (auto id : theorems) t.push_back(kamenev::to_string(id));
  j["theorems"] = t;
  j["grid"] = {{"t_start", o.grid.t_start}, {"ratio", o.grid.ratio}, {"count", o.grid.count}};
  j["policy"] = report::to_json(o.policy);
  j["quad_tol"] = a.quad_tol;
  return j;
}

// Runs every requested theorem; THM33 and COR31 use the alphas above 1
// (falling back to 2).
std::vector<kamenev::TheoremReport> run_theorems(const coeffs::CoefficientModel& model,
                                                 const ResolvedModel& rm,
                                                 const std::vector<kamenev::TheoremId>& theorems,
                                                 const std::vector<double>& alphas,
                                                 const kamenev::CriterionOptions& o,
                                                 std::vector<std::string>& warnings) {
  using kamenev::TheoremId;
  std::vector<kamenev::TheoremReport> out;
  std::optional<coeffs::SplitModel> split;
  std::vector<double> big;
  for (double a : alphas) {
    if (a > 1.0) big.push_back(a);
  }
  for (auto id : theorems) {
    switch (id) {
      case TheoremId::kLazer:
        out.push_back(kamenev::theorem_verdict(model, id, std::nullopt, o));
        break;
      case TheoremId::kThm31:
      case TheoremId::kThm32:
        for (double a : alphas) out.push_back(kamenev::theorem_verdict(model, id, a, o));
        break;
      case TheoremId::kThm33:
      case TheoremId::kCor31: {
        if (big.empty()) {
          warnings.push_back(kamenev::to_string(id) + " needs alpha > 1; using alpha = 2");
          big.push_back(2.0);
        }
        if (id == TheoremId::kThm33 && !split) split = coeffs::make_split(model, rm.split_p1, rm.split_p2);
        for (double a : big) {
          out.push_back(kamenev::theorem_verdict(model, id, a, o, split ? &*split : nullptr));
        }
        break;
      }
    }
  }
  return out;
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

Json envelope(Json config) {
  Json j;
  j["config"] = std::move(config);
  return j;
}

// --- check ------------------------------------------------------------------

struct CheckCmd {
  ModelArgs model;
  CriterionArgs crit;
  std::string out_path, csv_path;

  int operator()(std::ostream& out) const {
    const auto rm = resolve(model);
    const auto m = build(rm);
    const auto theorems = theorem_list(crit.theorems);
    const auto alphas = alphas_for(crit, rm);
    const auto o = criterion_options(m, crit);

    Json config = {{"command", "check"}};
    const Json model_echo = echo(rm, model.fixture);
    for (const auto& [k, v] : model_echo.items()) config[k] = v;
    const Json crit_echo = criterion_echo(crit, alphas, theorems, o);
    for (const auto& [k, v] : crit_echo.items()) config[k] = v;

    std::vector<std::string> warnings;
    const auto reports = run_theorems(m, rm, theorems, alphas, o, warnings);

    Json j = envelope(config);
    Json tr = Json::array();
    for (const auto& r : reports) tr.push_back(report::to_json(r));
    j["theorem_reports"] = tr;
    j["trajectories_ref"] = csv_path.empty() ? Json(nullptr) : Json(csv_path);
    j["warnings"] = warnings;
    j["version"] = report::kVersion;
    if (!csv_path.empty()) {
      std::ofstream f(csv_path, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + csv_path);
      report::write_trajectories_csv(f, reports);
    }
    emit(j, out_path, out);
    return 0;
  }
};

// --- verify -----------------------------------------------------------------

struct OdeArgs {
  double t_max = 100.0;
  int combos = 5;
  std::uint64_t seed = 42;
  ode::Controls controls;
  double tail_fraction = 0.25;
  std::size_t min_zeros = 3;

  void add(CLI::App& app) {
    app.add_option("--tmax", t_max, "Integration horizon")->capture_default_str();
    app.add_option("--combos", combos, "Random unit combinations besides the basis")->capture_default_str();
    app.add_option("--seed", seed, "Seed for the combinations")->capture_default_str();
    app.add_option("--rtol", controls.rel_tol, "Relative tolerance")->capture_default_str();
    app.add_option("--atol", controls.abs_tol, "Absolute tolerance")->capture_default_str();
    app.add_option("--hmax", controls.h_max, "Maximum step")->capture_default_str();
    app.add_option("--zero-tol", controls.zero_tol, "Zero refinement width")->capture_default_str();
    app.add_option("--tail", tail_fraction, "Tail fraction examined by the classifier")->capture_default_str();
    app.add_option("--min-zeros", min_zeros, "Zeros required for oscillatory evidence")->capture_default_str();
  }

  void validate(double t0) const {
    if (!(t_max > t0)) throw ConfigError("--tmax must exceed t0");
    if (combos < 1) throw ConfigError("--combos must be at least 1");
    if (!(controls.rel_tol > 0.0) || !(controls.abs_tol > 0.0) || !(controls.h_max > 0.0) ||
        !(controls.zero_tol > 0.0)) {
      throw ConfigError("tolerances and --hmax must be positive");
    }
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) throw ConfigError("--tail must lie in (0, 1)");
  }
};

struct VerifyCmd {
  ModelArgs model;
  OdeArgs ode_args;
  std::string out_path;

  int operator()(std::ostream& out) const {
    const auto rm = resolve(model);
    const auto m = build(rm);
    ode_args.validate(rm.t0);
    Json config = {{"command", "verify"}};
    const Json model_echo = echo(rm, model.fixture);
    for (const auto& [k, v] : model_echo.items()) config[k] = v;
    config["t_max"] = ode_args.t_max;
    config["combos"] = ode_args.combos;
    config["seed"] = ode_args.seed;
    config["controls"] = report::to_json(ode_args.controls);

    ode::ClassifyOptions cls;
    cls.tail_fraction = ode_args.tail_fraction;
    cls.min_zeros = ode_args.min_zeros;
    const auto rep =
        ode::oscillation_report(m, ode_args.t_max, ode_args.combos, ode_args.seed, ode_args.controls, cls);
    Json j = envelope(config);
    j["oscillation_report"] = report::to_json(rep);
    Json warnings = Json::array();
    for (const auto& s : rep.solutions) {
      for (const auto& w : s.warnings) warnings.push_back(s.label + ": " + w);
    }
    j["warnings"] = warnings;
    j["version"] = report::kVersion;
    emit(j, out_path, out);
    return 0;
  }
};

// --- sweep ------------------------------------------------------------------

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--sweep expects name=start:stop:step");
  SweepAxis axis{spec.substr(0, eq), {}};
  std::vector<double> parts;
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--sweep " + axis.name + ": '" + item + "' is not a number");
    }
  }
  if (parts.size() != 3) throw ConfigError("--sweep expects name=start:stop:step");
  const double a = parts[0], b = parts[1], s = parts[2];
  if (!(s > 0.0) || b < a) throw ConfigError("--sweep needs start <= stop and step > 0");
  for (long k = 0;; ++k) {
    const double v = a + k * s;
    if (v > b + 1e-9 * s) break;
    axis.values.push_back(v);
    if (k > 100000) throw ConfigError("--sweep axis too long");
  }
  return axis;
}

struct SweepCmd {
  ModelArgs model;
  CriterionArgs crit;
  std::vector<std::string> axes_spec;
  double t_max = 0.0;
  int jobs = 1;
  std::string out_path;

  int operator()(std::ostream& out) const {
    const auto rm = resolve(model);
    if (axes_spec.empty()) throw ConfigError("--sweep is required");
    std::vector<SweepAxis> axes;
    for (const auto& s : axes_spec) axes.push_back(parse_axis(s));
    const auto theorems = theorem_list(crit.theorems);
    const auto alphas = alphas_for(crit, rm);
    if (jobs < 1) throw ConfigError("--jobs must be at least 1");
    // Validate the settings once on the unswept model.
    (void)criterion_options(build(rm), crit);

    std::vector<expr::ParamMap> points{{}};
    for (const auto& ax : axes) {
      std::vector<expr::ParamMap> next;
      for (const auto& pt : points) {
        for (double v : ax.values) {
          auto q = pt;
          q[ax.name] = v;
          next.push_back(q);
        }
      }
      points = std::move(next);
    }

    // Header: swept parameters, one column per theorem report, zeros, note.
    std::vector<std::string> columns;
    for (auto id : theorems) {
      if (id == kamenev::TheoremId::kLazer) {
        columns.push_back("lazer");
        continue;
      }
      bool big = id == kamenev::TheoremId::kThm33 || id == kamenev::TheoremId::kCor31;
      std::vector<double> as;
      for (double a : alphas) {
        if (!big || a > 1.0) as.push_back(a);
      }
      if (as.empty()) as.push_back(2.0);
      std::string base = kamenev::to_string(id);
      std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) { return std::tolower(c); });
      for (double a : as) columns.push_back(base + (as.size() > 1 || big ? "_alpha" + report::number(a) : ""));
    }

    std::vector<std::string> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        std::ostringstream row;
        for (const auto& ax : axes) row << report::number(points[i].at(ax.name)) << ',';
        std::string note;
        std::vector<std::string> verdicts(columns.size(), "ERROR");
        std::string zeros;
        try {
          ResolvedModel pm = rm;
          for (const auto& [k, v] : points[i]) pm.params[k] = v;
          const auto m = build(pm);
          const auto o = criterion_options(m, crit);
          std::vector<std::string> warnings;
          const auto reps = run_theorems(m, pm, theorems, alphas, o, warnings);
          for (std::size_t c = 0; c < reps.size() && c < verdicts.size(); ++c) {
            verdicts[c] = kamenev::to_string(reps[c].overall);
          }
          if (t_max > 0.0) {
            const auto traj = ode::integrate_third_order(m, m.t0(), {1.0, 0.0, 0.0}, t_max);
            zeros = std::to_string(ode::count_zeros(traj).size());
          }
        } catch (const std::exception& e) {
          note = e.what();
        }
        for (const auto& v : verdicts) row << v << ',';
        row << zeros << ',' << report::csv_field(note);
        rows[i] = row.str();
      }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    for (const auto& ax : axes) csv << report::csv_field(ax.name) << ',';
    for (const auto& c : columns) csv << c << ',';
    csv << "zeros,note\r\n";
    for (const auto& r : rows) csv << r << "\r\n";
    if (out_path.empty()) {
      out << csv.str();
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + out_path);
      f << csv.str();
    }
    return 0;
  }
};

// --- riccati ----------------------------------------------------------------

struct ComparisonCase {
  std::string f1, g1, h1, f2, g2, h2, eta1, eta2;
  double t0, y2, gamma, t_max;
};

const std::map<std::string, ComparisonCase>& comparison_cases() {
  static const std::map<std::string, ComparisonCase> cases{
      // prob1 = prob2: y = 1/(1+t), which also serves as both eta.
      {"identity", {"1", "0", "0", "1", "0", "0", "1/(1+t)", "1/(1+t)", 0.0, 1.0, 1.0, 10.0}},
      // y1' = 1, y2' = 0 from 0: y1 - y2 = t.
      {"linear", {"0", "0", "-1", "0", "0", "0", "t", "0", 0.0, 0.0, 0.0, 10.0}},
      // u' + 1.5u^2 - 3u = 0 against y' + 1.5y^2 - 3y + 1.5 = 0 (y = 1 from phi = e^t
      // for phi''' - 3 phi'' + 2 phi = 0).
      {"thm32", {"1.5", "-3", "0", "1.5", "-3", "1.5", "2", "2", 1.0, 1.0, 1.5, 5.0}},
  };
  return cases;
}

struct RiccatiCmd {
  std::string case_name = "identity";
  std::optional<std::string> f1, g1, h1, f2, g2, h2, eta1, eta2;
  std::optional<double> t0, y2, gamma, t_max;
  std::vector<std::string> params;
  std::string variant = "as-written";
  std::string out_path;

  int operator()(std::ostream& out) const {
    const auto it = comparison_cases().find(case_name);
    if (it == comparison_cases().end()) {
      throw ConfigError("unknown --case '" + case_name + "' (identity, linear, thm32)");
    }
    ComparisonCase c = it->second;
    auto pick = [](const std::optional<std::string>& o, std::string& slot) {
      if (o) slot = *o;
    };
    pick(f1, c.f1), pick(g1, c.g1), pick(h1, c.h1), pick(f2, c.f2), pick(g2, c.g2), pick(h2, c.h2);
    pick(eta1, c.eta1), pick(eta2, c.eta2);
    if (t0) c.t0 = *t0;
    if (y2) c.y2 = *y2;
    if (gamma) c.gamma = *gamma;
    if (t_max) c.t_max = *t_max;
    riccati::Variant v;
    if (variant == "as-written") {
      v = riccati::Variant::kAsWritten;
    } else if (variant == "linearized") {
      v = riccati::Variant::kLinearized;
    } else {
      throw ConfigError("--variant must be as-written or linearized");
    }
    if (!(c.t_max > c.t0)) throw ConfigError("--tmax must exceed --t-start");
    const auto pm = parse_params(params);

    auto fn = [&pm](const std::string& src) -> riccati::Fn {
      auto compiled = std::make_shared<expr::Compiled>(expr::parse(src, pm), pm);
      return [compiled](double t) { return (*compiled)(t); };
    };
    auto eta = [&](const std::string& src) {
      const auto e = expr::parse(src, pm);
      auto val = std::make_shared<expr::Compiled>(e, pm);
      auto der = std::make_shared<expr::Compiled>(expr::differentiate(e), pm);
      return riccati::EtaFunction{[val](double t) { return (*val)(t); },
                                  [der](double t) { return (*der)(t); }};
    };
    riccati::RiccatiProblem p1{fn(c.f1), fn(c.g1), fn(c.h1), c.t0, c.gamma};
    riccati::RiccatiProblem p2{fn(c.f2), fn(c.g2), fn(c.h2), c.t0, c.y2};

    Json config;
    config["command"] = "riccati";
    config["case"] = case_name;
    config["prob1"] = {{"f", c.f1}, {"g", c.g1}, {"h", c.h1}};
    config["prob2"] = {{"f", c.f2}, {"g", c.g2}, {"h", c.h2}, {"y_start", c.y2}};
    config["eta1"] = c.eta1;
    config["eta2"] = c.eta2;
    Json params_json = Json::object();
    for (const auto& [k, val] : pm) params_json[k] = val;
    config["params"] = params_json;
    config["t_start"] = c.t0;
    config["gamma"] = c.gamma;
    config["t_max"] = c.t_max;
    config["variant"] = riccati::to_string(v);

    const auto rep = riccati::comparison_check(p1, p2, eta(c.eta1), eta(c.eta2), c.gamma, c.t_max, v);
    Json j = envelope(config);
    j["comparison_report"] = report::to_json(rep);
    j["warnings"] = rep.precondition_violations;
    j["version"] = report::kVersion;
    emit(j, out_path, out);
    return 0;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kamenev-type oscillation criteria for phi''' + p phi'' + q phi' + r phi = 0"};
  app.require_subcommand(1);
  app.set_version_flag("--version", report::kVersion);

  CheckCmd check;
  auto* c = app.add_subcommand("check", "Evaluate oscillation criteria; JSON report");
  check.model.add(*c);
  check.crit.add(*c, "all");
  c->add_option("--out", check.out_path, "JSON output file (default stdout)");
  c->add_option("--csv", check.csv_path, "CSV file for criterion trajectories");

  VerifyCmd verify;
  auto* v = app.add_subcommand("verify", "Integrate the equation and count zeros; JSON report");
  verify.model.add(*v);
  verify.ode_args.add(*v);
  v->add_option("--out", verify.out_path, "JSON output file (default stdout)");

  SweepCmd sweep;
  auto* s = app.add_subcommand("sweep", "Criterion verdicts over a parameter grid; CSV");
  sweep.model.add(*s);
  sweep.crit.add(*s, "thm31,thm32");
  s->add_option("--sweep", sweep.axes_spec, "name=start:stop:step (repeatable)");
  s->add_option("--tmax", sweep.t_max, "Also count zeros of the e1 solution up to this t (0: skip)");
  s->add_option("--jobs", sweep.jobs, "Parallel workers")->capture_default_str();
  s->add_option("--out", sweep.out_path, "CSV output file (default stdout)");

  RiccatiCmd ric;
  auto* r = app.add_subcommand("riccati", "Riccati comparison check; JSON report");
  r->add_option("--case", ric.case_name, "identity, linear or thm32")->capture_default_str();
  r->add_option("--f1", ric.f1);
  r->add_option("--g1", ric.g1);
  r->add_option("--h1", ric.h1);
  r->add_option("--f2", ric.f2);
  r->add_option("--g2", ric.g2);
  r->add_option("--h2", ric.h2);
  r->add_option("--eta1", ric.eta1, "Solution of the first inequality");
  r->add_option("--eta2", ric.eta2, "Solution of the second inequality");
  r->add_option("--t-start", ric.t0);
  r->add_option("--y2", ric.y2, "y2(t_start)");
  r->add_option("--gamma", ric.gamma, "y1(t_start)");
  r->add_option("--tmax", ric.t_max);
  r->add_option("--param", ric.params, "Parameter binding name=value (repeatable)");
  r->add_option("--variant", ric.variant, "as-written or linearized")->capture_default_str();
  r->add_option("--out", ric.out_path, "JSON output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c->parsed()) return check(out);
    if (v->parsed()) return verify(out);
    if (s->parsed()) return sweep(out);
    if (r->parsed()) return ric(out);
  } catch (const expr::ParseError& e) {
    err << "error: cannot parse expression: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace oscrit::cli
