// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oscrit/cli.hpp"
#include "oscrit/coeffs.hpp"
#include "oscrit/fixtures.hpp"
#include "oscrit/kamenev.hpp"
#include "oscrit/ode.hpp"
#include "oscrit/quad.hpp"
#include "oscrit/riccati.hpp"
#include "support/gen.hpp"

using namespace oscrit;
using testing::Gen;
using testing::PiecewisePoly;

namespace {

// Collects the failed sub-checks of one criterion.
struct Checks {
  std::vector<std::string> failures;
  void operator()(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failed = 0;

void criterion(int id, const std::string& title, double cap_s, const std::function<void(Checks&)>& body) {
  Checks c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cap_s > 0 && secs > cap_s) c.failures.push_back("runtime " + num(secs) + " s exceeds " + num(cap_s) + " s");
  const bool ok = c.failures.empty();
  if (!ok) ++failed;
  std::printf("%s %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
  for (std::size_t k = 0; k < c.failures.size() && k < 10; ++k) std::printf("    - %s\n", c.failures[k].c_str());
  if (c.failures.size() > 10) std::printf("    - ... %zu more\n", c.failures.size() - 10);
  std::fflush(stdout);
}

const kamenev::ConditionResult* condition(const kamenev::TheoremReport& r, const std::string& name) {
  for (const auto& c : r.conditions) {
    if (c.condition == name) return &c;
  }
  return nullptr;
}

bool diverges(const kamenev::ConditionResult* c) {
  return c && c->trajectory && c->trajectory->verdict.kind == kamenev::VerdictKind::kDiverges;
}

std::string run_check(const std::string& fixture) {
  const char* argv[] = {"oscrit", "check", "--fixture", fixture.c_str()};
  std::ostringstream out, err;
  const int code = cli::run(4, argv, out, err);
  if (code != 0) throw std::runtime_error("check --fixture " + fixture + " exited " + std::to_string(code));
  return out.str();
}

riccati::Fn constant(double c) {
  return [c](double) { return c; };
}

}  // namespace

int main() {
  criterion(1, "minimum function: closed form vs oracle, and the p = 0 formula", 10.0, [](Checks& check) {
    Gen gen(1001);
    for (int i = 0; i < 1000; ++i) {
      const double scale = gen.log_uniform(0.1, 5.0);
      const auto m = coeffs::build_model(gen.polynomial(gen.integer(0, 2), scale),
                                         gen.polynomial(gen.integer(0, 2), scale),
                                         gen.polynomial(gen.integer(0, 2), scale), {}, 1.0);
      const double t = gen.uniform(1.0, 5.0);
      const double diff = std::fabs(coeffs::d_closed(m, t) - coeffs::d_oracle(m, t));
      check(diff <= 1e-7, "model " + std::to_string(i) + " |closed - oracle| = " + num(diff));
    }
    for (int i = 0; i < 1000; ++i) {
      const double q = -gen.log_uniform(1e-3, 1e2);
      const double r = gen.uniform(-10, 10);
      const double want = r - 2.0 / (3.0 * std::sqrt(3.0)) * std::pow(-q, 1.5);
      const double got = coeffs::d_closed(coeffs::CoefficientSample{0.0, 0.0, q, r});
      const double scale = std::max(std::fabs(r), std::fabs(want - r));
      check(std::fabs(got - want) <= 1e-12 * scale, "q=" + num(q) + " r=" + num(r) + " got " + num(got));
    }
  });

  criterion(2, "weighted average operator is monotone", 10.0, [](Checks& check) {
    Gen gen(1002);
    for (double alpha : {0.5, 1.0, 2.0}) {
      for (int i = 0; i < 100; ++i) {
        const double T = gen.uniform(0.5, 3.0);
        const double hi = T + gen.uniform(1.0, 20.0);
        const auto f2 = PiecewisePoly::random(gen, T, hi, gen.integer(1, 6));
        const auto gap = PiecewisePoly::random(gen, T, hi, gen.integer(1, 6));
        auto f1 = [&](double s) { return f2(s) + gap(s) * gap(s); };
        std::vector<double> cuts;
        for (std::size_t k = 1; k < f2.coef.size(); ++k) cuts.push_back(T + (hi - T) * k / f2.coef.size());
        for (std::size_t k = 1; k < gap.coef.size(); ++k) cuts.push_back(T + (hi - T) * k / gap.coef.size());
        for (int j = 0; j < 10; ++j) {
          const double t = gen.uniform(T + 1e-3, hi);
          const double k1 = kamenev::kamenev_transform(f1, T, alpha, t, cuts);
          const double k2 = kamenev::kamenev_transform(f2, T, alpha, t, cuts);
          check(k1 >= k2 - 1e-9, "alpha=" + num(alpha) + " t=" + num(t) + ": " + num(k1) + " < " + num(k2));
        }
      }
    }
  });

  criterion(3, "phi''' + phi = 0: all criteria apply and solutions oscillate", 30.0, [](Checks& check) {
    const auto m = fixtures::build(fixtures::get("lazer"));
    const auto opts = kamenev::default_options(m);
    const auto split = coeffs::make_split(m);
    using kamenev::Overall;
    using kamenev::TheoremId;
    check(kamenev::theorem_verdict(m, TheoremId::kLazer, std::nullopt, opts).overall == Overall::kApplies,
          "explicit p = 0 criterion");
    check(kamenev::theorem_verdict(m, TheoremId::kThm31, 1.0, opts).overall == Overall::kApplies,
          "weighted D criterion, alpha = 1");
    check(kamenev::theorem_verdict(m, TheoremId::kThm32, 1.0, opts).overall == Overall::kApplies,
          "integrated D criterion, alpha = 1");
    check(kamenev::theorem_verdict(m, TheoremId::kThm33, 2.0, opts, &split).overall == Overall::kApplies,
          "split criterion, alpha = 2");

    const auto rep = ode::oscillation_report(m, 100.0, 5, 42);
    const double spacing = 2 * M_PI / std::sqrt(3.0);
    check(rep.has_oscillatory_evidence, "no oscillatory evidence");
    for (std::size_t k = 3; k < rep.solutions.size(); ++k) {
      const auto& s = rep.solutions[k];
      check(s.zero_count >= 25, s.label + ": " + std::to_string(s.zero_count) + " zeros");
      check(s.tail_spacing && std::fabs(*s.tail_spacing - spacing) <= 1e-2,
            s.label + ": tail spacing " + (s.tail_spacing ? num(*s.tail_spacing) : std::string("none")));
    }
  });

  criterion(4, "power-law example: integrated criterion applies, weighted D criterion does not", 60.0,
            [](Checks& check) {
              const auto m = fixtures::build(fixtures::get("example31"));
              const auto opts = kamenev::default_options(m);
              const auto t32 = kamenev::theorem_verdict(m, kamenev::TheoremId::kThm32, 1.0, opts);
              check(diverges(condition(t32, "c")), "condition c not DIVERGES");
              check(diverges(condition(t32, "d")), "condition d not DIVERGES");
              const auto t31 = kamenev::theorem_verdict(m, kamenev::TheoremId::kThm31, 1.0, opts);
              const auto* b = condition(t31, "b");
              check(b && b->trajectory && !diverges(b), "condition b classified DIVERGES");
              if (b && b->trajectory) {
                double s_at = NAN, t_at = 0;
                for (const auto& s : b->trajectory->samples) {
                  if (s.t <= 1e3) s_at = s.s, t_at = s.t;
                }
                check(s_at < -1e3, "S(" + num(t_at) + ") = " + num(s_at) + " is not below -1e3");
              }
              const auto rep = ode::oscillation_report(m, 50.0, 2, 42);
              check(rep.has_oscillatory_evidence, "no oscillatory evidence on [1, 50]");
            });

  criterion(5, "bump example: bump integrals, split criterion applies, weighted D criterion does not", 120.0,
            [](Checks& check) {
              const auto& f = fixtures::get("example32");
              const auto m = fixtures::build(f);
              const double M = f.params.at("M");
              for (int n = 1; n <= 5; ++n) {
                const std::vector<double> cuts{n + std::pow(n, -5.0)};
                const auto r = quad::integrate_adaptive(
                    [&](double t) {
                      const double pm = coeffs::p_minus(m, t);
                      return pm * pm;
                    },
                    n, n + 1.0, {}, n == 1 ? std::vector<double>{} : cuts);
                const double want = 3 * M * M * n / 8;
                check(std::fabs(r.value - want) <= 1e-2 * want,
                      "n=" + std::to_string(n) + ": " + num(r.value) + " vs " + num(want));
              }
              const auto opts = kamenev::default_options(m);
              const auto split = coeffs::make_split(m, f.split_p1, f.split_p2);
              const auto t33 = kamenev::theorem_verdict(m, kamenev::TheoremId::kThm33, 2.0, opts, &split);
              for (const char* c : {"e", "f", "g"}) {
                const auto* r = condition(t33, c);
                check(r && r->status == kamenev::ConditionStatus::kEstablished,
                      std::string("condition ") + c + " not established" + (r ? ": " + r->detail : ""));
              }
              const auto t31 = kamenev::theorem_verdict(m, kamenev::TheoremId::kThm31, 2.0, opts);
              const auto* b = condition(t31, "b");
              check(b && b->trajectory && !diverges(b), "condition b classified DIVERGES");
            });

  criterion(6, "second-order Riccati residual on nonvanishing tails", 0.0, [](Checks& check) {
    const auto lz = fixtures::build(fixtures::get("lazer"));
    const double e = std::exp(-1.0);
    const auto decay = riccati::riccati2_residual(lz, ode::integrate_third_order(lz, 1.0, {e, -e, e}, 10.0));
    check(decay.max_abs <= 1e-8, "phi = e^-t residual " + num(decay.max_abs));

    Gen gen(1006);
    for (const auto& name : fixtures::names()) {
      const auto& f = fixtures::get(name);
      const auto m = fixtures::build(f);
      int tails = 0;
      for (int i = 0; i < 6; ++i) {
        const std::array<double, 3> init{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
        const auto tr = ode::integrate_third_order(m, f.t0, init, f.t0 + 10.0);
        try {
          const auto rep = riccati::riccati2_residual(m, tr);
          ++tails;
          check(rep.max_abs <= 1e-6, name + " residual " + num(rep.max_abs) + " on [" + num(rep.window_start) +
                                         ", " + num(rep.window_end) + "]");
        } catch (const riccati::ZeroInWindow&) {
        }
      }
      check(tails > 0, name + ": no nonvanishing tail");
    }
  });

  criterion(7, "Bernoulli closed form vs numeric solution", 0.0, [](Checks& check) {
    Gen gen(1007);
    for (int i = 0; i < 20; ++i) {
      const double u0 = gen.log_uniform(0.05, 20.0);
      const double T1 = gen.uniform(1.0, 3.0);
      const double c = gen.uniform(0.0, 2.0);
      riccati::Fn pm;
      switch (i % 3) {
        case 0: pm = constant(0); break;
        case 1: pm = constant(-c); break;
        default: pm = [c](double t) { return -c / t; };
      }
      std::vector<double> stops;
      for (int k = 1; k <= 9; ++k) stops.push_back(T1 + k);
      const auto tr = riccati::solve_riccati1({constant(1.5), pm, constant(0), T1, u0}, T1 + 9.0, {}, stops);
      for (double t : stops) {
        const double d = std::fabs(riccati::bernoulli_closed(u0, T1, pm, t) - riccati::sample_at(tr, t));
        check(d <= 1e-6, "fixture " + std::to_string(i) + " t=" + num(t) + " diff " + num(d));
      }
    }
  });

  criterion(8, "comparison harness: identity and linear cases", 0.0, [](Checks& check) {
    const riccati::Fn z = constant(0);
    const riccati::Fn eta = [](double t) { return 1.0 / (1.0 + t); };
    const riccati::Fn deta = [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); };
    const riccati::RiccatiProblem p{constant(1), z, z, 0.0, 1.0};
    const auto id = riccati::comparison_check(p, p, {eta, deta}, {eta, deta}, 1.0, 10.0,
                                              riccati::Variant::kAsWritten);
    check(id.preconditions_ok() && id.hypothesis_ok && id.ordering_ok, "identity flags");
    for (const auto& s : id.trace) {
      check(s.y1 == s.y2, "identity y1 != y2 at t=" + num(s.t));
      check(s.hypothesis >= 0.0, "identity hypothesis negative at t=" + num(s.t));
    }

    const riccati::RiccatiProblem p1{z, z, constant(-1), 0.0, 0.0};
    const riccati::RiccatiProblem p2{z, z, z, 0.0, 0.0};
    const auto lin = riccati::comparison_check(p1, p2, {[](double t) { return t; }, constant(1)}, {z, z}, 0.0,
                                               10.0, riccati::Variant::kAsWritten);
    check(lin.preconditions_ok() && lin.hypothesis_ok && lin.ordering_ok, "linear flags");
    for (const auto& s : lin.trace) {
      check(std::fabs(s.y1 - s.y2 - s.t) <= 1e-8, "linear y1 - y2 - t = " + num(s.y1 - s.y2 - s.t));
      check(s.hypothesis >= 0.0, "linear hypothesis negative at t=" + num(s.t));
    }
  });

  criterion(9, "check reports are byte-identical across runs", 0.0, [](Checks& check) {
    for (const auto& name : fixtures::names()) {
      check(run_check(name) == run_check(name), name + ": reports differ");
    }
  });

  return failed == 0 ? 0 : 1;
}
