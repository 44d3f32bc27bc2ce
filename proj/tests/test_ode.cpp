#include <cmath>
#include <vector>

#include "doctest.h"
#include "oscrit/fixtures.hpp"
#include "oscrit/ode.hpp"
#include "oscrit/quad.hpp"
#include "support/gen.hpp"

using namespace oscrit::ode;
using oscrit::coeffs::build_model;
using oscrit::testing::Gen;
namespace fixtures = oscrit::fixtures;

namespace {

double value(const TrajSample& s, int i = 0) { return std::ldexp(s.y[static_cast<std::size_t>(i)], s.scale_exp); }

const double kSqrt3 = std::sqrt(3.0);

// phi''' + phi = 0 from (1, 0, 0) at s = 0: the three roots weighted 1/3 each.
double lazer_e1(double s) { return std::exp(-s) / 3 + 2.0 / 3 * std::exp(s / 2) * std::cos(kSqrt3 * s / 2); }

SolutionTrajectory synthetic(double a, double b, int n, double (*f)(double), double (*df)(double)) {
  SolutionTrajectory tr;
  tr.t_start = a;
  for (int k = 0; k <= n; ++k) {
    const double t = a + (b - a) * k / n;
    tr.samples.push_back({t, {f(t), df(t), 0.0, 0.0}, 0});
  }
  return tr;
}

}  // namespace

TEST_CASE("polynomial solutions are reproduced exactly") {
  const auto zero = build_model("0", "0", "0", {}, 1.0);
  const auto tr = integrate_third_order(zero, 1.0, {1, 1, 0}, 11.0);
  REQUIRE_FALSE(tr.truncated());
  CHECK(tr.t_end() == 11.0);
  CHECK(std::fabs(value(tr.samples.back()) - 11.0) <= 1e-10);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].t - tr.samples[k - 1].t <= 0.1 + 1e-12);

  const auto basis = fundamental_basis(zero, 6.0);
  const auto& last = basis[2].samples.back();
  CHECK(value(basis[0].samples.back()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(value(basis[1].samples.back()) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(value(last) == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(value(last, 3) == doctest::Approx(0.0));
}

TEST_CASE("constant-coefficient solution matches its eigen-expansion") {
  const auto lz = fixtures::build(fixtures::get("lazer"));
  const auto tr = integrate_third_order(lz, 1.0, {1, 0, 0}, 6.0);
  CHECK(std::fabs(value(tr.samples.back()) - lazer_e1(5.0)) <= 1e-6);
  for (const auto& s : tr.samples) CHECK(std::fabs(value(s) - lazer_e1(s.t - 1.0)) <= 1e-6);
  // phi''' is the equation, not an independent quantity.
  for (const auto& s : tr.samples) CHECK(value(s, 3) == doctest::Approx(-value(s, 0)));
}

TEST_CASE("bump train integrates without step underflow") {
  const auto m = fixtures::build(fixtures::get("example32"));
  Controls c;
  c.rel_tol = 1e-8;
  const auto tr = integrate_third_order(m, 1.0, {1, 0, 0}, 20.0, c);
  CHECK(tr.status == Termination::kReachedEnd);
  CHECK(tr.t_end() == 20.0);
}

TEST_CASE("blow-up truncates when renormalisation is off") {
  const auto m = build_model("0", "0", "-1e6", {}, 1.0);
  Controls c;
  c.renormalize = false;
  const auto tr = integrate_third_order(m, 1.0, {1, 1, 1}, 100.0, c);
  CHECK(tr.status == Termination::kBlowUp);
  CHECK(tr.t_end() < 100.0);
  for (const auto& s : tr.samples) CHECK(std::isfinite(s.y[0]));

  const auto on = integrate_third_order(m, 1.0, {1, 1, 1}, 10.0);
  CHECK(on.status == Termination::kReachedEnd);
  CHECK(on.stats.rescalings > 0);
}

TEST_CASE("Wronskian follows the Abel identity") {
  // Well separated basis: phi''' + phi = 0 keeps W = 1.
  const std::vector<double> stops{5.0};
  const auto lz = fixtures::build(fixtures::get("lazer"));
  const auto lb = fundamental_basis(lz, 6.0, {}, stops);
  const auto w0 = wronskian(lb, 1.0);
  CHECK(w0.sign == 1.0);
  CHECK(w0.log_abs == doctest::Approx(0.0));
  const auto w5 = wronskian(lb, 5.0);
  CHECK(w5.sign == 1.0);
  CHECK(std::fabs(w5.log_abs) <= 1e-5);
  CHECK_THROWS(wronskian(lb, 5.123));

  // p = -t^2: W(t) = exp(int_1^t tau^2) = exp((t^3 - 1)/3). All three
  // solutions follow the e^{t^3/3} mode, so the determinant must be tracked.
  const auto m = build_model("-t^2", "0", "1", {}, 1.0);
  const auto w = tracked_wronskian(m, 5.0);
  CHECK(w.sign == 1.0);
  CHECK(std::fabs(std::expm1(w.log_abs - (125.0 - 1.0) / 3.0)) <= 1e-5);
}

TEST_CASE("property: Abel identity on every fixture") {
  for (const auto& name : fixtures::names()) {
    const auto m = fixtures::build(fixtures::get(name));
    for (double t1 : {2.5, 4.0, 8.0}) {
      const auto w = tracked_wronskian(m, t1);
      std::vector<double> cuts;
      for (int n = 2; n < 9; ++n) {
        cuts.push_back(n);
        cuts.push_back(n + std::pow(n, -5.0));
      }
      const auto ip = oscrit::quad::integrate_adaptive([&](double t) { return m.p_at(t); }, m.t0(), t1,
                                                       oscrit::quad::Tolerance(1e-12), cuts);
      INFO(name << " t=" << t1);
      CHECK(w.sign == 1.0);
      CHECK(std::fabs(std::expm1(w.log_abs + ip.value)) <= 1e-5);
    }
  }
}

TEST_CASE("count_zeros on synthetic trajectories") {
  const auto lin = synthetic(0, 10, 37, [](double t) { return t - 5; }, [](double) { return 1.0; });
  const auto z = count_zeros(lin, 1e-9);
  REQUIRE(z.size() == 1);
  CHECK(std::fabs(z[0].t_zero - 5.0) <= 1e-9);
  CHECK(z[0].refined);
  CHECK(z[0].t_hi - z[0].t_lo <= 1e-9);

  const auto pos = synthetic(0, 10, 37, [](double t) { return 1 + t; }, [](double) { return 1.0; });
  CHECK(count_zeros(pos).empty());

  // A tangential zero is not claimed.
  const auto tan = synthetic(0, 10, 36, [](double t) { return (t - 5) * (t - 5); }, [](double t) { return 2 * (t - 5); });
  CHECK(count_zeros(tan).empty());
}

TEST_CASE("zero spacing of the oscillatory pair") {
  // Pure complex-pair data: phi = e^{s/2} cos(sqrt3 s / 2) has (1, 1/2, -1/2).
  const auto lz = fixtures::build(fixtures::get("lazer"));
  const auto tr = integrate_third_order(lz, 1.0, {1.0, 0.5, -0.5}, 100.0);
  REQUIRE(tr.status == Termination::kReachedEnd);
  const auto s = summarize(tr, "pair", 1e-9);
  REQUIRE(s.tail_spacing);
  CHECK(std::fabs(*s.tail_spacing - 2 * M_PI / kSqrt3) <= 1e-3);
  CHECK(s.classification == Classification::kOscillatoryEvidence);
  CHECK(s.zero_count >= 27);
  // Zeros of cos(sqrt3 s / 2): s = (2k+1) pi / sqrt3.
  const auto zeros = count_zeros(tr);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(zeros[k].t_zero - 1.0 == doctest::Approx((2.0 * k + 1) * M_PI / kSqrt3).epsilon(1e-8));
  }
}

TEST_CASE("sign-pattern classification of solution tails") {
  const auto lz = fixtures::build(fixtures::get("lazer"));
  // The decaying root: phi = e^{-s}, data (1, -1, 1). Short horizon, since
  // integration error grows like e^{s/2}.
  const auto decay = integrate_third_order(lz, 1.0, {1, -1, 1}, 11.0);
  CHECK(classify_tail(decay) == Classification::kType21);

  const auto grow = build_model("-1", "0", "0", {}, 1.0);
  const auto e = integrate_third_order(grow, 1.0, {1, 1, 1}, 30.0);
  CHECK(classify_tail(e) == Classification::kType32);
  const auto neg = integrate_third_order(grow, 1.0, {-1, -1, -1}, 30.0);
  CHECK(classify_tail(neg) == Classification::kType32);

  const auto osc = integrate_third_order(lz, 1.0, {1, 0, 0}, 60.0);
  CHECK(classify_tail(osc) == Classification::kOscillatoryEvidence);

  // Zeros early on only: not evidence.
  const auto quad = build_model("0", "0", "0", {}, 1.0);
  // phi = (s^2 - 4s + 2) / 4 vanishes at s = 2 -+ sqrt 2 only.
  const auto q = integrate_third_order(quad, 1.0, {0.5, -1, 0.5}, 100.0);
  CHECK(count_zeros(q).size() == 2);
  CHECK(classify_tail(q) != Classification::kOscillatoryEvidence);
}

TEST_CASE("oscillation reports") {
  const auto lz = fixtures::build(fixtures::get("lazer"));
  const auto rep = oscillation_report(lz, 100.0, 5, 42);
  CHECK(rep.has_oscillatory_evidence);
  REQUIRE(rep.solutions.size() == 8);
  CHECK(rep.solutions[0].label == "basis e1");
  for (std::size_t k = 3; k < rep.solutions.size(); ++k) {
    CHECK(rep.solutions[k].zero_count >= 25);
    const auto& v = rep.solutions[k].initial;
    CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] == doctest::Approx(1.0));
  }
  const auto again = oscillation_report(lz, 100.0, 5, 42);
  for (std::size_t k = 0; k < rep.solutions.size(); ++k) {
    CHECK(rep.solutions[k].initial == again.solutions[k].initial);
    CHECK(rep.solutions[k].zero_count == again.solutions[k].zero_count);
  }
  CHECK(oscillation_report(lz, 100.0, 5, 43).solutions[3].initial != rep.solutions[3].initial);

  const auto cubic = build_model("0", "0", "0", {}, 1.0);
  const auto none = oscillation_report(cubic, 100.0, 20, 7);
  CHECK_FALSE(none.has_oscillatory_evidence);
  for (const auto& s : none.solutions) CHECK(s.zero_count <= 2);
  CHECK_THROWS(oscillation_report(cubic, 100.0, 0, 7));
}

TEST_CASE("property: zero records straddle sign changes and grow with the horizon") {
  Gen gen(21);
  const auto lz = fixtures::build(fixtures::get("lazer"));
  const auto m31 = fixtures::build(fixtures::get("example31"));
  for (int i = 0; i < 6; ++i) {
    const auto& model = i % 2 == 0 ? lz : m31;
    const std::array<double, 3> init{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
    const double horizon = i % 2 == 0 ? 40.0 : 8.0;
    const auto tr = integrate_third_order(model, 1.0, init, horizon);
    const auto zeros = count_zeros(tr, 1e-9);
    for (const auto& z : zeros) {
      CHECK(z.t_hi - z.t_lo <= 1e-9);
      CHECK(z.t_lo <= z.t_zero);
      CHECK(z.t_zero <= z.t_hi);
      // Sign change of the dense output across the bracket.
      auto it = std::upper_bound(tr.samples.begin(), tr.samples.end(), z.t_zero,
                                 [](double t, const TrajSample& s) { return t < s.t; });
      REQUIRE(it != tr.samples.begin());
      REQUIRE(it != tr.samples.end());
      const auto& a = *(it - 1);
      const auto& b = *it;
      if (z.t_lo >= a.t && z.t_hi <= b.t) {
        CHECK(interpolate_phi(a, b, z.t_lo) * interpolate_phi(a, b, z.t_hi) <= 0.0);
      }
    }
    std::size_t prev = 0;
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      const double tm = 1.0 + (horizon - 1.0) * frac;
      const auto n = count_zeros(integrate_third_order(model, 1.0, init, tm)).size();
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("property: tightening tolerances barely moves the zeros") {
  Gen gen(22);
  const auto lz = fixtures::build(fixtures::get("lazer"));
  const auto m31 = fixtures::build(fixtures::get("example31"));
  for (int i = 0; i < 4; ++i) {
    const auto& model = i % 2 == 0 ? lz : m31;
    const std::array<double, 3> init{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
    const double horizon = i % 2 == 0 ? 30.0 : 6.0;
    Controls loose;
    Controls tight;
    tight.rel_tol = loose.rel_tol / 10;
    tight.abs_tol = loose.abs_tol / 10;
    const auto za = count_zeros(integrate_third_order(model, 1.0, init, horizon, loose), loose.zero_tol);
    const auto zb = count_zeros(integrate_third_order(model, 1.0, init, horizon, tight), tight.zero_tol);
    REQUIRE(za.size() == zb.size());
    for (std::size_t k = 0; k < za.size(); ++k) {
      INFO("zero " << k << " at " << za[k].t_zero);
      CHECK(std::fabs(za[k].t_zero - zb[k].t_zero) < 10 * loose.zero_tol);
    }
  }
}
