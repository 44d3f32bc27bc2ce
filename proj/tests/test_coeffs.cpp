#include <cmath>
#include <string>

#include "doctest.h"
#include "oscrit/coeffs.hpp"
#include "oscrit/fixtures.hpp"
#include "support/gen.hpp"

using namespace oscrit::coeffs;
using oscrit::testing::Gen;
namespace fixtures = oscrit::fixtures;

namespace {

// Explicit minimum function when p = 0 and q <= 0.
double d_p_zero(double q, double r) { return r - 2.0 / (3.0 * std::sqrt(3.0)) * std::pow(-q, 1.5); }

CoefficientModel random_polynomial_model(Gen& g) {
  const double scale = g.log_uniform(0.1, 5.0);
  return build_model(g.polynomial(g.integer(0, 2), scale), g.polynomial(g.integer(0, 2), scale),
                     g.polynomial(g.integer(0, 2), scale), {}, 1.0);
}

}  // namespace

TEST_CASE("build_model") {
  const auto lazer = build_model("0", "0", "1", {}, 1.0);
  CHECK(lazer.r_at(5.0) == 1.0);
  CHECK(lazer.dp_at(5.0) == 0.0);
  CHECK_FALSE(lazer.has_breakpoints());

  const auto m = build_model("-M*t^g", "0", "N*t^b", {{"M", 1}, {"N", 1}, {"g", 2}, {"b", 2}}, 1.0);
  CHECK(m.p_at(2.0) == doctest::Approx(-4.0));
  CHECK(m.dp_at(2.0) == doctest::Approx(-4.0));
  CHECK(oscrit::expr::structurally_equal(m.p_prime(), oscrit::expr::differentiate(m.p())));

  const auto c = build_model("0", "q0", "r0", {{"q0", -3}, {"r0", 5}}, 1.0);
  CHECK(c.q_at(10.0) == -3.0);

  CHECK_THROWS_AS(build_model("0", "0", "1", {}, 0.0), ModelError);
  CHECK_THROWS_AS(build_model("0", "0", "1", {}, -1.0), ModelError);
  CHECK_THROWS_AS(build_model("t^", "0", "1", {}, 1.0), oscrit::expr::ParseError);
  CHECK_THROWS_AS(build_model("0", "0", "k", {}, 1.0), oscrit::expr::ParseError);
  CHECK_THROWS_AS(build_model("0", "0", "ln(t - 5)", {}, 1.0), ModelError);
  CHECK_THROWS_AS(build_model("0", "0", "exp(t)", {}, 1.0), ModelError);  // overflows on [t0, t0+1e4]
}

TEST_CASE("p_minus and cubic_g by direct substitution") {
  const auto a = build_model("-t^2", "0", "1", {}, 1.0);
  CHECK(p_minus(a, 2.0) == -4.0);
  const auto b = build_model("5", "0", "1", {}, 1.0);
  CHECK(p_minus(b, 2.0) == 0.0);
  const auto s = build_model("sin(t)", "0", "1", {}, 1.0);
  CHECK(p_minus(s, M_PI / 2) == 0.0);
  CHECK(p_minus(s, 3 * M_PI / 2) == doctest::Approx(-1.0));

  const auto c = build_model("0", "-3", "5", {}, 1.0);
  CHECK(cubic_g(c, 7.0, 1.0) == doctest::Approx(3.0));
  CHECK(cubic_g(c, 7.0, 0.0) == 5.0);
  const auto d = build_model("-1", "0", "2", {}, 1.0);
  CHECK(cubic_g(d, 3.0, 2.0) == doctest::Approx(6.0));
}

TEST_CASE("d_closed examples") {
  // Negative discriminant: D = r.
  const auto a = build_model("1", "1", "7", {}, 1.0);
  CHECK(d_closed(a, 2.0) == 7.0);

  // p = 0, q = -3, r = 5: u* = 1 and D = 3.
  const auto c = build_model("0", "-3", "5", {}, 1.0);
  CHECK(d_closed(c, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d_p_zero(-3, 5) == doctest::Approx(3.0).epsilon(1e-14));

  // Independent oracle: uniform grid on [0, 10] with step 1e-4.
  double best = INFINITY;
  for (int k = 0; k <= 100000; ++k) {
    const double u = k * 1e-4;
    best = std::min(best, u * u * u - 3 * u + 5);
  }
  CHECK(best == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d_oracle(c, 2.0) == doctest::Approx(3.0).epsilon(1e-12));

  // Critical point negative (p > 0 and p' - q < 0): D = r.
  const auto e = build_model("10", "1", "2", {}, 1.0);
  CHECK(d_closed(e, 1.5) == 2.0);
}

TEST_CASE("fixture minimum functions") {
  // Power-law fixture is corrected so that its minimum function is N t^b.
  const auto& f31 = fixtures::get("example31");
  const auto m31 = fixtures::build(f31);
  for (double t : {1.0, 1.7, 3.0, 10.0, 30.0}) {
    const double want = t * t;
    // D comes out of cancellation between terms of size ~ t^6.
    CHECK(std::fabs(d_closed(m31, t) - want) <= 1e-9 * std::pow(t, 6));
    CHECK(d_effective(m31, t) == doctest::Approx(want).epsilon(1e-14));
    CHECK(d_oracle(m31, t) == doctest::Approx(want).epsilon(1e-6));
  }

  // Bump fixture: away from the bumps p = p' = q = 0, so D = r0. (The first
  // bump fills all of [1, 2].)
  const auto m32 = fixtures::build(fixtures::get("example32"));
  for (double t : {2.5, 3.9, 7.2}) CHECK(d_closed(m32, t) == 1.0);

  const auto lz = fixtures::build(fixtures::get("lazer"));
  CHECK(d_closed(lz, 4.0) == 1.0);
  CHECK_THROWS_AS(fixtures::get("nope"), std::invalid_argument);
}

TEST_CASE("property: D is a lower bound of G on u >= 0 and of r") {
  Gen gen(11);
  for (int i = 0; i < 300; ++i) {
    const auto m = random_polynomial_model(gen);
    for (int j = 0; j < 5; ++j) {
      const double t = gen.uniform(1.0, 20.0);
      const double d = d_closed(m, t);
      CHECK(d <= m.r_at(t) + 0.0);
      for (int k = 0; k < 10; ++k) {
        const double u = gen.log_uniform(1e-6, 1e3);
        const double g = cubic_g(m, t, u);
        CHECK(d <= g + 1e-9 * std::max(1.0, std::fabs(g)));
      }
    }
  }
}

TEST_CASE("property: closed form matches the brute-force oracle") {
  Gen gen(12);
  int n = 0;
  while (n < 1000) {
    const auto m = random_polynomial_model(gen);
    const double t = gen.uniform(1.0, 5.0);
    const double dc = d_closed(m, t);
    const double dorc = d_oracle(m, t);
    INFO("p=" << m.p().source() << " q=" << m.q().source() << " r=" << m.r().source() << " t=" << t);
    CHECK(std::fabs(dc - dorc) <= 1e-7);
    ++n;
  }
}

TEST_CASE("property: p = 0, q <= 0 reduces to the explicit formula") {
  Gen gen(13);
  for (int i = 0; i < 1000; ++i) {
    const double q = -gen.log_uniform(1e-3, 1e2);
    const double r = gen.uniform(-10, 10);
    const CoefficientSample c{0.0, 0.0, q, r};
    const double want = d_p_zero(q, r);
    // Relative to the larger of the two terms being subtracted.
    const double scale = std::max(std::fabs(r), std::fabs(want - r));
    CHECK(std::fabs(d_closed(c) - want) <= 1e-12 * scale);
  }
}

TEST_CASE("property: p_minus is the negative part") {
  Gen gen(14);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_polynomial_model(gen);
    const double t = gen.uniform(1.0, 20.0);
    const double pm = p_minus(m, t);
    CHECK(pm <= 0.0);
    if (m.p_at(t) < 0) CHECK(pm == m.p_at(t));
  }
}

TEST_CASE("sign condition is checked on jittered samples") {
  const auto grid = SampleGrid::jittered(1.0, 1e4, 2000);
  REQUIRE(grid.points.size() == 2000);
  for (std::size_t i = 1; i < grid.points.size(); ++i) CHECK(grid.points[i] > grid.points[i - 1]);
  CHECK(grid.points.front() >= 1.0);
  CHECK(grid.points.back() <= 1e4);

  const auto ok = check_condition_a(build_model("0", "-1", "1 + 1/t", {}, 1.0), grid);
  CHECK(ok.holds());
  const auto bad_r = check_condition_a(build_model("0", "0", "sin(t)", {}, 1.0), grid);
  CHECK_FALSE(bad_r.r_positive.holds());
  REQUIRE(bad_r.r_positive.witness_t);
  CHECK(std::sin(*bad_r.r_positive.witness_t) <= 0.0);
  const auto bad_q = check_condition_a(build_model("0", "t - 100", "1", {}, 1.0), grid);
  CHECK(bad_q.r_positive.holds());
  CHECK_FALSE(bad_q.q_nonpositive.holds());
  CHECK(*bad_q.q_nonpositive.witness_t > 100.0);
}

TEST_CASE("splitting of p_minus") {
  const auto& f32 = fixtures::get("example32");
  const auto m32 = fixtures::build(f32);
  const auto split = make_split(m32, f32.split_p1, f32.split_p2);
  CHECK(split.p_minus_2_at(2.0) == 0.0);
  CHECK(split.p_minus_1_at(2.0 + 0.5 / 32) == doctest::Approx(p_minus(m32, 2.0 + 0.5 / 32)));

  const auto c = build_model("-1", "0", "1", {}, 1.0);
  const auto d = make_split(c);
  CHECK(d.p_minus_1_at(3.0) == 0.0);
  CHECK(d.p_minus_2_at(3.0) == -1.0);

  CHECK_THROWS_AS(make_split(c, std::string("1"), std::string("-2")), SplitError);
  try {
    make_split(c, std::string("-0.5"), std::string("-0.6"));
    FAIL("sum mismatch not detected");
  } catch (const SplitError& e) {
    CHECK(e.deviation() == doctest::Approx(0.1));
    CHECK(e.witness_t() >= 1.0);
  }
}
