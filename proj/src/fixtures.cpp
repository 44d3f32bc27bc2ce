#include "oscrit/fixtures.hpp"

#include <stdexcept>

namespace oscrit::fixtures {

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

const std::string kBumps =
    "if(t - floor(t) <= floor(t)^(-5), -M*floor(t)^3*sin(floor(t)^5*pi*(t-floor(t)))^2, 0)";

std::vector<Fixture> make_all() {
  std::vector<Fixture> all;

  Fixture lazer;
  lazer.name = "lazer";
  lazer.description = "phi''' + phi = 0";
  lazer.p = "0";
  lazer.q = "0";
  lazer.r = "1";
  lazer.t0 = 1.0;
  all.push_back(lazer);

  Fixture e31;
  e31.name = "example31";
  e31.description = "p = -M t^g, q = 0, r corrected so that D = N t^b";
  e31.p = "-M*t^g";
  e31.q = "0";
  e31.r = example31_r();
  e31.params = {{"M", 1.0}, {"N", 1.0}, {"g", 2.0}, {"b", 2.0}};
  e31.t0 = 1.0;
  e31.declared_d = "N*t^b";
  e31.alpha = 1.0;
  all.push_back(e31);

  Fixture e32;
  e32.name = "example32";
  e32.description = "bumps of height M n^3 and width n^-5 in p, q = 0, r = r0";
  e32.p = kBumps;
  e32.q = "0";
  e32.r = "r0";
  e32.params = {{"M", 13.0}, {"r0", 1.0}};
  e32.t0 = 1.0;
  e32.declared_d = "r0";
  e32.split_p1 = kBumps;
  e32.split_p2 = "0";
  e32.alpha = 2.0;
  all.push_back(e32);
  return all;
}

const std::vector<Fixture>& all_fixtures() {
  static const std::vector<Fixture> all = make_all();
  return all;
}

}  // namespace

std::string example31_r() {
  const std::string disc = "(M^2*t^(2*g) - 3*M*g*t^(g-1))";
  const std::string ustar = replace_all("((sqrt(DISC) + M*t^g)/3)", "DISC", disc);
  const std::string g0 = replace_all("(U^3 - M*t^g*U^2 + M*g*t^(g-1)*U)", "U", ustar);
  return "N*t^b - if(" + disc + " >= 0, min(0, " + g0 + "), 0)";
}

const Fixture& get(const std::string& name) {
  for (const auto& f : all_fixtures()) {
    if (f.name == name) return f;
  }
  throw std::invalid_argument("unknown fixture '" + name + "' (expected lazer, example31 or example32)");
}

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& f : all_fixtures()) out.push_back(f.name);
  return out;
}

coeffs::CoefficientModel build(const Fixture& f, const expr::ParamMap& overrides) {
  expr::ParamMap params = f.params;
  for (const auto& [k, v] : overrides) params[k] = v;
  return coeffs::build_model(f.p, f.q, f.r, params, f.t0, f.declared_d);
}

}  // namespace oscrit::fixtures
