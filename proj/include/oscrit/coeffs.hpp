#pragma once

// Coefficients of  phi''' + p(t) phi'' + q(t) phi' + r(t) phi = 0  on [t0, +inf)
// and the pointwise minimum function D(t) of the cubic
//   G(t, u) = u^3 + p u^2 + (q - p') u + r,   u >= 0.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscrit/expr.hpp"

namespace oscrit::coeffs {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CoefficientSample {
  double p = 0.0;
  double dp = 0.0;  // p'(t)
  double q = 0.0;
  double r = 0.0;
};

class CoefficientModel {
 public:
  /// `declared_d`, when present, is the minimum function the caller asserts
  /// for this model (used for coefficients built with a correction term whose
  /// whole purpose is to pin D). Criteria then integrate it instead of the
  /// closed form, which would otherwise cancel catastrophically.
  CoefficientModel(expr::Expr p, expr::Expr q, expr::Expr r, expr::ParamMap params, double t0,
                   std::optional<expr::Expr> declared_d = std::nullopt);

  const expr::Expr& p() const { return p_; }
  const expr::Expr& q() const { return q_; }
  const expr::Expr& r() const { return r_; }
  const expr::Expr& p_prime() const { return p_prime_; }
  const std::optional<expr::Expr>& declared_d() const { return declared_d_; }
  const expr::ParamMap& params() const { return params_; }
  double t0() const { return t0_; }

  CoefficientSample at(double t) const;
  double p_at(double t) const { return cp_(t); }
  double q_at(double t) const { return cq_(t); }
  double r_at(double t) const { return cr_(t); }
  double dp_at(double t) const { return cdp_(t); }
  std::optional<double> declared_d_at(double t) const;

  /// p, p', q, r (and the declared D, if any).
  std::vector<expr::Expr> expressions() const;
  bool has_breakpoints() const;

 private:
  expr::Expr p_, q_, r_, p_prime_;
  std::optional<expr::Expr> declared_d_;
  expr::ParamMap params_;
  double t0_;
  expr::Compiled cp_, cq_, cr_, cdp_, cd_;
};

/// Parses the three coefficients (parameters are the keys of `params`) and
/// checks that p, p', q, r evaluate to finite values on a sample of
/// [t0, t0 + 1e4]. Throws expr::ParseError or ModelError.
CoefficientModel build_model(const std::string& p_src, const std::string& q_src,
                             const std::string& r_src, const expr::ParamMap& params, double t0,
                             const std::optional<std::string>& declared_d_src = std::nullopt);

double p_minus(const CoefficientModel& model, double t);
double cubic_g(const CoefficientModel& model, double t, double u);

/// Closed-form minimum of G(t, .) over u >= 0: r when the discriminant
/// p^2 + 3(p' - q) is negative or the critical point is negative, otherwise
/// min{r, G(t, u*)} with u* = (sqrt(p^2 + 3(p' - q)) - p) / 3.
double d_closed(const CoefficientSample& c);
double d_closed(const CoefficientModel& model, double t);

/// Brute-force minimum: uniform grid on [0, u_max], then golden-section
/// refinement around the grid minimiser to 1e-10 in u.
double d_oracle(const CoefficientModel& model, double t, double u_max, int n_grid);
double d_oracle(const CoefficientModel& model, double t);
double default_u_max(const CoefficientSample& c);

/// The declared minimum function if the model has one, else d_closed.
double d_effective(const CoefficientModel& model, double t);

/// Deterministic jittered sample points (log-uniform with a golden-ratio
/// offset) so periodic coefficients do not alias with the sampling.
struct SampleGrid {
  std::vector<double> points;

  static SampleGrid jittered(double a, double b, std::size_t n);
  /// Adds the midpoint of every smooth piece between breakpoints of the
  /// model's coefficients over [a, b] (at most `max_pieces`).
  void add_piece_midpoints(const CoefficientModel& model, double a, double b,
                           std::size_t max_pieces = 400);
};

enum class SignStatus { kHoldsOnSamples, kViolated };

struct ConditionCheck {
  std::string condition;  // e.g. "r(t) > 0"
  SignStatus status = SignStatus::kHoldsOnSamples;
  std::optional<double> witness_t;
  std::optional<double> witness_value;
  std::string note;
  std::size_t samples = 0;

  bool holds() const { return status == SignStatus::kHoldsOnSamples; }
};

struct SignReport {
  ConditionCheck r_positive;
  ConditionCheck q_nonpositive;

  bool holds() const { return r_positive.holds() && q_nonpositive.holds(); }
};

/// r(t) > 0 and q(t) <= 0, checked on the sample points only.
SignReport check_condition_a(const CoefficientModel& model, const SampleGrid& grid);

class SplitError : public std::runtime_error {
 public:
  SplitError(const std::string& message, double witness_t, double deviation);
  double witness_t() const { return witness_t_; }
  double deviation() const { return deviation_; }

 private:
  double witness_t_;
  double deviation_;
};

/// p_-(t) = p_{-,1}(t) + p_{-,2}(t) with both parts non-positive.
class SplitModel {
 public:
  SplitModel(CoefficientModel base, expr::Expr p_minus_1, expr::Expr p_minus_2);

  const CoefficientModel& base() const { return base_; }
  const expr::Expr& p_minus_1() const { return p1_; }
  const expr::Expr& p_minus_2() const { return p2_; }
  double p_minus_1_at(double t) const { return c1_(t); }
  double p_minus_2_at(double t) const { return c2_(t); }

 private:
  CoefficientModel base_;
  expr::Expr p1_, p2_;
  expr::Compiled c1_, c2_;
};

/// Omitted sources default to p_{-,1} = 0 and p_{-,2} = min(p, 0). Throws
/// SplitError when a part is positive or the parts do not sum to p_- on the
/// sample grid.
SplitModel make_split(const CoefficientModel& model, const std::optional<std::string>& p1_src = {},
                      const std::optional<std::string>& p2_src = {});

}  // namespace oscrit::coeffs
