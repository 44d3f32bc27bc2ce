#pragma once

// Kamenev-type weighted integral criteria and the numerical verdict engine.
//
// limsup / liminf as t -> inf cannot be decided from finitely many samples;
// every verdict here is a heuristic over a geometric grid and reports the
// policy it used.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscrit/coeffs.hpp"
#include "oscrit/expr.hpp"
#include "oscrit/quad.hpp"

namespace oscrit::kamenev {

/// t_k = t_start * ratio^k, k = 0..count-1.
struct GeometricGrid {
  double t_start = 1.15;
  double ratio = 1.15;
  int count = 120;

  std::vector<double> points() const;
  /// Default grid for a model anchored at t0: starts one ratio step past t0.
  static GeometricGrid starting_after(double t0, double ratio = 1.15, int count = 120);
};

enum class CriterionId { kThm31B, kThm32C, kThm32D, kThm33E, kThm33G, kLazer, kCor31 };
std::string to_string(CriterionId id);

enum class VerdictKind { kDiverges, kBounded, kBoundedBelow, kUnboundedBelow, kInconclusive };
std::string to_string(VerdictKind kind);

struct Policy {
  /// Theta; when absent, 1e3 * (1 + |S(t0 * ratio^4)|).
  std::optional<double> threshold;
  double rho = 2.0;
  double window_fraction = 0.25;
  double stable_rel = 0.05;
  std::size_t min_samples = 16;
};

struct Evidence {
  double running_max = 0.0;
  double running_min = 0.0;
  double last_window_max = 0.0;
  double previous_window_max = 0.0;
  double growth_factor = 0.0;  // last_window_max / max(previous_window_max, 0); inf if that is 0
  double threshold = 0.0;
  std::size_t window = 0;
};

struct Verdict {
  VerdictKind kind = VerdictKind::kInconclusive;
  Evidence evidence;
  std::string note;
};

struct Sample {
  double t = 0.0;
  double s = 0.0;
};

struct CriterionTrajectory {
  CriterionId id = CriterionId::kThm32C;
  std::optional<double> alpha;
  std::vector<Sample> samples;
  Verdict verdict;
  bool depth_capped = false;
  std::vector<std::string> warnings;
};

/// DIVERGES when the running max exceeds Theta and the last window's max is
/// at least rho times the previous window's. BOUNDED when the running max at
/// the end of the last window is within stable_rel of its value at the end of
/// the previous window and below Theta (an S tending to -inf is BOUNDED: its
/// limsup is finite). Otherwise INCONCLUSIVE.
Verdict classify_limsup(std::span<const Sample> samples, const Policy& policy, double threshold);

/// BOUNDED_BELOW when the running min stays above -Theta and settles (same
/// window rule); UNBOUNDED_BELOW when it falls below -Theta and the last
/// window's min is rho times lower than the previous window's.
Verdict classify_liminf(std::span<const Sample> samples, const Policy& policy, double threshold);

double default_threshold(double s_at_ratio4);

/// K_{alpha} f(t) = alpha (alpha+1) / t^{alpha+1} * int_T^t (t-tau)^{alpha-1} f(tau) dtau.
/// For alpha < 1 the endpoint singularity is removed by tau = t - s^{1/alpha}.
double kamenev_transform(const quad::Integrand& f, double T, double alpha, double t,
                         std::span<const double> breakpoints = {}, quad::Tolerance tol = {});

struct CriterionOptions {
  GeometricGrid grid;
  Policy policy;
  quad::Tolerance tol;
  expr::BreakpointOptions breakpoints;
};

CriterionOptions default_options(const coeffs::CoefficientModel& model);

/// S(t_k) = int_{t0}^{t_k} D for THM32C (limsup rule) or THM33E (liminf rule).
CriterionTrajectory cumulative_d(const coeffs::CoefficientModel& model, CriterionId id,
                                 const CriterionOptions& options);

/// THM31B, THM32D (alpha > 0) and THM33G, COR31 (alpha > 1).
CriterionTrajectory criterion_kamenev(const coeffs::CoefficientModel& model, double alpha,
                                      CriterionId id, const CriterionOptions& options);

/// S(t_k) = int_{t0}^{t_k} [r - 2/(3 sqrt 3) (max(-q, 0))^{3/2}]; warns when p is
/// not identically zero on the samples.
CriterionTrajectory criterion_lazer(const coeffs::CoefficientModel& model,
                                    const CriterionOptions& options);

enum class ConditionStatus { kEstablished, kRefuted, kUndetermined };
std::string to_string(ConditionStatus status);

struct ConditionResult {
  std::string condition;  // "a", "b", ..., "p=0"
  ConditionStatus status = ConditionStatus::kUndetermined;
  std::string detail;
  std::optional<CriterionTrajectory> trajectory;
  std::optional<coeffs::SignReport> signs;
};

struct IntegrabilityReport {
  CriterionTrajectory integral;  // running int |p_{-,1}| (criterion id unused)
  double sup_early = 0.0;        // sup |p_{-,2}| over the first three quarters (log scale)
  double sup_late = 0.0;         // ... and over the last quarter
  bool integrable = false;
  bool bounded = false;
  std::vector<std::string> warnings;
};

IntegrabilityReport check_33f(const coeffs::SplitModel& split, const CriterionOptions& options);

enum class TheoremId { kThm31, kThm32, kThm33, kLazer, kCor31 };
std::string to_string(TheoremId id);

enum class Overall { kApplies, kDoesNotApply, kInconclusive };
std::string to_string(Overall overall);

struct TheoremReport {
  TheoremId theorem = TheoremId::kThm31;
  std::optional<double> alpha;
  std::vector<ConditionResult> conditions;
  Overall overall = Overall::kInconclusive;
  std::vector<std::string> warnings;
};

/// Checks every condition the theorem requires. THM33 needs `split`
/// (std::invalid_argument otherwise); THM33 and COR31 need alpha > 1.
TheoremReport theorem_verdict(const coeffs::CoefficientModel& model, TheoremId theorem,
                              std::optional<double> alpha, const CriterionOptions& options,
                              const coeffs::SplitModel* split = nullptr);

}  // namespace oscrit::kamenev
