#pragma once

// Direct integration of phi''' + p phi'' + q phi' + r phi = 0, zero counting,
// and classification of solution tails by sign pattern.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscrit/coeffs.hpp"

namespace oscrit::ode {

struct Controls {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double h_max = 0.1;
  double zero_tol = 1e-9;
  /// Rescale the (linear) state by a power of two when it leaves
  /// [1e-15, 1e15] instead of stopping; zeros and sign patterns are unaffected.
  bool renormalize = true;
  std::size_t max_steps = 20'000'000;
};

/// True values are ldexp(y[i], scale_exp); y = (phi, phi', phi'', phi''').
struct TrajSample {
  double t = 0.0;
  std::array<double, 4> y{};
  int scale_exp = 0;
};

enum class Termination { kReachedEnd, kBlowUp, kStepUnderflow, kEvalError, kStepLimit };
std::string to_string(Termination t);

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rescalings = 0;
  double max_step = 0.0;
  double min_step = 0.0;
};

struct SolutionTrajectory {
  double t_start = 0.0;
  std::array<double, 3> initial{};
  std::vector<TrajSample> samples;
  Stats stats;
  Termination status = Termination::kReachedEnd;
  std::string message;
  std::vector<std::string> warnings;

  bool truncated() const { return status != Termination::kReachedEnd; }
  double t_end() const { return samples.empty() ? t_start : samples.back().t; }
};

/// Adaptive Dormand-Prince integration from (t_start, initial) to t_max.
/// Steps land exactly on the coefficients' breakpoints and on `stops`.
SolutionTrajectory integrate_third_order(const coeffs::CoefficientModel& model, double t_start,
                                         const std::array<double, 3>& initial, double t_max,
                                         const Controls& controls = {},
                                         std::span<const double> stops = {});

/// Solutions with initial data e1, e2, e3 at t0.
std::array<SolutionTrajectory, 3> fundamental_basis(const coeffs::CoefficientModel& model,
                                                    double t_max, const Controls& controls = {},
                                                    std::span<const double> stops = {});

struct SignedLog {
  double sign = 0.0;
  double log_abs = 0.0;  // natural log of |value|
};

/// Wronskian of the basis at a time that is a sample of all three
/// trajectories (pass it in `stops`). Throws std::invalid_argument otherwise.
/// Only meaningful while the solutions stay linearly well separated: once one
/// mode dominates all three, the determinant cancels below double precision.
SignedLog wronskian(const std::array<SolutionTrajectory, 3>& basis, double t);

/// Wronskian of the basis at t1 obtained by integrating the three solutions
/// together and re-orthonormalising (QR) after every step, accumulating the
/// log of the R diagonal. Stays accurate when wronskian() cannot.
SignedLog tracked_wronskian(const coeffs::CoefficientModel& model, double t1,
                            const Controls& controls = {});

struct ZeroRecord {
  double t_zero = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool refined = false;
};

/// One record per sign change of phi between consecutive samples, refined by
/// bisection on the quintic Hermite interpolant through (phi, phi', phi'').
std::vector<ZeroRecord> count_zeros(const SolutionTrajectory& traj, double zero_tol = 1e-9);

/// The quintic Hermite interpolant of phi between the samples bracketing t
/// (in the left sample's scale). Exposed for tests.
double interpolate_phi(const TrajSample& a, const TrajSample& b, double t);

enum class Classification { kOscillatoryEvidence, kType21, kType32, kUnclassified };
std::string to_string(Classification c);

struct ClassifyOptions {
  double tail_fraction = 0.25;
  std::size_t min_zeros = 3;
};

/// Examines samples with t >= t_end - tail_fraction (t_end - t_start).
/// TYPE_2_1: phi phi' <= 0, sgn phi = sgn phi'' != sgn phi', |phi'| and
/// |phi''| decreasing. TYPE_3_2: phi phi' >= 0 and phi of one sign (solutions
/// are identified up to sign). OSCILLATORY_EVIDENCE: at least min_zeros zeros
/// with the last inside the tail and in the final decade of the horizon.
Classification classify_tail(const SolutionTrajectory& traj, const ClassifyOptions& options = {},
                                std::span<const ZeroRecord> zeros = {});

struct SolutionSummary {
  std::string label;
  std::array<double, 3> initial{};
  std::size_t zero_count = 0;
  std::optional<double> last_zero;
  std::optional<double> tail_spacing;  // mean of the last (up to 5) zero spacings
  Classification classification = Classification::kUnclassified;
  Termination status = Termination::kReachedEnd;
  double t_end = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

struct OscillationReport {
  double t0 = 0.0;
  double t_max = 0.0;
  int n_random = 0;
  std::uint64_t seed = 0;
  Controls controls;
  ClassifyOptions classify;
  std::vector<SolutionSummary> solutions;
  bool has_oscillatory_evidence = false;
};

SolutionSummary summarize(const SolutionTrajectory& traj, std::string label, double zero_tol,
                          const ClassifyOptions& options = {});

/// The basis plus n_random initial vectors drawn uniformly on the unit sphere
/// (mt19937_64 seeded with `seed`), each integrated separately.
OscillationReport oscillation_report(const coeffs::CoefficientModel& model, double t_max,
                                     int n_random, std::uint64_t seed,
                                     const Controls& controls = {},
                                     const ClassifyOptions& classify = {});

}  // namespace oscrit::ode
