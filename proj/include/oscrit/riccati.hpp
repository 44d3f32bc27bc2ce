#pragma once

// Riccati objects behind the criteria: the second-order Riccati equation
// satisfied by y = phi'/phi, the Bernoulli closed form for
// u' + (3/2) u^2 + p_-(t) u = 0, a first-order Riccati solver and a
// comparison harness for y' + f y^2 + g y + h = 0.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscrit/coeffs.hpp"
#include "oscrit/ode.hpp"
#include "oscrit/quad.hpp"

namespace oscrit::riccati {

using Fn = std::function<double(double)>;

/// y' + f(t) y^2 + g(t) y + h(t) = 0, y(t_start) = y_start.
struct RiccatiProblem {
  Fn f, g, h;
  double t_start = 0.0;
  double y_start = 0.0;
};

struct Controls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_max = 0.1;
  double blowup = 1e12;
};

enum class Status { kReachedEnd, kBlowUp, kStepUnderflow };
std::string to_string(Status s);

struct RiccatiSample {
  double t = 0.0;
  double y = 0.0;
};

struct RiccatiTrajectory {
  std::vector<RiccatiSample> samples;
  Status status = Status::kReachedEnd;
  std::optional<double> escape_time;
  std::string message;
};

/// Steps land exactly on `stops`. |y| > blowup stops the integration with
/// the escape time recorded.
RiccatiTrajectory solve_riccati1(const RiccatiProblem& prob, double t_max, const Controls& controls = {},
                                 std::span<const double> stops = {});

/// Value at a sample time; throws std::invalid_argument if t is not one.
double sample_at(const RiccatiTrajectory& traj, double t);

class ZeroInWindow : public std::runtime_error {
 public:
  ZeroInWindow(const std::string& message, double t) : std::runtime_error(message), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

struct ResidualReport {
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<std::pair<double, double>> residual;  // (t, residual)
  double max_abs = 0.0;
  std::size_t skipped = 0;  // ill-conditioned samples right after the zero
};

/// Residual of y'' + (3y + p) y' + y^3 + p y^2 + q y + r = 0 along the
/// integrated solution, with y, y', y'' taken from (phi, ..., phi''') at each
/// sample. The window is the tail after the last zero of phi, starting at the
/// first sample whose rounding floor eps * sum |terms| is at most 1e-8.
ResidualReport riccati2_residual(const coeffs::CoefficientModel& model,
                                 const ode::SolutionTrajectory& traj);

/// u(t) = u_T1 E(t) / (1 + (3/2) u_T1 int_{T1}^t E),  E(s) = exp(-int_{T1}^s p_-).
double bernoulli_closed(double u_T1, double T1, const Fn& p_minus_fn, double t,
                        quad::Tolerance tol = quad::Tolerance(1e-12));

/// A solution of the inequality eta' + f eta^2 + g eta + h >= 0, given with
/// its derivative.
struct EtaFunction {
  Fn value;
  Fn derivative;
};

enum class Variant { kAsWritten, kLinearized };
std::string to_string(Variant v);

struct ComparisonSample {
  double t = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
  double hypothesis = 0.0;  // the integral expression, required >= 0
};

struct ComparisonReport {
  Variant variant = Variant::kAsWritten;
  double gamma = 0.0;
  std::vector<std::string> precondition_violations;
  bool hypothesis_ok = false;
  bool ordering_ok = false;
  std::optional<ComparisonSample> first_violation;
  std::vector<ComparisonSample> trace;
  std::string termination;  // empty when t_max was reached
  double t_end = 0.0;

  bool preconditions_ok() const { return precondition_violations.empty(); }
};

/// Solves prob1 from y1(t0) = gamma and prob2 from its own start value
/// jointly with the hypothesis integral
///   gamma - y2(t0) + int exp{int [f1 (eta1 + eta2) + g1]} [ (f2 - f1)^k y2^2
///                    + (g2 - g1) y2 + h2 - h1 ]
/// (k = 2 as written, k = 1 linearized), and checks y1 >= y2 - max(1e-8, 1e-6 |y2|).
ComparisonReport comparison_check(const RiccatiProblem& prob1, const RiccatiProblem& prob2,
                                  const EtaFunction& eta1, const EtaFunction& eta2, double gamma,
                                  double t_max, Variant variant, const Controls& controls = {});

}  // namespace oscrit::riccati
