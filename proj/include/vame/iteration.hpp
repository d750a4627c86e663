#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vame/moduli.hpp"
#include "vame/operators.hpp"

namespace vame {

/// Quantitative witnesses attached to a parameter schedule. Each field, when
/// present, certifies one hypothesis on the schedule data:
///   sigma1      rate of divergence of sum alpha_n
///   sigma2      Cauchy modulus of sum |alpha_n - alpha_{n+1}|
///   sigma3      rate of convergence of alpha_n -> 0
///   gamma1      Cauchy modulus of sum |1 - lambda_{n+1}/lambda_n|
///   gamma1_star Cauchy modulus of sum |1 - lambda_n/lambda_{n+1}|
///   gamma3      Cauchy modulus of sum |lambda_n - lambda_{n+1}|
///   theta1      Cauchy modulus of sum ||e_n||
///   theta2      rate of convergence of ||e_n|| -> 0
///   capital_lambda, n_lambda   lambda_n >= 1/capital_lambda for n >= n_lambda
///   error_sum_bound            positive natural bound on sum ||e_n||
struct ScheduleModuli {
  std::optional<Modulus> sigma1;
  std::optional<Modulus> sigma2;
  std::optional<Modulus> sigma3;
  std::optional<Modulus> gamma1;
  std::optional<Modulus> gamma1_star;
  std::optional<Modulus> gamma3;
  std::optional<Modulus> theta1;
  std::optional<Modulus> theta2;
  std::optional<Nat> capital_lambda;
  std::optional<Nat> n_lambda;
  std::optional<Nat> error_sum_bound;
};

/// The data driving one run: anchor weights alpha_n in [0,1], resolvent
/// steps lambda_n > 0, and error terms e_n, all pure functions of the index,
/// plus whatever moduli are known for them.
struct ParamSchedule {
  std::function<double(Nat)> alpha;
  std::function<double(Nat)> lambda;
  std::function<Vec(Nat)> error;
  Eigen::Index dim = 0;
  ScheduleModuli moduli;
  std::string label;

  /// A natural upper bound on lambda(m); defaults to ceil(lambda(m)).
  std::function<Nat(Nat)> lambda_upper;
  Nat lambda_upper_at(Nat m) const;
};

/// One run of x_{n+1} = alpha_n f(x_n) + (1 - alpha_n) J_{lambda_n} x_n + e_n
/// together with the residual series read off it. `points` holds x_0..x_N;
/// the per-index arrays cover n = 0..N, with x_{N+1} computed internally so
/// the last successive residual is defined.
struct IterationTrace {
  std::vector<Vec> points;
  std::vector<double> successive;   // ||x_{n+1} - x_n||
  std::vector<double> scheme;       // ||x_n - J_{lambda_n} x_n||
  std::vector<double> err_norm;     // ||e_n||
  std::vector<double> kz;           // K_{z,n}; empty when no zero is known
  ResolventOperator op;
  ContractionMap f;
  ParamSchedule sched;
  std::optional<Vec> zero;          // the z the kz column refers to

  Nat horizon() const { return points.size() - 1; }
};

/// Runs the scheme for n_max steps. Validates alpha_n in [0,1] and
/// lambda_n > 0 as they are consumed and that every iterate stays finite.
IterationTrace run_vame(const Vec& x0, const ResolventOperator& op,
                        const ContractionMap& f, const ParamSchedule& sched, Nat n_max);

/// The nonincreasing-by-errors majorant K_{z,0} = max{||x_0 - z||,
/// ||f(z) - z|| / (1 - alpha)}, K_{z,n+1} = K_{z,n} + ||e_n||, for n up to
/// the trace horizon.
std::vector<double> kz_sequence(const IterationTrace& trace, const Vec& z);

/// Replays the four trajectory bounds against K_{z,n}:
///   (1) ||x_n - z|| and ||f(x_n) - z|| <= K_{z,n}
///   (2) ||x_{n+1} - x_n|| <= 2 K_{z,n+1}
///   (3) ||J_{lambda_m} x_n - z|| <= K_{z,n}
///   (4) ||J_{lambda_m} x_n - x_n|| and ||J_{lambda_m} x_n - f(x_n)|| <= 2 K_{z,n}
/// for every n in the trace and every sampled m.
CheckResult check_bound_lemma(const IterationTrace& trace, const Vec& z,
                              const std::vector<Nat>& m_samples, double tol = kTolFloat);

/// Which step-ratio series a certificate or inequality consumes: the
/// forward ratios |1 - lambda_{n+1}/lambda_n| or the reversed ones
/// |1 - lambda_n/lambda_{n+1}|.
enum class LambdaVariant { kRatio, kRatioStar };

/// Replays the one-step contraction estimate
///   ||x_{n+2} - x_{n+1}|| <= (1 - (1-alpha) alpha_{n+1}) ||x_{n+1} - x_n||
///                             + M_{z,n} + ||e_{n+1} - e_n||
/// where M_{z,n} = 2 K_{z,n} (|alpha_{n+1} - alpha_n| +
/// (1 - alpha_{n+1}) * r_n) and r_n is the chosen ratio deviation.
CheckResult check_main_inequality(const IterationTrace& trace, const Vec& z,
                                  LambdaVariant variant, double tol = kTolFloat);

/// Writes the trace as CSV with header
/// n,alpha_n,lambda_n,err_norm,succ_residual,scheme_residual,kz and one row
/// per n = 0..horizon. Output is byte-deterministic for a fixed trace.
void write_trace_csv(const IterationTrace& trace, std::ostream& os);

}  // namespace vame
