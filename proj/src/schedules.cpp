#include "vame/schedules.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace vame {

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0) || alpha >= 1.0) {
    throw DomainError("schedule: contraction constant must lie in [0,1), got " +
                      format_real(alpha));
  }
}

/// alpha_n = 2 / ((1-alpha)(n+J)), clamped at 1 against one-ulp overshoot
/// of the float product at n = 0.
std::function<double(Nat)> anchor_weights(double alpha, Nat J) {
  const double gap = 1.0 - alpha;
  const double Jd = static_cast<double>(J);
  return [gap, Jd](Nat n) {
    return std::min(1.0, 2.0 / (gap * (static_cast<double>(n) + Jd)));
  };
}

Vec unit_direction(Eigen::Index dim, unsigned seed, Nat n) {
  std::mt19937_64 rng((static_cast<std::uint64_t>(seed) + 1) * 0x9E3779B97F4A7C15ull ^
                      (n + 0x100000001B3ull));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  const double norm = v.norm();
  if (norm < 1e-12) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

}  // namespace

Nat ceil_inv_one_minus(double alpha) {
  require_alpha(alpha);
  return std::max<Nat>(1, nat_ceil(1.0 / (1.0 - alpha)));
}

Nat sam_offset(double alpha) { return sat_mul(2, ceil_inv_one_minus(alpha)); }

void attach_anchor_weight_moduli(ScheduleModuli& moduli, double alpha) {
  require_alpha(alpha);
  const Nat J = sam_offset(alpha);
  const double rate = (1.0 - alpha) / 2.0;
  const double Jd = static_cast<double>(J);
  moduli.sigma1 = Modulus::from_monotone_fn(
      [Jd, rate](Nat n) { return nat_ceil(Jd * std::exp(rate * static_cast<double>(n))); },
      "sigma1(n)=ceil(J*exp(n(1-alpha)/2)) for alpha_n=2/((1-alpha)(n+J)), J=" +
          std::to_string(J));
  const double gap = 1.0 - alpha;
  moduli.sigma2 = Modulus::from_monotone_fn(
      [J, gap](Nat k) {
        return sat_sub(nat_ceil_div(sat_mul(2, sat_add(k, 1)), gap), sat_add(J, 1));
      },
      "sigma2(k)=max{ceil(2(k+1)/(1-alpha))-(J+1),0}, J=" + std::to_string(J));
  moduli.sigma3 = Modulus::from_monotone_fn([J](Nat k) { return sat_mul(J, k); },
                                            "sigma3(k)=J*k, J=" + std::to_string(J));
}

ParamSchedule make_example1_schedule(double alpha, double lambda_value, Eigen::Index dim) {
  require_alpha(alpha);
  if (!(lambda_value > 0.0)) {
    throw DomainError("make_example1_schedule: lambda must be positive, got " +
                      format_real(lambda_value));
  }
  if (dim <= 0) throw DimensionError("make_example1_schedule: dimension must be positive");

  ParamSchedule sched;
  sched.dim = dim;
  sched.label = "example1(alpha=" + format_real(alpha) +
                ", lambda=" + format_real(lambda_value) + ")";
  const Nat J = sam_offset(alpha);
  sched.alpha = anchor_weights(alpha, J);
  sched.lambda = [lambda_value](Nat) { return lambda_value; };
  sched.error = [dim](Nat) { return Vec::Zero(dim); };

  attach_anchor_weight_moduli(sched.moduli, alpha);
  sched.moduli.gamma1 = Modulus::constant(0, "gamma1=0: constant step, zero ratio series");
  sched.moduli.gamma1_star = Modulus::constant(0, "gamma1*=0: constant step");
  sched.moduli.gamma3 = Modulus::constant(0, "gamma3=0: constant step, zero drift series");
  sched.moduli.capital_lambda = std::max<Nat>(1, nat_ceil(1.0 / lambda_value));
  sched.moduli.n_lambda = 0;
  sched.moduli.theta1 = Modulus::constant(0, "theta1=0: zero errors");
  sched.moduli.theta2 = Modulus::constant(0, "theta2=0: zero errors");
  sched.moduli.error_sum_bound = 1;
  const Nat lam_up = std::max<Nat>(1, nat_ceil(lambda_value));
  sched.lambda_upper = [lam_up](Nat) { return lam_up; };
  return sched;
}

Nat example2_error_head(double e_star_norm, double alpha) {
  if (!(e_star_norm >= 0.0)) {
    throw DomainError("example2_error_head: error magnitude must be nonnegative");
  }
  const Nat J = sam_offset(alpha);
  return nat_ceil(e_star_norm / static_cast<double>(J - 1));
}

ParamSchedule make_example2_schedule(double alpha, const Vec& e_star, Eigen::Index dim) {
  require_alpha(alpha);
  if (dim <= 0) throw DimensionError("make_example2_schedule: dimension must be positive");
  if (e_star.size() != dim) {
    throw DimensionError("make_example2_schedule: error direction has the wrong dimension");
  }

  ParamSchedule sched;
  sched.dim = dim;
  const double norm_e = e_star.norm();
  sched.label = "example2(alpha=" + format_real(alpha) +
                ", |e*|=" + format_real(norm_e) + ")";
  const Nat J = sam_offset(alpha);
  const double Jd = static_cast<double>(J);
  sched.alpha = anchor_weights(alpha, J);
  sched.lambda = [Jd](Nat n) {
    const double t = static_cast<double>(n) + Jd;
    return t / (t - 1.0);
  };
  sched.error = [e_star, Jd](Nat n) -> Vec {
    const double t = static_cast<double>(n) + Jd;
    return e_star / (t * t);
  };

  attach_anchor_weight_moduli(sched.moduli, alpha);
  // Ratio deviations |1 - lambda_{n+1}/lambda_n| = 1/(n+J)^2 and the
  // reversed ones 1/((n+J)^2 - 1) both have tails below 1/(n+J), as does
  // the drift series |lambda_n - lambda_{n+1}| = 1/((n+J)(n+J-1)); the same
  // window max{k+1-J, 0} therefore witnesses all three.
  const auto step_window = [J](Nat k) { return sat_sub(sat_add(k, 1), J); };
  sched.moduli.gamma1 =
      Modulus::from_monotone_fn(step_window, "gamma1(k)=max{k+1-J,0}, J=" + std::to_string(J));
  sched.moduli.gamma1_star =
      Modulus::from_monotone_fn(step_window, "gamma1*(k)=max{k+1-J,0}, J=" + std::to_string(J));
  sched.moduli.gamma3 =
      Modulus::from_monotone_fn(step_window, "gamma3(k)=max{k+1-J,0}, J=" + std::to_string(J));
  sched.moduli.capital_lambda = 1;  // lambda_n > 1
  sched.moduli.n_lambda = 0;
  sched.moduli.theta1 = Modulus::from_monotone_fn(
      [J, norm_e](Nat k) { return sat_sub(nat_ceil_mul(sat_add(k, 1), norm_e), J); },
      "theta1(k)=max{ceil(|e*|(k+1))-J,0}, J=" + std::to_string(J));
  sched.moduli.theta2 = Modulus::from_monotone_fn(
      [J, norm_e](Nat k) {
        const double arg = norm_e * (static_cast<double>(k) + 1.0);
        return sat_sub(nat_ceil(std::sqrt(arg)), J);
      },
      "theta2(k)=max{ceil(sqrt(|e*|(k+1)))-J,0}, J=" + std::to_string(J));
  sched.moduli.error_sum_bound = std::max<Nat>(1, example2_error_head(norm_e, alpha));
  sched.lambda_upper = [](Nat) -> Nat { return 2; };  // lambda_m <= J/(J-1) <= 2
  return sched;
}

ParamSchedule make_generic_schedule(double alpha, Eigen::Index dim, unsigned seed,
                                    double error_scale, Nat brute_horizon) {
  require_alpha(alpha);
  if (dim <= 0) throw DimensionError("make_generic_schedule: dimension must be positive");
  if (!(error_scale >= 0.0)) {
    throw DomainError("make_generic_schedule: error scale must be nonnegative");
  }
  if (brute_horizon < 16) {
    throw DomainError("make_generic_schedule: mining horizon is too short");
  }

  ParamSchedule sched;
  sched.dim = dim;
  sched.label = "generic(alpha=" + format_real(alpha) + ", scale=" + format_real(error_scale) +
                ", seed=" + std::to_string(seed) + ")";
  const Nat J = sam_offset(alpha);
  sched.alpha = anchor_weights(alpha, J);
  sched.lambda = [](Nat n) { return 1.0 + 4.0 / (static_cast<double>(n) + 2.0); };
  sched.error = [dim, seed, error_scale](Nat n) -> Vec {
    if (error_scale == 0.0) return Vec::Zero(dim);
    const double mag = error_scale * std::exp2(-static_cast<double>(n));
    if (mag == 0.0) return Vec::Zero(dim);
    return mag * unit_direction(dim, seed, n);
  };

  attach_anchor_weight_moduli(sched.moduli, alpha);

  const Nat k_cap = 4096;
  const auto lam = sched.lambda;
  const RealSequence ratio(
      [lam](Nat n) { return std::abs(1.0 - lam(n + 1) / lam(n)); },
      "step ratio deviations", brute_horizon);
  sched.moduli.gamma1 = brute_force_cauchy_modulus(partial_sums_of(ratio), brute_horizon,
                                                   k_cap, "gamma1");
  const RealSequence ratio_star(
      [lam](Nat n) { return std::abs(1.0 - lam(n) / lam(n + 1)); },
      "reversed step ratio deviations", brute_horizon);
  sched.moduli.gamma1_star = brute_force_cauchy_modulus(partial_sums_of(ratio_star),
                                                        brute_horizon, k_cap, "gamma1*");
  const RealSequence drift([lam](Nat n) { return std::abs(lam(n) - lam(n + 1)); },
                           "step drift", brute_horizon);
  sched.moduli.gamma3 =
      brute_force_cauchy_modulus(partial_sums_of(drift), brute_horizon, k_cap, "gamma3");

  const auto err = sched.error;
  const RealSequence err_norms([err](Nat n) { return err(n).norm(); },
                               "error norms", brute_horizon);
  sched.moduli.theta1 = brute_force_cauchy_modulus(partial_sums_of(err_norms), brute_horizon,
                                                   k_cap, "theta1");
  sched.moduli.theta2 =
      brute_force_rate_of_convergence(err_norms, 0.0, brute_horizon, k_cap, "theta2");

  sched.moduli.capital_lambda = 1;  // lambda_n >= 1
  sched.moduli.n_lambda = 0;
  sched.moduli.error_sum_bound = std::max<Nat>(1, nat_ceil(2.0 * error_scale));
  return sched;
}

ParamSchedule make_nonsummable_error_schedule(double alpha, const Vec& e_star,
                                              Eigen::Index dim) {
  ParamSchedule sched = make_example2_schedule(alpha, e_star, dim);
  sched.label = "example2-nonsummable(alpha=" + format_real(alpha) +
                ", |e*|=" + format_real(e_star.norm()) + ")";
  // Same claimed moduli, but the errors only decay like 1/n: their series
  // diverges, so theta1 / error_sum_bound are false claims by design.
  sched.error = [e_star](Nat n) -> Vec {
    return e_star / (static_cast<double>(n) + 1.0);
  };
  return sched;
}

}  // namespace vame
