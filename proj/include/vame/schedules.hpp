#pragma once

#include "vame/iteration.hpp"

namespace vame {

/// Least natural >= 1/(1 - alpha) as evaluated in double precision, for
/// alpha in [0, 1). The double quotient is what every downstream formula
/// consumes, so its ceiling is taken as computed (e.g. alpha = 0.9 yields
/// 11, since 1/(1 - 0.9) rounds above 10).
Nat ceil_inv_one_minus(double alpha);

/// Offset J = 2 * ceil(1/(1-alpha)) shared by the anchor-weight schedules
/// alpha_n = 2 / ((1-alpha)(n+J)); this choice keeps alpha_0 <= 1.
Nat sam_offset(double alpha);

/// The witnesses every preset carries for its anchor weights:
/// sigma1(n) = ceil(J * exp(n(1-alpha)/2)) (divergence of sum alpha_n),
/// sigma2(k) = max{ceil(2(k+1)/(1-alpha)) - (J+1), 0} (Cauchy modulus for
/// sum |alpha_n - alpha_{n+1}|), and sigma3(k) = J*k (alpha_n -> 0).
void attach_anchor_weight_moduli(ScheduleModuli& moduli, double alpha);

/// Constant resolvent step, zero errors:
///   alpha_n = 2/((1-alpha)(n+J)), lambda_n = lambda_value, e_n = 0.
ParamSchedule make_example1_schedule(double alpha, double lambda_value, Eigen::Index dim);

/// Drifting step with inverse-square errors:
///   lambda_n = (n+J)/(n+J-1), e_n = e_star/(n+J)^2.
/// Carries closed-form step and error moduli alongside the anchor-weight
/// ones, including the flat step bounds lambda_n >= 1 and lambda_m <= 2.
ParamSchedule make_example2_schedule(double alpha, const Vec& e_star, Eigen::Index dim);

/// ceil(||e_star|| / (J-1)), the error head the inverse-square error family
/// contributes to starting-slack bounds.
Nat example2_error_head(double e_star_norm, double alpha);

/// Anchor weights as above, lambda_n = 1 + 4/(n+2), and geometrically
/// decaying errors error_scale * 2^-n in seeded random directions. The step
/// and error moduli are mined from the first brute_horizon+1 indices and
/// saturate beyond the levels that mining supports.
ParamSchedule make_generic_schedule(double alpha, Eigen::Index dim, unsigned seed,
                                    double error_scale, Nat brute_horizon);

/// Negative control: the example2 schedule's weights, steps, and claimed
/// moduli, but with non-summable errors e_star/(n+1). The error-series
/// claims are deliberately false and precondition re-checks must refuse it.
ParamSchedule make_nonsummable_error_schedule(double alpha, const Vec& e_star,
                                              Eigen::Index dim);

}  // namespace vame
