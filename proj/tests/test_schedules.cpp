#include <doctest.h>

#include <cmath>

#include "vame/schedules.hpp"

using namespace vame;

namespace {

/// Wraps a schedule's anchor weights as a checkable sequence.
RealSequence weights_of(const ParamSchedule& sched, Nat horizon) {
  const auto a = sched.alpha;
  return RealSequence([a](Nat n) { return a(n); }, "anchor weights", horizon);
}

RealSequence error_norms_of(const ParamSchedule& sched, Nat horizon) {
  const auto e = sched.error;
  return RealSequence([e](Nat n) { return e(n).norm(); }, "error norms", horizon);
}

RealSequence ratio_devs_of(const ParamSchedule& sched, Nat horizon) {
  const auto lam = sched.lambda;
  return RealSequence([lam](Nat n) { return std::abs(1.0 - lam(n + 1) / lam(n)); },
                      "step ratio deviations", horizon);
}

RealSequence reversed_ratio_devs_of(const ParamSchedule& sched, Nat horizon) {
  const auto lam = sched.lambda;
  return RealSequence([lam](Nat n) { return std::abs(1.0 - lam(n) / lam(n + 1)); },
                      "reversed step ratio deviations", horizon);
}

RealSequence step_drifts_of(const ParamSchedule& sched, Nat horizon) {
  const auto lam = sched.lambda;
  return RealSequence([lam](Nat n) { return std::abs(lam(n) - lam(n + 1)); },
                      "step drifts", horizon);
}

}  // namespace

TEST_CASE("ceil_inv_one_minus and sam_offset follow the double quotient") {
  CHECK(ceil_inv_one_minus(0.0) == 1);
  CHECK(ceil_inv_one_minus(0.5) == 2);
  CHECK(ceil_inv_one_minus(0.75) == 4);
  // 1/(1 - 0.9) evaluates just above 10 in doubles, so the ceiling is 11.
  CHECK(ceil_inv_one_minus(0.9) == 11);

  CHECK(sam_offset(0.0) == 2);
  CHECK(sam_offset(0.5) == 4);
  CHECK(sam_offset(0.9) == 22);

  CHECK_THROWS_AS(ceil_inv_one_minus(-0.1), DomainError);
  CHECK_THROWS_AS(ceil_inv_one_minus(1.0), DomainError);
  CHECK_THROWS_AS(ceil_inv_one_minus(std::nan("")), DomainError);
}

TEST_CASE("anchor weight moduli certify their own series") {
  const Nat horizon = 3000;
  for (double alpha : {0.0, 0.5, 0.9}) {
    CAPTURE(alpha);
    ScheduleModuli moduli;
    attach_anchor_weight_moduli(moduli, alpha);
    REQUIRE(moduli.sigma1.has_value());
    REQUIRE(moduli.sigma2.has_value());
    REQUIRE(moduli.sigma3.has_value());

    const Nat J = sam_offset(alpha);
    const double gap = 1.0 - alpha;
    const auto alpha_fn = [gap, J](Nat n) {
      return std::min(1.0, 2.0 / (gap * (static_cast<double>(n) + static_cast<double>(J))));
    };
    const RealSequence alphas(alpha_fn, "alpha_n", horizon);

    // sigma1: divergence rate of sum alpha_n. Counters whose witness index
    // exceeds the horizon are skipped; the small ones are verified.
    CHECK(check_rate_of_divergence(*moduli.sigma1, alphas, 40));
    CHECK(divergence_floor_check(*moduli.sigma1, 500));

    // sigma2: Cauchy modulus of sum |alpha_n - alpha_{n+1}|.
    const RealSequence diffs(
        [alpha_fn](Nat n) { return std::abs(alpha_fn(n) - alpha_fn(n + 1)); },
        "weight diffs", horizon);
    CHECK(check_cauchy_modulus(*moduli.sigma2, partial_sums_of(diffs), 25, horizon));

    // sigma3: rate of convergence alpha_n -> 0.
    CHECK(check_rate_of_convergence(*moduli.sigma3, alphas, 0.0, 25, horizon));
  }
}

TEST_CASE("example1 schedule pins constant-step data and witnesses") {
  const ParamSchedule sched = make_example1_schedule(0.5, 2.5, 3);
  CHECK(sched.dim == 3);
  CHECK(!sched.label.empty());

  // J = 4, so alpha_0 = 2/(0.5*4) = 1 and alpha_4 = 2/(0.5*8) = 0.5.
  CHECK(sched.alpha(0) == doctest::Approx(1.0));
  CHECK(sched.alpha(4) == doctest::Approx(0.5));
  CHECK(sched.lambda(7) == doctest::Approx(2.5));
  REQUIRE(sched.error(5).size() == 3);
  CHECK(sched.error(5).norm() == 0.0);

  REQUIRE(sched.moduli.capital_lambda.has_value());
  CHECK(*sched.moduli.capital_lambda == 1);  // ceil(1/2.5) = 1
  REQUIRE(sched.moduli.n_lambda.has_value());
  CHECK(*sched.moduli.n_lambda == 0);
  REQUIRE(sched.moduli.error_sum_bound.has_value());
  CHECK(*sched.moduli.error_sum_bound == 1);

  for (const auto& mod : {sched.moduli.gamma1, sched.moduli.gamma1_star,
                          sched.moduli.gamma3, sched.moduli.theta1, sched.moduli.theta2}) {
    REQUIRE(mod.has_value());
    CHECK((*mod)(0) == 0);
    CHECK((*mod)(1000) == 0);
  }

  CHECK(sched.lambda_upper_at(0) == 3);
  CHECK(sched.lambda_upper_at(999) == 3);

  // The zero step-ratio and error series trivially satisfy their witnesses.
  const Nat horizon = 300;
  CHECK(check_cauchy_modulus(*sched.moduli.gamma1,
                             partial_sums_of(ratio_devs_of(sched, horizon)), 10, horizon));
  CHECK(check_rate_of_convergence(*sched.moduli.theta2, error_norms_of(sched, horizon),
                                  0.0, 10, horizon));

  const ParamSchedule small = make_example1_schedule(0.5, 0.25, 1);
  CHECK(*small.moduli.capital_lambda == 4);
  CHECK(small.lambda_upper_at(0) == 1);

  CHECK_THROWS_AS(make_example1_schedule(0.5, 0.0, 3), DomainError);
  CHECK_THROWS_AS(make_example1_schedule(1.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(make_example1_schedule(0.5, 1.0, 0), DimensionError);
}

TEST_CASE("example2 schedule carries valid closed-form step and error moduli") {
  Vec e_star(2);
  e_star << 3.0, 0.0;
  const ParamSchedule sched = make_example2_schedule(0.5, e_star, 2);
  const Nat J = 4;

  CHECK(sched.lambda(0) == doctest::Approx(4.0 / 3.0));
  CHECK(sched.lambda(10) == doctest::Approx(14.0 / 13.0));
  CHECK(sched.error(0)[0] == doctest::Approx(3.0 / 16.0));
  CHECK(sched.error(0)[1] == 0.0);

  CHECK(*sched.moduli.capital_lambda == 1);
  CHECK(*sched.moduli.n_lambda == 0);
  CHECK(sched.lambda_upper_at(0) == 2);
  CHECK(sched.lambda_upper_at(1000) == 2);
  for (Nat n = 0; n <= 100; ++n) CHECK(sched.lambda(n) >= 1.0);

  // theta1(k) = max{ceil(3(k+1)) - 4, 0}, theta2(k) = max{ceil(sqrt(3(k+1))) - 4, 0},
  // step windows gamma(k) = max{k+1-4, 0}.
  CHECK((*sched.moduli.theta1)(0) == 0);
  CHECK((*sched.moduli.theta1)(3) == 8);
  CHECK((*sched.moduli.theta1)(10) == 29);
  CHECK((*sched.moduli.theta2)(0) == 0);
  CHECK((*sched.moduli.theta2)(20) == 4);
  CHECK((*sched.moduli.gamma1)(3) == 0);
  CHECK((*sched.moduli.gamma1)(4) == 1);
  CHECK((*sched.moduli.gamma1)(10) == 7);
  CHECK((*sched.moduli.gamma1_star)(10) == 7);
  CHECK((*sched.moduli.gamma3)(10) == 7);

  CHECK(example2_error_head(3.0, 0.5) == 1);  // ceil(3/(J-1)) with J = 4
  CHECK(example2_error_head(10.0, 0.0) == 10);
  CHECK(example2_error_head(0.0, 0.5) == 0);
  CHECK_THROWS_AS(example2_error_head(-1.0, 0.5), DomainError);
  CHECK(*sched.moduli.error_sum_bound == 1);

  // Every closed-form witness must survive replay against the actual series.
  const Nat horizon = 2500;
  const Nat k_max = 30;
  CHECK(check_cauchy_modulus(*sched.moduli.gamma1,
                             partial_sums_of(ratio_devs_of(sched, horizon)), k_max, horizon));
  CHECK(check_cauchy_modulus(*sched.moduli.gamma1_star,
                             partial_sums_of(reversed_ratio_devs_of(sched, horizon)), k_max,
                             horizon));
  CHECK(check_cauchy_modulus(*sched.moduli.gamma3,
                             partial_sums_of(step_drifts_of(sched, horizon)), k_max, horizon));
  CHECK(check_cauchy_modulus(*sched.moduli.theta1,
                             partial_sums_of(error_norms_of(sched, horizon)), k_max, horizon));
  CHECK(check_rate_of_convergence(*sched.moduli.theta2, error_norms_of(sched, horizon), 0.0,
                                  k_max, horizon));
  CHECK(check_rate_of_divergence(*sched.moduli.sigma1, weights_of(sched, horizon), 30));

  Vec wrong_dim(3);
  wrong_dim.setZero();
  CHECK_THROWS_AS(make_example2_schedule(0.5, wrong_dim, 2), DimensionError);
  CHECK_THROWS_AS(make_example2_schedule(0.5, e_star, 0), DimensionError);
  (void)J;
}

TEST_CASE("generic schedule mines witnesses that its own data satisfies") {
  const Nat horizon = 600;
  const ParamSchedule sched = make_generic_schedule(0.25, 2, 7, 0.5, horizon);

  // J = 2*ceil(1/0.75) = 4, lambda_n = 1 + 4/(n+2).
  CHECK(sched.alpha(0) == doctest::Approx(2.0 / 3.0));
  CHECK(sched.lambda(0) == doctest::Approx(3.0));
  CHECK(sched.lambda(2) == doctest::Approx(2.0));
  CHECK(*sched.moduli.capital_lambda == 1);
  CHECK(*sched.moduli.n_lambda == 0);
  CHECK(sched.lambda_upper_at(0) == 3);  // default: ceil(lambda(m))
  CHECK(sched.lambda_upper_at(2) == 2);
  CHECK(sched.lambda_upper_at(198) == 2);

  CHECK(sched.error(3).norm() == doctest::Approx(0.5 * 0.125).epsilon(1e-12));

  // Deterministic in the seed; a different seed turns the directions.
  const ParamSchedule again = make_generic_schedule(0.25, 2, 7, 0.5, horizon);
  CHECK((sched.error(3) - again.error(3)).norm() == 0.0);
  const ParamSchedule other = make_generic_schedule(0.25, 2, 8, 0.5, horizon);
  CHECK((sched.error(3) - other.error(3)).norm() > 1e-6);

  // Mined step and error witnesses hold on the mined range.
  const Nat k_max = 20;
  REQUIRE(sched.moduli.gamma1.has_value());
  CHECK(check_cauchy_modulus(*sched.moduli.gamma1,
                             partial_sums_of(ratio_devs_of(sched, horizon)), k_max, horizon));
  CHECK(check_cauchy_modulus(*sched.moduli.gamma1_star,
                             partial_sums_of(reversed_ratio_devs_of(sched, horizon)), k_max,
                             horizon));
  CHECK(check_cauchy_modulus(*sched.moduli.gamma3,
                             partial_sums_of(step_drifts_of(sched, horizon)), k_max, horizon));
  CHECK(check_cauchy_modulus(*sched.moduli.theta1,
                             partial_sums_of(error_norms_of(sched, horizon)), k_max, horizon));
  CHECK(check_rate_of_convergence(*sched.moduli.theta2, error_norms_of(sched, horizon), 0.0,
                                  k_max, horizon));
  CHECK(sched.moduli.sigma1.has_value());
  CHECK(*sched.moduli.error_sum_bound == 1);  // max(1, ceil(2*0.5))

  // Zero error scale degenerates to the errorless mined schedule.
  const ParamSchedule clean = make_generic_schedule(0.25, 2, 7, 0.0, horizon);
  CHECK(clean.error(5).norm() == 0.0);
  CHECK((*clean.moduli.theta1)(0) == 0);
  CHECK((*clean.moduli.theta2)(0) == 0);

  CHECK_THROWS_AS(make_generic_schedule(0.25, 2, 7, 0.5, 15), DomainError);
  CHECK_THROWS_AS(make_generic_schedule(0.25, 2, 7, -1.0, horizon), DomainError);
  CHECK_THROWS_AS(make_generic_schedule(0.25, 0, 7, 0.5, horizon), DimensionError);
}

TEST_CASE("nonsummable control keeps claims its errors no longer satisfy") {
  Vec e_star(2);
  e_star << 1.0, 0.0;
  const ParamSchedule sched = make_nonsummable_error_schedule(0.5, e_star, 2);

  CHECK(sched.label.find("nonsummable") != std::string::npos);
  CHECK(sched.error(0).norm() == doctest::Approx(1.0));
  CHECK(sched.error(9).norm() == doctest::Approx(0.1));
  CHECK(sched.lambda(0) == doctest::Approx(4.0 / 3.0));

  // The inherited theta1 claims summability of a harmonic series: replay
  // refutes it at the coarsest level.
  const Nat horizon = 3000;
  const auto theta1_check = check_cauchy_modulus(
      *sched.moduli.theta1, partial_sums_of(error_norms_of(sched, horizon)), 5, horizon);
  CHECK(theta1_check.status == CheckStatus::kFail);
  REQUIRE(theta1_check.index.has_value());
  CHECK(*theta1_check.index == 0);

  // theta2 claims decay faster than the errors deliver: level 1 wants
  // norms <= 1/2 from index 0 on, but ||e_0|| = 1.
  const auto theta2_check = check_rate_of_convergence(
      *sched.moduli.theta2, error_norms_of(sched, horizon), 0.0, 40, horizon);
  CHECK(theta2_check.status == CheckStatus::kFail);
  REQUIRE(theta2_check.index.has_value());
  CHECK(*theta2_check.index == 1);
}
