#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "vame/iteration.hpp"
#include "vame/schedules.hpp"

using namespace vame;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

ParamSchedule plain_schedule(std::function<double(Nat)> alpha, double lambda,
                             Eigen::Index dim, std::string label) {
  ParamSchedule s;
  s.alpha = std::move(alpha);
  s.lambda = [lambda](Nat) { return lambda; };
  s.error = [dim](Nat) { return Vec::Zero(dim); };
  s.dim = dim;
  s.label = std::move(label);
  return s;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

std::size_t count_fields(const std::string& line) {
  std::size_t n = 1;
  for (char c : line) {
    if (c == ',') ++n;
  }
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// run_vame

TEST_CASE("a run started at a common fixed point is stationary") {
  auto op = make_scaled_identity(2, 1.0);
  auto f = make_constant_map(Vec::Zero(2));
  auto sched = plain_schedule([](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); },
                              1.0, 2, "test");
  auto trace = run_vame(Vec::Zero(2), op, f, sched, 20);
  CHECK(trace.horizon() == 20);
  for (Nat n = 0; n <= 20; ++n) {
    CHECK(trace.points[static_cast<std::size_t>(n)].norm() == doctest::Approx(0.0));
    CHECK(trace.successive[static_cast<std::size_t>(n)] == doctest::Approx(0.0));
    CHECK(trace.scheme[static_cast<std::size_t>(n)] == doctest::Approx(0.0));
  }
}

TEST_CASE("alpha = 1 reduces the scheme to iterating the contraction") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_affine_contraction(0.5, Mat::Identity(1, 1), vec1(0.0));
  auto sched = plain_schedule([](Nat) { return 1.0; }, 1.0, 1, "pure contraction");
  auto trace = run_vame(vec1(1.0), op, f, sched, 3);
  CHECK(trace.points[1][0] == doctest::Approx(0.5));
  CHECK(trace.points[2][0] == doctest::Approx(0.25));
  CHECK(trace.points[3][0] == doctest::Approx(0.125));
}

TEST_CASE("alpha = 0 reduces the scheme to resolvent iteration") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_constant_map(vec1(0.0));
  auto sched = plain_schedule([](Nat) { return 0.0; }, 1.0, 1, "pure resolvent");
  auto trace = run_vame(vec1(1.0), op, f, sched, 30);
  for (Nat n = 0; n <= 30; ++n) {
    // Halving is exact in binary floating point.
    CHECK(trace.points[static_cast<std::size_t>(n)][0] ==
          std::ldexp(1.0, -static_cast<int>(n)));
    CHECK(trace.successive[static_cast<std::size_t>(n)] ==
          std::ldexp(1.0, -static_cast<int>(n) - 1));
    CHECK(trace.scheme[static_cast<std::size_t>(n)] ==
          std::ldexp(1.0, -static_cast<int>(n) - 1));
  }
}

TEST_CASE("error terms are added after the convex combination") {
  auto op = make_scaled_identity(1, 0.0);  // identity resolvent
  auto f = make_constant_map(vec1(0.0));
  ParamSchedule sched;
  sched.alpha = [](Nat) { return 0.0; };
  sched.lambda = [](Nat) { return 1.0; };
  sched.error = [](Nat n) { return vec1(n == 0 ? 0.25 : 0.0); };
  sched.dim = 1;
  sched.label = "one error kick";
  auto trace = run_vame(vec1(1.0), op, f, sched, 2);
  CHECK(trace.points[1][0] == doctest::Approx(1.25));
  CHECK(trace.points[2][0] == doctest::Approx(1.25));
  CHECK(trace.err_norm[0] == doctest::Approx(0.25));
  CHECK(trace.err_norm[1] == doctest::Approx(0.0));
}

TEST_CASE("run_vame validates schedule data as it is consumed") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_constant_map(vec1(0.0));

  auto bad_alpha = plain_schedule([](Nat n) { return n == 2 ? 1.5 : 0.5; }, 1.0, 1, "alpha");
  CHECK_THROWS_AS(run_vame(vec1(1.0), op, f, bad_alpha, 5), DomainError);
  CHECK_NOTHROW(run_vame(vec1(1.0), op, f, bad_alpha, 0));  // index 2 never consumed

  auto neg_alpha = plain_schedule([](Nat) { return -0.1; }, 1.0, 1, "alpha<0");
  CHECK_THROWS_AS(run_vame(vec1(1.0), op, f, neg_alpha, 1), DomainError);

  auto bad_lambda = plain_schedule([](Nat) { return 0.5; }, 0.0, 1, "lambda");
  bad_lambda.lambda = [](Nat n) { return n == 1 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(run_vame(vec1(1.0), op, f, bad_lambda, 5), DomainError);

  ParamSchedule bad_err = plain_schedule([](Nat) { return 0.5; }, 1.0, 1, "err dim");
  bad_err.error = [](Nat) { return Vec::Zero(2); };
  CHECK_THROWS_AS(run_vame(vec1(1.0), op, f, bad_err, 2), DimensionError);

  CHECK_THROWS_AS(run_vame(Vec::Zero(2), op, f, plain_schedule([](Nat) { return 0.5; }, 1.0,
                                                               1, "x0 dim"),
                           2),
                  DimensionError);
}

// ---------------------------------------------------------------------------
// K_{z,n}

TEST_CASE("kz sequence is constant without errors and accumulates them otherwise") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_affine_contraction(0.5, Mat::Identity(1, 1), vec1(0.0));
  auto sched = plain_schedule([](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); },
                              1.0, 1, "no errors");

  // Stationary at the zero: K_{z,n} = max{0, 0} = 0.
  auto trace0 = run_vame(vec1(0.0), op, f, sched, 5);
  auto kz0 = kz_sequence(trace0, vec1(0.0));
  for (double v : kz0) CHECK(v == doctest::Approx(0.0));

  // x0 = 2, f(z) = z: K_{z,n} = max{2, 0} = 2 throughout.
  auto trace2 = run_vame(vec1(2.0), op, f, sched, 5);
  auto kz2 = kz_sequence(trace2, vec1(0.0));
  for (double v : kz2) CHECK(v == doctest::Approx(2.0));

  // One error of norm 1/2 at n=0 bumps K_{z,n} for n >= 1.
  ParamSchedule with_err = sched;
  with_err.error = [](Nat n) { return vec1(n == 0 ? 0.5 : 0.0); };
  auto trace3 = run_vame(vec1(2.0), op, f, with_err, 5);
  auto kz3 = kz_sequence(trace3, vec1(0.0));
  CHECK(kz3[0] == doctest::Approx(2.0));
  CHECK(kz3[1] == doctest::Approx(2.5));
  CHECK(kz3[5] == doctest::Approx(2.5));

  // The trace run with a known zero fills its own kz column identically.
  REQUIRE(trace3.kz.size() == trace3.points.size());
  for (std::size_t i = 0; i < kz3.size(); ++i) {
    CHECK(trace3.kz[i] == doctest::Approx(kz3[i]));
  }
}

TEST_CASE("kz base uses the anchor displacement scaled by 1/(1-alpha)") {
  auto op = make_scaled_identity(1, 1.0);
  // f(z) = b with z = 0: ||f(z)-z|| / (1-alpha) = 1.2 / 0.4 = 3 > ||x0 - z||.
  auto f = make_affine_contraction(0.6, Mat::Identity(1, 1), vec1(1.2));
  auto sched = plain_schedule([](Nat) { return 0.25; }, 1.0, 1, "anchored");
  auto trace = run_vame(vec1(1.0), op, f, sched, 4);
  auto kz = kz_sequence(trace, vec1(0.0));
  CHECK(kz[0] == doctest::Approx(3.0));
}

// ---------------------------------------------------------------------------
// Trajectory bound lemma

TEST_CASE("bound lemma holds along a genuine run") {
  auto op = make_scaled_identity(2, 1.0);
  auto f = make_affine_contraction(0.5, random_orthogonal(2, 4), Vec::Zero(2));
  auto sched = plain_schedule([](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); },
                              1.0, 2, "bound lemma");
  auto trace = run_vame(Vec::Constant(2, 1.0), op, f, sched, 300);
  auto r = check_bound_lemma(trace, Vec::Zero(2), {0, 3, 17});
  INFO(r.detail);
  CHECK(r);
}

TEST_CASE("bound lemma flags a corrupted trajectory point") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_constant_map(vec1(0.0));
  auto sched = plain_schedule([](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); },
                              1.0, 1, "corruption");
  auto trace = run_vame(vec1(1.0), op, f, sched, 10);
  auto corrupted = trace;
  corrupted.points[5] = vec1(100.0);
  auto r = check_bound_lemma(corrupted, vec1(0.0), {0});
  CHECK_FALSE(r);
  CHECK(r.status == CheckStatus::kFail);
  REQUIRE(r.index.has_value());
  CHECK(*r.index == 5);
  CHECK(r.detail.find("x_n") != std::string::npos);
}

// ---------------------------------------------------------------------------
// One-step contraction estimate

TEST_CASE("main inequality holds for both ratio variants on a constant-step run") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_constant_map(vec1(0.0));
  auto sched = plain_schedule([](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); },
                              1.0, 1, "main inequality");
  auto trace = run_vame(vec1(1.0), op, f, sched, 500);
  auto r1 = check_main_inequality(trace, vec1(0.0), LambdaVariant::kRatio);
  auto r2 = check_main_inequality(trace, vec1(0.0), LambdaVariant::kRatioStar);
  INFO(r1.detail);
  CHECK(r1);
  INFO(r2.detail);
  CHECK(r2);
}

TEST_CASE("main inequality holds with drifting steps and errors") {
  auto op = make_l1_prox(2, 0.5);
  auto f = make_affine_contraction(0.4, random_orthogonal(2, 9), Vec::Constant(2, 0.1));
  ParamSchedule sched;
  sched.alpha = [](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); };
  sched.lambda = [](Nat n) {
    const double m = static_cast<double>(n);
    return (m + 2.0) / (m + 1.0);  // drifts from 2 towards 1
  };
  sched.error = [](Nat n) {
    const double m = static_cast<double>(n) + 2.0;
    return Vec(Vec::Constant(2, 1.0 / (m * m)));
  };
  sched.dim = 2;
  sched.label = "drifting";
  auto trace = run_vame(Vec::Constant(2, 2.0), op, f, sched, 800);
  auto r1 = check_main_inequality(trace, Vec::Zero(2), LambdaVariant::kRatio);
  auto r2 = check_main_inequality(trace, Vec::Zero(2), LambdaVariant::kRatioStar);
  INFO(r1.detail);
  CHECK(r1);
  INFO(r2.detail);
  CHECK(r2);
}

// ---------------------------------------------------------------------------
// Schedule plumbing

TEST_CASE("lambda_upper defaults to the ceiling of the current step") {
  ParamSchedule s = plain_schedule([](Nat) { return 0.5; }, 2.5, 1, "upper");
  CHECK(s.lambda_upper_at(0) == 3);
  s.lambda = [](Nat) { return 0.25; };
  CHECK(s.lambda_upper_at(0) == 1);  // max(1, ceil(0.25))
  s.lambda_upper = [](Nat) { return Nat{7}; };
  CHECK(s.lambda_upper_at(12) == 7);
}

// ---------------------------------------------------------------------------
// CSV output

TEST_CASE("trace CSV has the documented seven columns and one row per index") {
  auto op = make_scaled_identity(1, 1.0);
  auto f = make_constant_map(vec1(0.0));
  auto sched = plain_schedule([](Nat n) { return 1.0 / (static_cast<double>(n) + 2.0); },
                              1.0, 1, "csv");
  auto trace = run_vame(vec1(1.0), op, f, sched, 12);

  std::ostringstream os;
  write_trace_csv(trace, os);
  const std::string text = os.str();
  CHECK(count_lines(text) == 14);  // header + 13 data rows
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header == "n,alpha_n,lambda_n,err_norm,succ_residual,scheme_residual,kz");
  CHECK(count_fields(header) == 7);
  // Every data row carries all seven fields (kz is known here).
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    CHECK(count_fields(line) == 7);
    CHECK(line.back() != ',');
  }

  // Determinism: a second serialization is byte-identical.
  std::ostringstream os2;
  write_trace_csv(trace, os2);
  CHECK(os2.str() == text);
}

TEST_CASE("trace CSV leaves the kz cell empty when no zero is known") {
  ResolventOperator anon(1, [](double gamma, const Vec& x) { return Vec(x / (1.0 + gamma)); },
                         std::nullopt, "anonymous");
  auto f = make_constant_map(vec1(0.0));
  auto sched = plain_schedule([](Nat) { return 0.5; }, 1.0, 1, "no zero");
  auto trace = run_vame(vec1(1.0), anon, f, sched, 3);
  CHECK(trace.kz.empty());
  std::ostringstream os;
  write_trace_csv(trace, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    CHECK(count_fields(line) == 7);
    CHECK(line.back() == ',');  // trailing empty kz cell
  }
}
