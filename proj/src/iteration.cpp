#include "vame/iteration.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace vame {

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double schedule_alpha(const ParamSchedule& sched, Nat n) {
  const double a = sched.alpha(n);
  if (!(a >= 0.0) || a > 1.0) {
    throw DomainError("schedule '" + sched.label + "': alpha_" + std::to_string(n) + "=" +
                      format_real(a) + " is outside [0,1]");
  }
  return a;
}

double schedule_lambda(const ParamSchedule& sched, Nat n) {
  const double l = sched.lambda(n);
  if (!(l > 0.0)) {
    throw DomainError("schedule '" + sched.label + "': lambda_" + std::to_string(n) + "=" +
                      format_real(l) + " is not positive");
  }
  return l;
}

Vec schedule_error(const ParamSchedule& sched, Nat n, Eigen::Index dim) {
  Vec e = sched.error(n);
  if (e.size() != dim) {
    throw DimensionError("schedule '" + sched.label + "': error term at n=" +
                         std::to_string(n) + " has dimension " + std::to_string(e.size()) +
                         ", expected " + std::to_string(dim));
  }
  return e;
}

void require_finite(const Vec& x, Nat n) {
  if (!x.allFinite()) {
    throw NumericError("iterate x_" + std::to_string(n) + " is not finite");
  }
}

}  // namespace

Nat ParamSchedule::lambda_upper_at(Nat m) const {
  if (lambda_upper) return lambda_upper(m);
  const double l = lambda(m);
  if (!(l > 0.0)) {
    throw DomainError("schedule '" + label + "': lambda_" + std::to_string(m) +
                      " is not positive");
  }
  return std::max<Nat>(1, nat_ceil(l));
}

IterationTrace run_vame(const Vec& x0, const ResolventOperator& op,
                        const ContractionMap& f, const ParamSchedule& sched, Nat n_max) {
  if (x0.size() != op.dim()) {
    throw DimensionError("run_vame: starting point has dimension " +
                         std::to_string(x0.size()) + ", operator expects " +
                         std::to_string(op.dim()));
  }
  if (f.dim() != op.dim()) {
    throw DimensionError("run_vame: contraction dimension does not match the operator");
  }
  if (sched.dim != 0 && sched.dim != op.dim()) {
    throw DimensionError("run_vame: schedule dimension does not match the operator");
  }
  if (!sched.alpha || !sched.lambda || !sched.error) {
    throw DomainError("run_vame: schedule must provide alpha, lambda, and error terms");
  }

  IterationTrace trace{{}, {}, {}, {}, {}, op, f, sched, op.known_zero()};
  const std::size_t count = static_cast<std::size_t>(n_max) + 1;
  trace.points.reserve(count);
  trace.successive.reserve(count);
  trace.scheme.reserve(count);
  trace.err_norm.reserve(count);

  Vec x = x0;
  require_finite(x, 0);
  trace.points.push_back(x);
  for (Nat n = 0; n <= n_max; ++n) {
    const double alpha_n = schedule_alpha(sched, n);
    const double lambda_n = schedule_lambda(sched, n);
    const Vec jx = op.resolvent(lambda_n, x);
    const Vec e = schedule_error(sched, n, op.dim());
    const Vec next = alpha_n * f(x) + (1.0 - alpha_n) * jx + e;
    require_finite(next, n + 1);

    trace.scheme.push_back((x - jx).norm());
    trace.err_norm.push_back(e.norm());
    trace.successive.push_back((next - x).norm());
    if (n < n_max) trace.points.push_back(next);
    x = next;
  }

  if (trace.zero) {
    trace.kz = kz_sequence(trace, *trace.zero);
  }
  return trace;
}

std::vector<double> kz_sequence(const IterationTrace& trace, const Vec& z) {
  if (z.size() != trace.op.dim()) {
    throw DimensionError("kz_sequence: z has the wrong dimension");
  }
  const double alpha = trace.f.alpha();
  const double base = std::max((trace.points.front() - z).norm(),
                               (trace.f(z) - z).norm() / (1.0 - alpha));
  std::vector<double> kz;
  kz.reserve(trace.points.size());
  kz.push_back(base);
  for (std::size_t n = 0; n + 1 < trace.points.size(); ++n) {
    kz.push_back(kz.back() + trace.err_norm[n]);
  }
  return kz;
}

CheckResult check_bound_lemma(const IterationTrace& trace, const Vec& z,
                              const std::vector<Nat>& m_samples, double tol) {
  const std::vector<double> kz = kz_sequence(trace, z);
  const Nat N = trace.horizon();
  for (Nat n = 0; n <= N; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const Vec& x = trace.points[i];
    const Vec fx = trace.f(x);
    if ((x - z).norm() > kz[i] + tol) {
      return CheckResult::fail("||x_n - z|| exceeds K_{z,n} at n=" + std::to_string(n), n);
    }
    if ((fx - z).norm() > kz[i] + tol) {
      return CheckResult::fail("||f(x_n) - z|| exceeds K_{z,n} at n=" + std::to_string(n), n);
    }
    const double next_kz = (n < N) ? kz[i + 1] : kz[i] + trace.err_norm[i];
    if (trace.successive[i] > 2.0 * next_kz + tol) {
      return CheckResult::fail("||x_{n+1} - x_n|| exceeds 2 K_{z,n+1} at n=" + std::to_string(n),
                               n);
    }
    for (const Nat m : m_samples) {
      const double lambda_m = trace.sched.lambda(m);
      const Vec jm = trace.op.resolvent(lambda_m, x);
      if ((jm - z).norm() > kz[i] + tol) {
        return CheckResult::fail("||J_{lambda_m} x_n - z|| exceeds K_{z,n} at n=" +
                                     std::to_string(n) + ", m=" + std::to_string(m),
                                 n);
      }
      if ((jm - x).norm() > 2.0 * kz[i] + tol) {
        return CheckResult::fail("||J_{lambda_m} x_n - x_n|| exceeds 2 K_{z,n} at n=" +
                                     std::to_string(n) + ", m=" + std::to_string(m),
                                 n);
      }
      if ((jm - fx).norm() > 2.0 * kz[i] + tol) {
        return CheckResult::fail("||J_{lambda_m} x_n - f(x_n)|| exceeds 2 K_{z,n} at n=" +
                                     std::to_string(n) + ", m=" + std::to_string(m),
                                 n);
      }
    }
  }
  return CheckResult::pass();
}

CheckResult check_main_inequality(const IterationTrace& trace, const Vec& z,
                                  LambdaVariant variant, double tol) {
  const std::vector<double> kz = kz_sequence(trace, z);
  const Nat N = trace.horizon();
  if (N == 0) return CheckResult::pass("horizon too short for a one-step comparison");
  const double alpha = trace.f.alpha();
  for (Nat n = 0; n + 1 <= N; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const double a_n = trace.sched.alpha(n);
    const double a_next = trace.sched.alpha(n + 1);
    const double l_n = trace.sched.lambda(n);
    const double l_next = trace.sched.lambda(n + 1);
    const double ratio_dev = (variant == LambdaVariant::kRatio)
                                 ? std::abs(1.0 - l_next / l_n)
                                 : std::abs(1.0 - l_n / l_next);
    const double drift = 2.0 * kz[i] * (std::abs(a_next - a_n) + (1.0 - a_next) * ratio_dev);
    const Vec e_n = trace.sched.error(n);
    const Vec e_next = trace.sched.error(n + 1);
    const double lhs = trace.successive[i + 1];
    const double rhs = (1.0 - (1.0 - alpha) * a_next) * trace.successive[i] + drift +
                       (e_next - e_n).norm();
    if (lhs > rhs + tol) {
      return CheckResult::fail("one-step contraction estimate violated at n=" +
                                   std::to_string(n) + ": " + format_real(lhs) + " > " +
                                   format_real(rhs),
                               n);
    }
  }
  return CheckResult::pass();
}

void write_trace_csv(const IterationTrace& trace, std::ostream& os) {
  os.precision(17);
  os << "n,alpha_n,lambda_n,err_norm,succ_residual,scheme_residual,kz\n";
  const Nat N = trace.horizon();
  for (Nat n = 0; n <= N; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    os << n << ',' << trace.sched.alpha(n) << ',' << trace.sched.lambda(n) << ','
       << trace.err_norm[i] << ',' << trace.successive[i] << ',' << trace.scheme[i] << ',';
    if (!trace.kz.empty()) os << trace.kz[i];
    os << '\n';
  }
}

}  // namespace vame
