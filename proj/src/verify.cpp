#include "vame/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace vame {

namespace {

constexpr Nat kPrecheckLevelCap = 32;

/// Runs one schedule-data check for a hypothesis tag. A refutation becomes
/// PreconditionViolation; an out-of-horizon check is inconclusive and the
/// claim stays caller-asserted.
void run_precheck(const std::string& tag, const std::function<CheckResult()>& check) {
  try {
    const CheckResult r = check();
    if (!r) throw PreconditionViolation(tag, r.detail);
  } catch (const HorizonError&) {
  }
}

void recheck_preconditions(const ParamSchedule& sched, const RateCertificate& cert,
                           Nat ph) {
  const auto& mod = sched.moduli;
  const auto alpha_fn = sched.alpha;
  const auto lambda_fn = sched.lambda;
  const auto error_fn = sched.error;

  for (const std::string& tag : cert.preconditions) {
    if (tag == "H1an") {
      if (!mod.sigma1) continue;
      const RealSequence a(alpha_fn, "anchor weights", ph);
      run_precheck(tag, [&] { return check_rate_of_divergence(*mod.sigma1, a, ph); });
    } else if (tag == "H2an") {
      if (!mod.sigma2 || ph == 0) continue;
      const RealSequence diffs(
          [alpha_fn](Nat n) { return std::abs(alpha_fn(n) - alpha_fn(n + 1)); },
          "anchor weight differences", ph - 1);
      const RealSequence sums = partial_sums_of(diffs);
      run_precheck(tag,
                   [&] { return check_cauchy_modulus(*mod.sigma2, sums, kPrecheckLevelCap,
                                                     ph - 1); });
    } else if (tag == "H3an") {
      if (!mod.sigma3) continue;
      const RealSequence a(alpha_fn, "anchor weights", ph);
      run_precheck(tag, [&] {
        return check_rate_of_convergence(*mod.sigma3, a, 0.0, kPrecheckLevelCap, ph);
      });
    } else if (tag == "H1ln" || tag == "H1ln*") {
      const bool star = (tag == "H1ln*");
      const auto& gamma = star ? mod.gamma1_star : mod.gamma1;
      if (!gamma || ph == 0) continue;
      const RealSequence ratios(
          [lambda_fn, star](Nat n) {
            return star ? std::abs(1.0 - lambda_fn(n) / lambda_fn(n + 1))
                        : std::abs(1.0 - lambda_fn(n + 1) / lambda_fn(n));
          },
          star ? "reversed step ratio deviations" : "step ratio deviations", ph - 1);
      const RealSequence sums = partial_sums_of(ratios);
      run_precheck(tag, [&] {
        return check_cauchy_modulus(*gamma, sums, kPrecheckLevelCap, ph - 1);
      });
    } else if (tag == "H3ln") {
      if (!mod.gamma3 || ph == 0) continue;
      const RealSequence drift(
          [lambda_fn](Nat n) { return std::abs(lambda_fn(n) - lambda_fn(n + 1)); },
          "step drift", ph - 1);
      const RealSequence sums = partial_sums_of(drift);
      run_precheck(tag, [&] {
        return check_cauchy_modulus(*mod.gamma3, sums, kPrecheckLevelCap, ph - 1);
      });
    } else if (tag == "H2ln") {
      if (!mod.capital_lambda) continue;
      const double floor = 1.0 / static_cast<double>(*mod.capital_lambda);
      const Nat start = mod.n_lambda.value_or(0);
      for (Nat n = start; n <= ph; ++n) {
        const double l = lambda_fn(n);
        if (l < floor - kTolFloat) {
          throw PreconditionViolation(
              tag, "lambda_" + std::to_string(n) + " falls below the claimed floor 1/" +
                       std::to_string(*mod.capital_lambda));
        }
      }
    } else if (tag == "H1en") {
      if (!mod.theta1) continue;
      const RealSequence norms([error_fn](Nat n) { return error_fn(n).norm(); },
                               "error norms", ph);
      const RealSequence sums = partial_sums_of(norms);
      run_precheck(tag, [&] {
        return check_cauchy_modulus(*mod.theta1, sums, kPrecheckLevelCap, ph);
      });
    } else if (tag == "H2en") {
      if (!mod.theta2) continue;
      const RealSequence norms([error_fn](Nat n) { return error_fn(n).norm(); },
                               "error norms", ph);
      run_precheck(tag, [&] {
        return check_rate_of_convergence(*mod.theta2, norms, 0.0, kPrecheckLevelCap, ph);
      });
    } else if (tag == "H3en") {
      if (!mod.error_sum_bound) continue;
      double sum = 0.0;
      for (Nat n = 0; n <= ph; ++n) {
        sum += error_fn(n).norm();
        if (sum > static_cast<double>(*mod.error_sum_bound) + kTolFloat) {
          throw PreconditionViolation(
              tag, "error sum through n=" + std::to_string(n) +
                       " already exceeds the claimed bound " +
                       std::to_string(*mod.error_sum_bound));
        }
      }
    }
    // Unknown tags are caller-asserted and left alone.
  }
}

}  // namespace

const char* row_status_name(RowStatus status) {
  switch (status) {
    case RowStatus::kPass: return "pass";
    case RowStatus::kFail: return "fail";
    case RowStatus::kSkipped: return "horizon-skipped";
  }
  return "unknown";
}

bool VerificationReport::all_pass() const {
  return std::none_of(rows.begin(), rows.end(),
                      [](const ReportRow& r) { return r.status == RowStatus::kFail; });
}

std::size_t VerificationReport::count(RowStatus status) const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [status](const ReportRow& r) { return r.status == status; }));
}

std::vector<double> residual_series(const IterationTrace& trace, ResidualKind kind, Nat m) {
  switch (kind) {
    case ResidualKind::kSuccessive: return trace.successive;
    case ResidualKind::kScheme: return trace.scheme;
    case ResidualKind::kFixedM: {
      const double lambda_m = trace.sched.lambda(m);
      if (!(lambda_m > 0.0)) {
        throw DomainError("residual_series: lambda at the frozen index is not positive");
      }
      std::vector<double> res;
      res.reserve(trace.points.size());
      for (const Vec& x : trace.points) {
        res.push_back((x - trace.op.resolvent(lambda_m, x)).norm());
      }
      return res;
    }
  }
  throw DomainError("residual_series: unknown residual kind");
}

std::optional<Nat> empirical_rate(const std::vector<double>& residuals, Nat k, double tol) {
  if (residuals.empty()) return std::nullopt;
  const double thr = 1.0 / (static_cast<double>(k) + 1.0) + tol;
  std::size_t i = residuals.size();
  while (i-- > 0) {
    if (residuals[i] > thr) {
      if (i + 1 >= residuals.size()) return std::nullopt;
      return static_cast<Nat>(i + 1);
    }
  }
  return 0;
}

VerificationReport certify(const IterationTrace& trace, const RateCertificate& cert,
                           Nat k_max, Nat precheck_horizon) {
  const Nat h = trace.horizon();
  if (precheck_horizon > 0) {
    recheck_preconditions(trace.sched, cert, std::min(h, precheck_horizon));
  }

  const std::vector<double> res = residual_series(trace, cert.kind, cert.fixed_index);
  std::vector<double> suffix_max(res.size());
  {
    double run = 0.0;
    for (std::size_t i = res.size(); i-- > 0;) {
      run = std::max(run, res[i]);
      suffix_max[i] = run;
    }
  }

  VerificationReport report;
  report.name = cert.name;
  report.kind = cert.kind;
  report.fixed_index = cert.fixed_index;
  report.horizon = h;
  report.provenance = cert.provenance;
  report.rows.reserve(static_cast<std::size_t>(k_max) + 1);
  for (Nat k = 0; k <= k_max; ++k) {
    ReportRow row;
    row.k = k;
    row.certified = cert.modulus(k);
    row.empirical = empirical_rate(res, k);
    if (row.certified > h) {
      row.status = RowStatus::kSkipped;
      row.max_residual = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.max_residual = suffix_max[static_cast<std::size_t>(row.certified)];
      const double thr = 1.0 / (static_cast<double>(k) + 1.0) + kTolFloat;
      row.status = row.max_residual <= thr ? RowStatus::kPass : RowStatus::kFail;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(const VerificationReport& report, std::ostream& os) {
  os.precision(17);
  os << "k,certified,empirical,max_residual,status\n";
  for (const ReportRow& row : report.rows) {
    os << row.k << ',' << row.certified << ',';
    if (row.empirical) os << *row.empirical;
    os << ',';
    if (row.status != RowStatus::kSkipped) os << row.max_residual;
    os << ',' << row_status_name(row.status) << '\n';
  }
}

std::string render_report_summary(const VerificationReport& report) {
  std::ostringstream os;
  os << report.name << " [" << residual_kind_name(report.kind);
  if (report.kind == ResidualKind::kFixedM) os << " m=" << report.fixed_index;
  os << "]: " << report.count(RowStatus::kPass) << " pass, " << report.count(RowStatus::kFail)
     << " fail, " << report.count(RowStatus::kSkipped) << " horizon-skipped (horizon "
     << report.horizon << ")";
  return os.str();
}

std::string compare_certificates(const std::vector<VerificationReport>& reports) {
  if (reports.empty()) return "(no reports)\n";
  std::size_t k_rows = reports.front().rows.size();
  for (const auto& r : reports) k_rows = std::min(k_rows, r.rows.size());

  // One empirical column per distinct residual series among the reports.
  std::vector<std::string> res_keys;
  std::vector<const VerificationReport*> res_owner;
  for (const auto& r : reports) {
    std::string key = residual_kind_name(r.kind);
    if (r.kind == ResidualKind::kFixedM) key += "@m=" + std::to_string(r.fixed_index);
    bool seen = false;
    for (const auto& k : res_keys) {
      if (k == key) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      res_keys.push_back(key);
      res_owner.push_back(&r);
    }
  }

  std::ostringstream os;
  os << "k";
  for (const auto& r : reports) os << '\t' << r.name;
  for (const auto& key : res_keys) os << '\t' << "empirical(" << key << ')';
  os << '\n';
  for (std::size_t i = 0; i < k_rows; ++i) {
    os << reports.front().rows[i].k;
    for (const auto& r : reports) {
      const ReportRow& row = r.rows[i];
      os << '\t';
      if (is_saturated(row.certified)) {
        os << "sat";
      } else {
        os << row.certified;
      }
      if (row.status == RowStatus::kFail) os << "(!)";
      if (row.status == RowStatus::kSkipped) os << "(~)";
    }
    for (const auto* owner : res_owner) {
      const ReportRow& row = owner->rows[i];
      os << '\t';
      if (row.empirical) {
        os << *row.empirical;
      } else {
        os << '-';
      }
    }
    os << '\n';
  }
  os << "legend: (!) failed, (~) certified index beyond horizon, sat = saturated, "
        "- = residuals never settle within the horizon\n";
  return os.str();
}

}  // namespace vame
