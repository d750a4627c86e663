#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vame/iteration.hpp"
#include "vame/rates.hpp"

namespace vame {

/// A certificate's claimed hypothesis failed when re-checked against the
/// schedule data; `hypothesis()` names the failing tag (e.g. "H1en").
class PreconditionViolation : public std::runtime_error {
 public:
  PreconditionViolation(std::string hypothesis, const std::string& detail)
      : std::runtime_error("precondition " + hypothesis + " violated: " + detail),
        hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const { return hypothesis_; }

 private:
  std::string hypothesis_;
};

enum class RowStatus { kPass, kFail, kSkipped };

const char* row_status_name(RowStatus status);

/// One precision level of a verification: the certified index, the least
/// empirically sufficient index within the horizon (if any), and the
/// residual maximum over [certified, horizon]. Skipped rows are those whose
/// certified index lies beyond the trace horizon; their max_residual is
/// meaningless and left NaN.
struct ReportRow {
  Nat k = 0;
  Nat certified = 0;
  std::optional<Nat> empirical;
  double max_residual = 0.0;
  RowStatus status = RowStatus::kPass;
};

struct VerificationReport {
  std::string name;
  ResidualKind kind = ResidualKind::kSuccessive;
  Nat fixed_index = 0;
  Nat horizon = 0;
  std::string provenance;
  std::vector<ReportRow> rows;

  /// True when no row failed; skipped rows are allowed. Everything is
  /// "verified up to the horizon", never proved.
  bool all_pass() const;
  std::size_t count(RowStatus status) const;
};

/// The residual series a certificate kind refers to, read off the trace
/// (recomputing ||x_n - J_{lambda_m} x_n|| for the frozen-step kind).
std::vector<double> residual_series(const IterationTrace& trace, ResidualKind kind,
                                    Nat m = 0);

/// Least n with residuals[i] <= 1/(k+1) + tol for all i in [n, end];
/// nullopt when even the final entry violates the threshold.
std::optional<Nat> empirical_rate(const std::vector<double>& residuals, Nat k,
                                  double tol = kTolFloat);

/// Re-checks the certificate's claimed preconditions against the schedule
/// data over min(trace horizon, precheck_horizon) indices (default 10^4),
/// throwing PreconditionViolation on refutation, then compares residuals
/// against the certified indices for k = 0..k_max. Levels whose certified
/// index exceeds the horizon come back kSkipped.
VerificationReport certify(const IterationTrace& trace, const RateCertificate& cert,
                           Nat k_max, Nat precheck_horizon = 10000);

/// Writes "k,certified,empirical,max_residual,status" rows; empirical and
/// max_residual are left empty when absent. Byte-deterministic.
void write_report_csv(const VerificationReport& report, std::ostream& os);

/// One-line human summary: name, kind, pass/fail/skip counts, horizon.
std::string render_report_summary(const VerificationReport& report);

/// Side-by-side table of certified indices (one column per report, grouped
/// by residual kind) plus the empirical column for each kind present. All
/// reports must come from the same trace/horizon.
std::string compare_certificates(const std::vector<VerificationReport>& reports);

}  // namespace vame
