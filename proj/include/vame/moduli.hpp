#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vame/nat.hpp"

namespace vame {

/// Float comparisons in every quantitative check use this slack, applied on
/// the bound side only: a residual r passes against a threshold t iff
/// r <= t + kTolFloat.
inline constexpr double kTolFloat = 1e-9;

/// A real sequence presented as an oracle over indices 0..horizon().
/// Terms are expected to be nonnegative; an evaluation below -kTolFloat
/// throws DomainError, evaluation past the horizon throws HorizonError.
class RealSequence {
 public:
  RealSequence(std::function<double(Nat)> term, std::string description,
               Nat horizon = kNatCeiling);

  /// Wraps a finite table; the horizon is the last valid index.
  static RealSequence from_values(std::vector<double> values, std::string description);

  double operator()(Nat n) const;
  Nat horizon() const { return horizon_; }
  const std::string& description() const { return description_; }

 private:
  std::function<double(Nat)> term_;
  std::string description_;
  Nat horizon_;
};

/// Running partial sums s_n = sum_{i=0}^{n} a_i of `terms`, memoized so that
/// repeated and increasing access costs O(1) amortized per index.
RealSequence partial_sums_of(const RealSequence& terms);

/// A nondecreasing map from precision levels (or counters) to indices: the
/// common shape of Cauchy moduli, rates of convergence, and rates of
/// divergence. Construction from an arbitrary map normalizes it with a
/// running maximum, so callers can rely on monotonicity; closed-form maps
/// that are nondecreasing by construction skip that machinery.
class Modulus {
 public:
  /// Default-constructed moduli are vacuous: they saturate at every level,
  /// so they never claim an index and downstream checks report everything as
  /// out of horizon. Assemblers that fill certificates field by field start
  /// from this.
  Modulus();

  static Modulus from_fn(std::function<Nat(Nat)> fn, std::string provenance);
  /// For maps already nondecreasing; no running-maximum bookkeeping.
  static Modulus from_monotone_fn(std::function<Nat(Nat)> fn, std::string provenance);
  static Modulus constant(Nat value, std::string provenance);
  /// Normalizes the table eagerly. Evaluation past the table saturates,
  /// which downstream checks report as out-of-horizon rather than as a
  /// small (and unsupported) index.
  static Modulus from_table(std::vector<Nat> values, std::string provenance);

  Nat operator()(Nat k) const;
  bool saturated_at(Nat k) const { return is_saturated((*this)(k)); }
  const std::string& provenance() const;
  Modulus with_provenance(std::string provenance) const;

 private:
  struct State;
  explicit Modulus(std::shared_ptr<State> state) : state_(std::move(state)) {}
  std::shared_ptr<State> state_;
};

enum class CheckStatus { kPass, kFail, kPreconditionViolation };

/// Verdict of a finite-horizon check. A pass means "verified on every index
/// the horizon allowed", never a proof; `detail` names the first
/// counterexample on failure and records skipped ranges on a pass.
struct CheckResult {
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
  std::optional<Nat> index;

  explicit operator bool() const { return status == CheckStatus::kPass; }

  static CheckResult pass(std::string detail = {});
  static CheckResult fail(std::string detail, std::optional<Nat> index = std::nullopt);
  static CheckResult precondition(std::string detail, std::optional<Nat> index = std::nullopt);
};

/// Checks that theta is a rate of divergence for the series with terms b:
/// sum_{i=0}^{theta(n)} b_i >= n for each n <= n_max. Skips the n whose
/// theta(n) exceeds b's horizon (they form a suffix); throws HorizonError
/// if that leaves nothing to check.
CheckResult check_rate_of_divergence(const Modulus& theta, const RealSequence& b, Nat n_max);

/// Checks that phi is a Cauchy modulus for a: |a_{n+p} - a_n| <= 1/(k+1)
/// for every k <= k_max, n >= phi(k), and n, n+p <= n_max. Requires
/// n_max <= a.horizon(); k with phi(k) > n_max are skipped.
CheckResult check_cauchy_modulus(const Modulus& phi, const RealSequence& a,
                                 Nat k_max, Nat n_max);

/// Checks that phi is a rate of convergence of a towards `limit`:
/// |a_n - limit| <= 1/(k+1) for every k <= k_max and phi(k) <= n <= n_max.
CheckResult check_rate_of_convergence(const Modulus& phi, const RealSequence& a,
                                      double limit, Nat k_max, Nat n_max);

/// Checks theta(n) + 2 >= n for n <= n_max, the floor every rate of
/// divergence of a series with terms in [0,1] must respect.
CheckResult divergence_floor_check(const Modulus& theta, Nat n_max);

/// Cauchy modulus for c_n = p*a_n + q*b_n from Cauchy moduli of a and b:
/// k -> max{phi1(2p(k+1)-1), phi2(2q(k+1)-1)}. A zero weight drops its
/// branch (the scaled term vanishes); p = q = 0 yields the constant-0 modulus.
Modulus combine_cauchy_moduli(Nat p, Nat q, const Modulus& phi1, const Modulus& phi2);

/// Rate of convergence towards 0 for s_{n+1} <= (1-a_n)s_n + c_n with
/// s_n in [0,L], given a rate of divergence theta for sum a_n and a Cauchy
/// modulus chi for sum c_n: k -> theta(chi(2k+1) + 1 + ceil(ln(2L(k+1)))) + 1.
Modulus xu_rate(const Modulus& theta, const Modulus& chi, Nat L);

/// Replays the recurrence hypotheses behind xu_rate on sampled data, then
/// checks Sigma as a rate of convergence of s towards 0.
CheckResult check_xu_recurrence_bound(const RealSequence& s, const RealSequence& a,
                                      const RealSequence& c, Nat L,
                                      const Modulus& Sigma, Nat k_max, Nat n_max);

/// The closed-form decay bound J*L / (gamma*(n+J)).
double sabach_shtern_bound(double L, Nat J, Nat n, double gamma);

/// Checks the decay lemma for s_{n+1} <= (1-gamma*a_{n+1})s_n +
/// (a_n - a_{n+1})c_n with a_n = N/(gamma(n+J)): replays the recurrence and
/// data hypotheses, then compares s_n against sabach_shtern_bound. Data
/// hypothesis failures yield kPreconditionViolation (and the bound is still
/// scanned so the detail reports both); parameter domain violations throw.
CheckResult check_sabach_shtern(const RealSequence& s, const RealSequence& c,
                                double L, Nat N, Nat J, double gamma, Nat n_max,
                                double tol = kTolFloat);

/// Least-index Cauchy modulus mined from the first `horizon`+1 values of a.
/// Valid as evidence only on the mined range: entries that no index within
/// the horizon achieves saturate, and so does evaluation beyond k_cap.
Modulus brute_force_cauchy_modulus(const RealSequence& a, Nat horizon, Nat k_cap,
                                   std::string label = {});

/// Least-index rate of convergence of a towards `limit`, mined as above.
Modulus brute_force_rate_of_convergence(const RealSequence& a, double limit,
                                        Nat horizon, Nat k_cap, std::string label = {});

/// Least-index rate of divergence for the series with terms b, mined from
/// partial sums up to `horizon`; saturates at counters the horizon never
/// reaches.
Modulus brute_force_divergence_rate(const RealSequence& b, Nat horizon, Nat n_cap,
                                    std::string label = {});

}  // namespace vame
