#include "vame/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace vame {

namespace {

std::string trim_provenance(std::string s) {
  constexpr std::size_t kMax = 200;
  if (s.size() > kMax) {
    s.resize(kMax - 3);
    s += "...";
  }
  return s;
}

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double threshold_for(Nat k) { return 1.0 / (static_cast<double>(k) + 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// RealSequence

RealSequence::RealSequence(std::function<double(Nat)> term, std::string description,
                           Nat horizon)
    : term_(std::move(term)), description_(std::move(description)), horizon_(horizon) {
  if (!term_) throw DomainError("RealSequence: null term function");
}

RealSequence RealSequence::from_values(std::vector<double> values, std::string description) {
  if (values.empty()) throw DomainError("RealSequence::from_values: empty table");
  const Nat horizon = values.size() - 1;
  auto data = std::make_shared<std::vector<double>>(std::move(values));
  return RealSequence([data](Nat n) { return (*data)[static_cast<std::size_t>(n)]; },
                      std::move(description), horizon);
}

double RealSequence::operator()(Nat n) const {
  if (n > horizon_) {
    throw HorizonError("sequence '" + description_ + "' evaluated at " + std::to_string(n) +
                       " past horizon " + std::to_string(horizon_));
  }
  const double v = term_(n);
  if (std::isnan(v)) {
    throw NumericError("sequence '" + description_ + "' is NaN at " + std::to_string(n));
  }
  if (v < -kTolFloat) {
    throw DomainError("sequence '" + description_ + "' is negative at " + std::to_string(n) +
                      " (value " + format_real(v) + ")");
  }
  return v;
}

RealSequence partial_sums_of(const RealSequence& terms) {
  struct Cache {
    std::mutex mu;
    std::vector<double> sums;  // sums[n] = a_0 + ... + a_n
    RealSequence terms;
    explicit Cache(RealSequence t) : terms(std::move(t)) {}
  };
  auto cache = std::make_shared<Cache>(terms);
  auto eval = [cache](Nat n) {
    std::lock_guard<std::mutex> lock(cache->mu);
    auto& sums = cache->sums;
    while (sums.size() <= n) {
      const Nat i = sums.size();
      const double prev = sums.empty() ? 0.0 : sums.back();
      sums.push_back(prev + cache->terms(i));
    }
    return sums[static_cast<std::size_t>(n)];
  };
  return RealSequence(std::move(eval), "partial sums of " + terms.description(),
                      terms.horizon());
}

// ---------------------------------------------------------------------------
// Modulus

struct Modulus::State {
  std::function<Nat(Nat)> raw;
  std::string provenance;
  bool monotone = false;

  // Running-maximum normalization for maps not monotone by construction:
  // a dense prefix memo for small arguments and sparse checkpoints beyond.
  mutable std::mutex mu;
  mutable std::vector<Nat> prefix;
  mutable std::map<Nat, Nat> checkpoints;

  static constexpr Nat kPrefixCap = Nat{1} << 16;
  static constexpr Nat kScanBudget = Nat{1} << 25;

  Nat eval(Nat k) const {
    if (monotone) return raw(k);
    std::lock_guard<std::mutex> lock(mu);
    if (k < kPrefixCap) {
      extend_prefix(k);
      return prefix[static_cast<std::size_t>(k)];
    }
    extend_prefix(kPrefixCap - 1);
    Nat best = prefix.back();
    Nat start = kPrefixCap;
    if (auto it = checkpoints.upper_bound(k); it != checkpoints.begin()) {
      --it;
      best = std::max(best, it->second);
      start = std::max(start, sat_add(it->first, 1));
    }
    if (start <= k) {
      if (k - start + 1 <= kScanBudget) {
        for (Nat i = start; i <= k; ++i) best = std::max(best, raw(i));
      } else {
        // Beyond the enforcement budget only the endpoint is sampled; the
        // result stays a lower bound of the true running maximum.
        best = std::max(best, raw(k));
      }
    }
    checkpoints[k] = best;
    return best;
  }

  void extend_prefix(Nat upto) const {
    while (prefix.size() <= upto) {
      const Nat i = prefix.size();
      const Nat v = raw(i);
      prefix.push_back(prefix.empty() ? v : std::max(prefix.back(), v));
    }
  }
};

Modulus::Modulus() : Modulus(constant(kNatCeiling, "unset modulus").state_) {}

Modulus Modulus::from_fn(std::function<Nat(Nat)> fn, std::string provenance) {
  if (!fn) throw DomainError("Modulus::from_fn: null function");
  auto state = std::make_shared<State>();
  state->raw = std::move(fn);
  state->provenance = trim_provenance(std::move(provenance));
  state->monotone = false;
  return Modulus(std::move(state));
}

Modulus Modulus::from_monotone_fn(std::function<Nat(Nat)> fn, std::string provenance) {
  if (!fn) throw DomainError("Modulus::from_monotone_fn: null function");
  auto state = std::make_shared<State>();
  state->raw = std::move(fn);
  state->provenance = trim_provenance(std::move(provenance));
  state->monotone = true;
  return Modulus(std::move(state));
}

Modulus Modulus::constant(Nat value, std::string provenance) {
  return from_monotone_fn([value](Nat) { return value; }, std::move(provenance));
}

Modulus Modulus::from_table(std::vector<Nat> values, std::string provenance) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    values[i] = std::max(values[i], values[i - 1]);
  }
  auto data = std::make_shared<std::vector<Nat>>(std::move(values));
  return from_monotone_fn(
      [data](Nat k) {
        if (k >= data->size()) return kNatCeiling;
        return (*data)[static_cast<std::size_t>(k)];
      },
      std::move(provenance));
}

Nat Modulus::operator()(Nat k) const { return state_->eval(k); }

const std::string& Modulus::provenance() const { return state_->provenance; }

Modulus Modulus::with_provenance(std::string provenance) const {
  auto state = std::make_shared<State>();
  state->raw = [base = *this](Nat k) { return base(k); };
  state->provenance = trim_provenance(std::move(provenance));
  state->monotone = true;  // evaluation goes through the normalized base
  return Modulus(std::move(state));
}

// ---------------------------------------------------------------------------
// CheckResult

CheckResult CheckResult::pass(std::string detail) {
  return CheckResult{CheckStatus::kPass, std::move(detail), std::nullopt};
}

CheckResult CheckResult::fail(std::string detail, std::optional<Nat> index) {
  return CheckResult{CheckStatus::kFail, std::move(detail), index};
}

CheckResult CheckResult::precondition(std::string detail, std::optional<Nat> index) {
  return CheckResult{CheckStatus::kPreconditionViolation, std::move(detail), index};
}

// ---------------------------------------------------------------------------
// Checkers

CheckResult check_rate_of_divergence(const Modulus& theta, const RealSequence& b,
                                     Nat n_max) {
  double sum = 0.0;
  Nat summed_to = 0;  // number of terms accumulated so far
  bool any_checked = false;
  Nat first_skipped = 0;
  bool skipped = false;
  for (Nat n = 0; n <= n_max; ++n) {
    const Nat t = theta(n);
    if (t > b.horizon()) {
      // theta is nondecreasing, so every later n is also out of range.
      skipped = true;
      first_skipped = n;
      break;
    }
    while (summed_to <= t) {
      sum += b(summed_to);
      ++summed_to;
    }
    any_checked = true;
    if (sum < static_cast<double>(n) - kTolFloat) {
      return CheckResult::fail("partial sum through index " + std::to_string(t) + " is " +
                                   format_real(sum) + " < " + std::to_string(n) +
                                   " at counter n=" + std::to_string(n),
                               n);
    }
  }
  if (!any_checked) {
    throw HorizonError("check_rate_of_divergence: theta(0)=" + std::to_string(theta(0)) +
                       " already exceeds the series horizon " + std::to_string(b.horizon()));
  }
  std::string detail;
  if (skipped) {
    detail = "counters n >= " + std::to_string(first_skipped) +
             " skipped: theta(n) exceeds the series horizon";
  }
  return CheckResult::pass(std::move(detail));
}

namespace {

// Suffix extrema of a[0..n_max]; shared by the window checks below.
struct SuffixEnvelope {
  std::vector<double> max_from;
  std::vector<double> min_from;

  SuffixEnvelope(const RealSequence& a, Nat n_max) {
    const std::size_t n = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = a(static_cast<Nat>(i));
    max_from.assign(n, 0.0);
    min_from.assign(n, 0.0);
    max_from[n - 1] = min_from[n - 1] = vals[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      max_from[i] = std::max(vals[i], max_from[i + 1]);
      min_from[i] = std::min(vals[i], min_from[i + 1]);
    }
  }

  double spread_from(Nat w) const {
    return max_from[static_cast<std::size_t>(w)] - min_from[static_cast<std::size_t>(w)];
  }
};

}  // namespace

CheckResult check_cauchy_modulus(const Modulus& phi, const RealSequence& a,
                                 Nat k_max, Nat n_max) {
  if (n_max > a.horizon()) {
    throw HorizonError("check_cauchy_modulus: n_max " + std::to_string(n_max) +
                       " exceeds the sequence horizon " + std::to_string(a.horizon()));
  }
  const SuffixEnvelope env(a, n_max);
  Nat skipped_from = 0;
  bool skipped = false;
  bool any_checked = false;
  for (Nat k = 0; k <= k_max; ++k) {
    const Nat w = phi(k);
    if (w > n_max) {
      skipped = true;
      skipped_from = k;
      break;  // phi is nondecreasing
    }
    any_checked = true;
    const double spread = env.spread_from(w);
    if (spread > threshold_for(k) + kTolFloat) {
      return CheckResult::fail("spread " + format_real(spread) + " over [" +
                                   std::to_string(w) + ", " + std::to_string(n_max) +
                                   "] exceeds 1/(k+1) at k=" + std::to_string(k),
                               k);
    }
  }
  if (!any_checked) {
    throw HorizonError("check_cauchy_modulus: phi(0)=" + std::to_string(phi(0)) +
                       " already exceeds n_max " + std::to_string(n_max));
  }
  std::string detail;
  if (skipped) {
    detail = "levels k >= " + std::to_string(skipped_from) + " skipped: phi(k) exceeds n_max";
  }
  return CheckResult::pass(std::move(detail));
}

CheckResult check_rate_of_convergence(const Modulus& phi, const RealSequence& a,
                                      double limit, Nat k_max, Nat n_max) {
  if (n_max > a.horizon()) {
    throw HorizonError("check_rate_of_convergence: n_max " + std::to_string(n_max) +
                       " exceeds the sequence horizon " + std::to_string(a.horizon()));
  }
  const std::size_t n = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> dev_from(n);
  {
    double run = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      run = std::max(run, std::abs(a(static_cast<Nat>(i)) - limit));
      dev_from[i] = run;
    }
  }
  Nat skipped_from = 0;
  bool skipped = false;
  bool any_checked = false;
  for (Nat k = 0; k <= k_max; ++k) {
    const Nat w = phi(k);
    if (w > n_max) {
      skipped = true;
      skipped_from = k;
      break;
    }
    any_checked = true;
    const double dev = dev_from[static_cast<std::size_t>(w)];
    if (dev > threshold_for(k) + kTolFloat) {
      return CheckResult::fail("deviation " + format_real(dev) + " from " +
                                   format_real(limit) + " over [" + std::to_string(w) + ", " +
                                   std::to_string(n_max) +
                                   "] exceeds 1/(k+1) at k=" + std::to_string(k),
                               k);
    }
  }
  if (!any_checked) {
    throw HorizonError("check_rate_of_convergence: phi(0)=" + std::to_string(phi(0)) +
                       " already exceeds n_max " + std::to_string(n_max));
  }
  std::string detail;
  if (skipped) {
    detail = "levels k >= " + std::to_string(skipped_from) + " skipped: phi(k) exceeds n_max";
  }
  return CheckResult::pass(std::move(detail));
}

CheckResult divergence_floor_check(const Modulus& theta, Nat n_max) {
  for (Nat n = 0; n <= n_max; ++n) {
    if (sat_add(theta(n), 2) < n) {
      return CheckResult::fail("theta(" + std::to_string(n) + ")=" + std::to_string(theta(n)) +
                                   " is below the floor n-2=" + std::to_string(n - 2),
                               n);
    }
  }
  return CheckResult::pass();
}

// ---------------------------------------------------------------------------
// Combinators

Modulus combine_cauchy_moduli(Nat p, Nat q, const Modulus& phi1, const Modulus& phi2) {
  std::string prov = "combined Cauchy modulus for p*a+q*b (p=" + std::to_string(p) +
                     ", q=" + std::to_string(q) + "; left: " + phi1.provenance() +
                     "; right: " + phi2.provenance() + ")";
  // A zero weight makes the corresponding branch vacuous: the scaled term is
  // identically zero, so its modulus contributes nothing to the combination.
  if (p == 0 && q == 0) {
    return Modulus::constant(0, std::move(prov));
  }
  auto fn = [p, q, phi1, phi2](Nat k) {
    Nat bound = 0;
    if (p > 0) {
      const Nat level1 = sat_sub(sat_mul(sat_mul(2, p), sat_add(k, 1)), 1);
      bound = std::max(bound, phi1(level1));
    }
    if (q > 0) {
      const Nat level2 = sat_sub(sat_mul(sat_mul(2, q), sat_add(k, 1)), 1);
      bound = std::max(bound, phi2(level2));
    }
    return bound;
  };
  return Modulus::from_monotone_fn(std::move(fn), std::move(prov));
}

Modulus xu_rate(const Modulus& theta, const Modulus& chi, Nat L) {
  if (L == 0) throw DomainError("xu_rate: the bound L must be a positive natural");
  auto fn = [theta, chi, L](Nat k) {
    const Nat level = sat_add(sat_mul(2, k), 1);
    const double log_arg = 2.0 * static_cast<double>(L) * (static_cast<double>(k) + 1.0);
    const Nat inner = sat_add(sat_add(chi(level), 1), ceil_log_conservative(log_arg));
    if (is_saturated(inner)) return kNatCeiling;
    return sat_add(theta(inner), 1);
  };
  std::string prov = "recurrence decay rate (L=" + std::to_string(L) +
                     "; divergence: " + theta.provenance() +
                     "; error-sum Cauchy: " + chi.provenance() + ")";
  return Modulus::from_monotone_fn(std::move(fn), std::move(prov));
}

CheckResult check_xu_recurrence_bound(const RealSequence& s, const RealSequence& a,
                                      const RealSequence& c, Nat L,
                                      const Modulus& Sigma, Nat k_max, Nat n_max) {
  if (L == 0) throw DomainError("check_xu_recurrence_bound: L must be positive");
  const double Ld = static_cast<double>(L);
  for (Nat n = 0; n <= n_max; ++n) {
    const double an = a(n);
    if (an < -kTolFloat || an > 1.0 + kTolFloat) {
      return CheckResult::precondition(
          "weight a_" + std::to_string(n) + "=" + format_real(an) + " is outside [0,1]", n);
    }
    const double sn = s(n);
    if (sn > Ld + kTolFloat) {
      return CheckResult::precondition(
          "state s_" + std::to_string(n) + "=" + format_real(sn) + " exceeds the bound L", n);
    }
    if (n < n_max) {
      const double rhs = (1.0 - an) * sn + c(n);
      if (s(n + 1) > rhs + kTolFloat) {
        return CheckResult::precondition("recurrence violated at n=" + std::to_string(n) +
                                             ": s_{n+1}=" + format_real(s(n + 1)) + " > " +
                                             format_real(rhs),
                                         n);
      }
    }
  }
  return check_rate_of_convergence(Sigma, s, 0.0, k_max, n_max);
}

// ---------------------------------------------------------------------------
// Decay lemma

double sabach_shtern_bound(double L, Nat J, Nat n, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw DomainError("sabach_shtern_bound: gamma must lie in (0,1]");
  }
  if (J < 2) throw DomainError("sabach_shtern_bound: J must be at least 2");
  if (!(L >= 0.0)) throw DomainError("sabach_shtern_bound: L must be nonnegative");
  return static_cast<double>(J) * L / (gamma * (static_cast<double>(n) + static_cast<double>(J)));
}

CheckResult check_sabach_shtern(const RealSequence& s, const RealSequence& c,
                                double L, Nat N, Nat J, double gamma, Nat n_max,
                                double tol) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw DomainError("check_sabach_shtern: gamma must lie in (0,1]");
  }
  if (N < 2 || J < N) {
    throw DomainError("check_sabach_shtern: need J >= N >= 2");
  }
  const auto weight = [&](Nat n) {
    return static_cast<double>(N) / (gamma * (static_cast<double>(n) + static_cast<double>(J)));
  };

  std::string precondition_detail;
  std::optional<Nat> precondition_index;
  if (s(0) > L + tol) {
    precondition_detail = "s_0=" + format_real(s(0)) + " exceeds L=" + format_real(L);
    precondition_index = 0;
  }
  for (Nat n = 0; n <= n_max && precondition_detail.empty(); ++n) {
    if (c(n) > L + tol) {
      precondition_detail = "c_" + std::to_string(n) + "=" + format_real(c(n)) + " exceeds L";
      precondition_index = n;
      break;
    }
    if (n < n_max) {
      const double rhs =
          (1.0 - gamma * weight(n + 1)) * s(n) + (weight(n) - weight(n + 1)) * c(n);
      if (s(n + 1) > rhs + tol) {
        precondition_detail = "recurrence violated at n=" + std::to_string(n) +
                              ": s_{n+1}=" + format_real(s(n + 1)) + " > " + format_real(rhs);
        precondition_index = n;
        break;
      }
    }
  }

  std::string bound_detail;
  for (Nat n = 0; n <= n_max; ++n) {
    const double bound = sabach_shtern_bound(L, J, n, gamma);
    if (s(n) > bound + tol) {
      bound_detail = "s_" + std::to_string(n) + "=" + format_real(s(n)) +
                     " exceeds the decay bound " + format_real(bound);
      if (precondition_detail.empty()) {
        return CheckResult::fail(std::move(bound_detail), n);
      }
      break;
    }
  }

  if (!precondition_detail.empty()) {
    std::string detail = precondition_detail;
    if (!bound_detail.empty()) detail += "; " + bound_detail;
    return CheckResult::precondition(std::move(detail), precondition_index);
  }
  return CheckResult::pass();
}

// ---------------------------------------------------------------------------
// Brute-force miners

namespace {

std::string mined_provenance(std::string label, const char* what, Nat horizon) {
  std::string prov = label.empty() ? std::string(what) : std::move(label);
  prov += " (least-index ";
  prov += what;
  prov += " mined from data, horizon-limited to n<=" + std::to_string(horizon) + ")";
  return prov;
}

}  // namespace

Modulus brute_force_cauchy_modulus(const RealSequence& a, Nat horizon, Nat k_cap,
                                   std::string label) {
  if (horizon > a.horizon()) {
    throw HorizonError("brute_force_cauchy_modulus: horizon exceeds the sequence horizon");
  }
  const SuffixEnvelope env(a, horizon);
  std::vector<Nat> table(static_cast<std::size_t>(k_cap) + 1, kNatCeiling);
  Nat w = 0;
  for (Nat k = 0; k <= k_cap; ++k) {
    const double thr = threshold_for(k);
    while (w <= horizon && env.spread_from(w) > thr) ++w;
    if (w > horizon) break;  // unreachable for this and every finer level
    table[static_cast<std::size_t>(k)] = w;
  }
  return Modulus::from_table(std::move(table),
                             mined_provenance(std::move(label), "Cauchy modulus", horizon));
}

Modulus brute_force_rate_of_convergence(const RealSequence& a, double limit,
                                        Nat horizon, Nat k_cap, std::string label) {
  if (horizon > a.horizon()) {
    throw HorizonError("brute_force_rate_of_convergence: horizon exceeds the sequence horizon");
  }
  const std::size_t n = static_cast<std::size_t>(horizon) + 1;
  std::vector<double> dev_from(n);
  {
    double run = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      run = std::max(run, std::abs(a(static_cast<Nat>(i)) - limit));
      dev_from[i] = run;
    }
  }
  std::vector<Nat> table(static_cast<std::size_t>(k_cap) + 1, kNatCeiling);
  Nat w = 0;
  for (Nat k = 0; k <= k_cap; ++k) {
    const double thr = threshold_for(k);
    while (w <= horizon && dev_from[static_cast<std::size_t>(w)] > thr) ++w;
    if (w > horizon) break;
    table[static_cast<std::size_t>(k)] = w;
  }
  return Modulus::from_table(std::move(table),
                             mined_provenance(std::move(label), "rate of convergence", horizon));
}

Modulus brute_force_divergence_rate(const RealSequence& b, Nat horizon, Nat n_cap,
                                    std::string label) {
  if (horizon > b.horizon()) {
    throw HorizonError("brute_force_divergence_rate: horizon exceeds the series horizon");
  }
  std::vector<Nat> table(static_cast<std::size_t>(n_cap) + 1, kNatCeiling);
  double sum = 0.0;
  Nat m = 0;
  bool exhausted = false;
  for (Nat n = 0; n <= n_cap; ++n) {
    const double target = static_cast<double>(n);
    while (!exhausted && sum < target) {
      if (m > horizon) {
        exhausted = true;
        break;
      }
      sum += b(m);
      ++m;
    }
    if (sum < target) break;  // later counters only need more
    // Partial sums through index m-1 reach the target; m=0 can only happen
    // at n=0 where the empty comparison 0 >= 0 holds with index 0.
    table[static_cast<std::size_t>(n)] = (m == 0) ? 0 : m - 1;
  }
  return Modulus::from_table(std::move(table),
                             mined_provenance(std::move(label), "rate of divergence", horizon));
}

}  // namespace vame
