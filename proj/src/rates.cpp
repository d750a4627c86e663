#include "vame/rates.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "vame/schedules.hpp"

namespace vame {

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_kz(Nat K_z, const char* who) {
  if (K_z == 0) throw DomainError(std::string(who) + ": K_z must be a positive natural");
}

void require_alpha(double alpha, const char* who) {
  if (!(alpha >= 0.0) || alpha >= 1.0) {
    throw DomainError(std::string(who) + ": alpha must lie in [0,1)");
  }
}

const char* ratio_tag(LambdaVariant variant) {
  return variant == LambdaVariant::kRatio ? "H1ln" : "H1ln*";
}

/// max{sigma2(c*K(k+1)-1), gamma1(c*K(k+1)-1)} with c = 4 or 6; the theta1
/// term of the error-carrying chi is handled by the caller.
Nat chi_level(Nat c, Nat K_z, Nat k) {
  return sat_sub(sat_mul(sat_mul(c, K_z), sat_add(k, 1)), 1);
}

/// sigma1(ceil((chi_val + 1 + ceil(ln(4K(k+1)))) / (1-alpha)) + 1)
Nat outer_phi(const Modulus& sigma1, Nat chi_val, Nat K_z, Nat k, double alpha) {
  const double log_arg = 4.0 * static_cast<double>(K_z) * (static_cast<double>(k) + 1.0);
  const Nat numer = sat_add(sat_add(chi_val, 1), ceil_log_conservative(log_arg));
  if (is_saturated(numer)) return kNatCeiling;
  const Nat inner = sat_add(nat_ceil_div(numer, 1.0 - alpha), 1);
  if (is_saturated(inner)) return kNatCeiling;
  return sigma1(inner);
}

std::vector<std::string> merge_tags(std::vector<std::string> base,
                                    std::initializer_list<const char*> extra) {
  for (const char* tag : extra) {
    bool present = false;
    for (const auto& t : base) {
      if (t == tag) {
        present = true;
        break;
      }
    }
    if (!present) base.emplace_back(tag);
  }
  return base;
}

}  // namespace

std::string residual_kind_name(ResidualKind kind) {
  switch (kind) {
    case ResidualKind::kSuccessive: return "successive";
    case ResidualKind::kScheme: return "scheme";
    case ResidualKind::kFixedM: return "fixed_m";
  }
  return "unknown";
}

void write_certificate_csv(const RateCertificate& cert, Nat k_max, std::ostream& os) {
  os.precision(17);
  os << "k,modulus_value,bound\n";
  for (Nat k = 0; k <= k_max; ++k) {
    os << k << ',' << cert.modulus(k) << ',' << (1.0 / (static_cast<double>(k) + 1.0))
       << '\n';
  }
}

Nat kz_bound(const Vec& x0, const Vec& z, const ContractionMap& f, Nat err_sum_head,
             KzMode mode) {
  if (x0.size() != z.size() || x0.size() != f.dim()) {
    throw DimensionError("kz_bound: mismatched dimensions");
  }
  if ((mode == KzMode::kHppa || mode == KzMode::kHppaInexact) && f.alpha() != 0.0) {
    throw DomainError("kz_bound: the anchored modes expect a constant map (alpha = 0)");
  }
  const double base =
      std::max((x0 - z).norm(), (f(z) - z).norm() / (1.0 - f.alpha()));
  switch (mode) {
    case KzMode::kVam:
    case KzMode::kHppa:
      return std::max<Nat>(1, nat_ceil(base));
    case KzMode::kVame:
    case KzMode::kHppaInexact:
      return std::max<Nat>(1, sat_add(sat_add(nat_ceil(base), err_sum_head), 1));
  }
  throw DomainError("kz_bound: unknown mode");
}

Nat error_sum_head(const Modulus& theta1, const std::function<Vec(Nat)>& error) {
  if (!error) throw DomainError("error_sum_head: null error family");
  const Nat window = theta1(0);
  if (is_saturated(window)) {
    throw HorizonError("error_sum_head: theta1(0) is saturated, head not computable");
  }
  double sum = 0.0;
  for (Nat i = 0; i <= window; ++i) sum += error(i).norm();
  if (!std::isfinite(sum)) throw NumericError("error_sum_head: error sum is not finite");
  return nat_ceil(sum);
}

ErrorModuli derive_error_moduli(const Modulus& theta1, const std::function<Vec(Nat)>& error) {
  const Nat head = error_sum_head(theta1, error);
  Modulus theta2 = Modulus::from_monotone_fn([theta1](Nat k) { return sat_add(theta1(k), 1); },
                                             "theta2(k)=theta1(k)+1 (" + theta1.provenance() +
                                                 ")");
  return ErrorModuli{std::move(theta2), sat_add(head, 1)};
}

Modulus derive_gamma1(const Modulus& gamma3, Nat capital_lambda, Nat n_lambda) {
  if (capital_lambda == 0) {
    throw DomainError("derive_gamma1: capital_lambda must be a positive natural");
  }
  auto fn = [gamma3, capital_lambda, n_lambda](Nat k) {
    const Nat level = sat_sub(sat_mul(capital_lambda, sat_add(k, 1)), 1);
    return std::max(n_lambda, gamma3(level));
  };
  return Modulus::from_monotone_fn(
      std::move(fn), "gamma1(k)=max{n_lambda, gamma3(capital_lambda*(k+1)-1)} from " +
                         gamma3.provenance());
}

RateCertificate phi_rate(const Modulus& sigma1, const Modulus& sigma2, const Modulus& gamma1,
                         const Modulus& theta1, Nat K_z, double alpha, LambdaVariant variant) {
  require_kz(K_z, "phi_rate");
  require_alpha(alpha, "phi_rate");
  auto chi = [sigma2, gamma1, theta1, K_z](Nat k) {
    const Nat level = chi_level(6, K_z, k);
    const Nat theta_level = sat_add(sat_mul(6, k), 5);
    return std::max({sigma2(level), gamma1(level), theta1(theta_level)});
  };
  auto fn = [sigma1, chi, K_z, alpha](Nat k) {
    const Nat chi_val = chi(sat_add(sat_mul(2, k), 1));
    return outer_phi(sigma1, chi_val, K_z, k, alpha);
  };
  RateCertificate cert;
  cert.kind = ResidualKind::kSuccessive;
  cert.name = "phi";
  cert.provenance = "phi: successive-residual regularity rate (K_z=" + std::to_string(K_z) +
                    ", alpha=" + format_real(alpha) + ", ratio variant=" +
                    (variant == LambdaVariant::kRatio ? "forward" : "reversed") + ")";
  cert.preconditions = {"H1an", "H2an", ratio_tag(variant), "H1en"};
  cert.modulus = Modulus::from_monotone_fn(std::move(fn), cert.provenance);
  return cert;
}

RateCertificate psi_rate(const RateCertificate& phi, const Modulus& sigma3,
                         const Modulus& theta2, Nat K_z) {
  require_kz(K_z, "psi_rate");
  if (phi.kind != ResidualKind::kSuccessive) {
    throw DomainError("psi_rate: expects a successive-residual certificate");
  }
  const Modulus phi_mod = phi.modulus;
  auto fn = [sigma3, theta2, phi_mod, K_z](Nat k) {
    const Nat level = chi_level(6, K_z, k);
    const Nat shifted = sat_add(sat_mul(3, k), 2);
    return std::max({sigma3(level), phi_mod(shifted), theta2(shifted)});
  };
  RateCertificate cert;
  cert.kind = ResidualKind::kScheme;
  cert.name = "psi";
  cert.provenance = "psi: scheme-residual regularity rate over {" + phi.provenance +
                    "} (K_z=" + std::to_string(K_z) + ")";
  cert.preconditions = merge_tags(phi.preconditions, {"H3an", "H2en"});
  cert.modulus = Modulus::from_monotone_fn(std::move(fn), cert.provenance);
  return cert;
}

RateCertificate theta_m_rate(const RateCertificate& psi, Nat capital_lambda, Nat n_lambda,
                             Nat lambda_m_upper, Nat m) {
  if (capital_lambda == 0 || lambda_m_upper == 0) {
    throw DomainError("theta_m_rate: step bounds must be positive naturals");
  }
  if (psi.kind != ResidualKind::kScheme) {
    throw DomainError("theta_m_rate: expects a scheme-residual certificate");
  }
  const Modulus psi_mod = psi.modulus;
  auto fn = [psi_mod, capital_lambda, n_lambda, lambda_m_upper](Nat k) {
    const Nat scaled =
        sat_sub(sat_mul(sat_mul(lambda_m_upper, capital_lambda), sat_add(k, 1)), 1);
    const Nat doubled = sat_add(sat_mul(2, k), 1);
    return std::max({n_lambda, psi_mod(scaled), psi_mod(doubled)});
  };
  RateCertificate cert;
  cert.kind = ResidualKind::kFixedM;
  cert.fixed_index = m;
  cert.name = "theta_m" + std::to_string(m);
  cert.provenance = "theta_m (m=" + std::to_string(m) +
                    "): frozen-step residual rate over {" + psi.provenance +
                    "} (capital_lambda=" + std::to_string(capital_lambda) +
                    ", n_lambda=" + std::to_string(n_lambda) +
                    ", step upper bound=" + std::to_string(lambda_m_upper) + ")";
  cert.preconditions = merge_tags(psi.preconditions, {"H2ln"});
  cert.modulus = Modulus::from_monotone_fn(std::move(fn), cert.provenance);
  return cert;
}

VamRates vam_rates(const Modulus& sigma1, const Modulus& sigma2, const Modulus& gamma1,
                   const Modulus& sigma3, Nat K_z_star, double alpha, Nat capital_lambda,
                   Nat n_lambda, Nat lambda_m_upper, Nat m, LambdaVariant variant) {
  require_kz(K_z_star, "vam_rates");
  require_alpha(alpha, "vam_rates");
  if (capital_lambda == 0 || lambda_m_upper == 0) {
    throw DomainError("vam_rates: step bounds must be positive naturals");
  }

  auto chi_star = [sigma2, gamma1, K_z_star](Nat k) {
    const Nat level = chi_level(4, K_z_star, k);
    return std::max(sigma2(level), gamma1(level));
  };

  VamRates rates;
  rates.phi_star.kind = ResidualKind::kSuccessive;
  rates.phi_star.name = "phi_star";
  rates.phi_star.provenance =
      "phi*: successive-residual regularity rate, error-free scheme (K*=" +
      std::to_string(K_z_star) + ", alpha=" + format_real(alpha) + ", ratio variant=" +
      (variant == LambdaVariant::kRatio ? "forward" : "reversed") + ")";
  rates.phi_star.preconditions = {"H1an", "H2an", ratio_tag(variant)};
  rates.phi_star.modulus = Modulus::from_monotone_fn(
      [sigma1, chi_star, K_z_star, alpha](Nat k) {
        const Nat chi_val = chi_star(sat_add(sat_mul(2, k), 1));
        return outer_phi(sigma1, chi_val, K_z_star, k, alpha);
      },
      rates.phi_star.provenance);

  const Modulus phi_mod = rates.phi_star.modulus;
  rates.psi_star.kind = ResidualKind::kScheme;
  rates.psi_star.name = "psi_star";
  rates.psi_star.provenance = "psi*: scheme-residual regularity rate over {" +
                              rates.phi_star.provenance + "}";
  rates.psi_star.preconditions = merge_tags(rates.phi_star.preconditions, {"H3an"});
  rates.psi_star.modulus = Modulus::from_monotone_fn(
      [sigma3, phi_mod, K_z_star](Nat k) {
        const Nat level = chi_level(4, K_z_star, k);
        const Nat doubled = sat_add(sat_mul(2, k), 1);
        return std::max(sigma3(level), phi_mod(doubled));
      },
      rates.psi_star.provenance);

  rates.theta_star_m = theta_m_rate(rates.psi_star, capital_lambda, n_lambda,
                                    lambda_m_upper, m);
  rates.theta_star_m.name = "theta_star_m" + std::to_string(m);
  return rates;
}

LinearRatesConstantStep linear_rates_example1(Nat K_z_star, double alpha) {
  require_kz(K_z_star, "linear_rates_example1");
  require_alpha(alpha, "linear_rates_example1");
  const Nat I = ceil_inv_one_minus(alpha);
  const Nat lead_phi = sat_mul(sat_mul(4, K_z_star), sat_mul(I, I));
  const Nat tail = sat_mul(2, I);

  LinearRatesConstantStep rates;
  rates.phi0.kind = ResidualKind::kSuccessive;
  rates.phi0.name = "phi0";
  rates.phi0.provenance = "phi0: closed-form successive-residual rate, constant step (K*=" +
                          std::to_string(K_z_star) + ", alpha=" + format_real(alpha) + ")";
  rates.phi0.preconditions = {"H1an", "H2an", "H1ln"};
  rates.phi0.modulus = Modulus::from_monotone_fn(
      [lead_phi, tail](Nat k) { return sat_sub(sat_mul(lead_phi, sat_add(k, 1)), tail); },
      rates.phi0.provenance);

  const Nat lead_psi = sat_add(lead_phi, sat_mul(sat_mul(4, K_z_star), I));
  rates.psi0.kind = ResidualKind::kScheme;
  rates.psi0.name = "psi0";
  rates.psi0.provenance =
      "psi0: closed-form scheme-residual rate, constant step (K*=" +
      std::to_string(K_z_star) + ", alpha=" + format_real(alpha) +
      "); the step being constant, it also serves every frozen-step residual";
  rates.psi0.preconditions = {"H1an", "H2an", "H3an", "H1ln"};
  rates.psi0.modulus = Modulus::from_monotone_fn(
      [lead_psi, tail](Nat k) { return sat_sub(sat_mul(lead_psi, sat_add(k, 1)), tail); },
      rates.psi0.provenance);
  return rates;
}

LinearRatesDriftingStep linear_rates_example2(Nat K_z, double alpha, double e_star_norm) {
  require_kz(K_z, "linear_rates_example2");
  require_alpha(alpha, "linear_rates_example2");
  if (!(e_star_norm >= 0.0)) {
    throw DomainError("linear_rates_example2: error magnitude must be nonnegative");
  }
  const Nat I = ceil_inv_one_minus(alpha);
  const Nat J = sat_mul(2, I);
  const Nat e_ceil = nat_ceil(e_star_norm);
  const Nat tail = sat_mul(2, I);

  LinearRatesDriftingStep rates;
  const Nat lead_phi = sat_mul(sat_add(sat_mul(sat_mul(3, J), K_z), e_ceil), I);
  rates.phi0.kind = ResidualKind::kSuccessive;
  rates.phi0.name = "phi0";
  rates.phi0.provenance =
      "phi0: closed-form successive-residual rate, drifting step with inverse-square errors"
      " (K_z=" + std::to_string(K_z) + ", alpha=" + format_real(alpha) +
      ", |e*|=" + format_real(e_star_norm) + ")";
  rates.phi0.preconditions = {"H1an", "H2an", "H1ln", "H1en"};
  rates.phi0.modulus = Modulus::from_monotone_fn(
      [lead_phi, J](Nat k) { return sat_sub(sat_mul(lead_phi, sat_add(k, 1)), J); },
      rates.phi0.provenance);

  const Nat lead_psi =
      sat_add(sat_mul(sat_mul(18, K_z), sat_mul(I, I)), sat_mul(sat_mul(3, e_ceil), I));
  rates.psi0.kind = ResidualKind::kScheme;
  rates.psi0.name = "psi0";
  rates.psi0.provenance =
      "psi0: closed-form scheme-residual rate, drifting step with inverse-square errors"
      " (K_z=" + std::to_string(K_z) + ", alpha=" + format_real(alpha) +
      ", |e*|=" + format_real(e_star_norm) + ")";
  rates.psi0.preconditions = {"H1an", "H2an", "H3an", "H1ln", "H1en", "H2en"};
  rates.psi0.modulus = Modulus::from_monotone_fn(
      [lead_psi, tail](Nat k) { return sat_sub(sat_mul(lead_psi, sat_add(k, 1)), tail); },
      rates.psi0.provenance);

  const Nat lead_theta =
      sat_add(sat_mul(sat_mul(36, K_z), sat_mul(I, I)), sat_mul(sat_mul(6, e_ceil), I));
  rates.theta0.kind = ResidualKind::kFixedM;
  rates.theta0.fixed_index = 0;
  rates.theta0.name = "theta0";
  rates.theta0.provenance =
      "theta0: closed-form frozen-step residual rate, valid for every frozen index"
      " (K_z=" + std::to_string(K_z) + ", alpha=" + format_real(alpha) +
      ", |e*|=" + format_real(e_star_norm) + ")";
  rates.theta0.preconditions = {"H1an", "H2an", "H3an", "H1ln", "H2ln", "H1en", "H2en"};
  rates.theta0.modulus = Modulus::from_monotone_fn(
      [lead_theta, tail](Nat k) { return sat_sub(sat_mul(lead_theta, sat_add(k, 1)), tail); },
      rates.theta0.provenance);

  const double gap = 1.0 - alpha;
  const double Jd = static_cast<double>(J);
  const double lead_pointwise = 3.0 * Jd * static_cast<double>(K_z) + e_star_norm;
  rates.pointwise_bound = [lead_pointwise, gap, Jd](Nat n) {
    return lead_pointwise / (gap * (static_cast<double>(n) + Jd));
  };
  return rates;
}

Nat example2_kz_bound(const Vec& x0, const Vec& z, const ContractionMap& f,
                      double e_star_norm) {
  if (x0.size() != z.size() || x0.size() != f.dim()) {
    throw DimensionError("example2_kz_bound: mismatched dimensions");
  }
  const double base =
      std::max((x0 - z).norm(), (f(z) - z).norm() / (1.0 - f.alpha()));
  return std::max<Nat>(1, sat_add(nat_ceil(base), example2_error_head(e_star_norm, f.alpha())));
}

}  // namespace vame
