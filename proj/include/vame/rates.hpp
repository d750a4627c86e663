#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vame/iteration.hpp"
#include "vame/moduli.hpp"
#include "vame/operators.hpp"

namespace vame {

/// Which residual series a certificate speaks about: successive iterate
/// gaps ||x_{n+1} - x_n||, the scheme residuals ||x_n - J_{lambda_n} x_n||,
/// or the residuals ||x_n - J_{lambda_m} x_n|| at one frozen index m.
enum class ResidualKind { kSuccessive, kScheme, kFixedM };

std::string residual_kind_name(ResidualKind kind);

/// A rate of asymptotic regularity packaged with its audit trail: for each
/// precision level k, residuals of `kind` stay below 1/(k+1) from index
/// modulus(k) on, provided the preconditions listed by tag hold.
struct RateCertificate {
  Modulus modulus;
  ResidualKind kind = ResidualKind::kSuccessive;
  Nat fixed_index = 0;  // the m of kFixedM certificates
  std::string name;     // short key used in file names and tables
  std::string provenance;
  std::vector<std::string> preconditions;  // hypothesis tags, e.g. "H1an"
};

/// Writes "k,modulus_value,bound" rows for k = 0..k_max, bound = 1/(k+1).
void write_certificate_csv(const RateCertificate& cert, Nat k_max, std::ostream& os);

/// How the starting-slack bound K_z is assembled. The error-carrying modes
/// add the supplied error head plus one; the exact modes take the plain
/// ceiling. kHppa/kHppaInexact expect a constant anchor map (alpha = 0).
enum class KzMode { kVame, kVam, kHppa, kHppaInexact };

/// Least positive natural K_z admissible for the scheme started at x0 with
/// anchor map f and zero z: at least max{||x0 - z||, ||f(z) - z||/(1-alpha)},
/// plus err_sum_head + 1 in the error-carrying modes. err_sum_head must be
/// ceil(sum_{i <= theta1(0)} ||e_i||) for the run's error terms.
Nat kz_bound(const Vec& x0, const Vec& z, const ContractionMap& f, Nat err_sum_head,
             KzMode mode);

/// ceil(sum_{i <= theta1(0)} ||e_i||), the quantity kz_bound consumes.
Nat error_sum_head(const Modulus& theta1, const std::function<Vec(Nat)>& error);

/// Witnesses for the error terms derived from a Cauchy modulus theta1 of
/// sum ||e_n||: theta2(k) = theta1(k) + 1 is a rate of convergence of
/// ||e_n|| -> 0 and E = ceil(sum_{i <= theta1(0)} ||e_i||) + 1 bounds the
/// full error sum.
struct ErrorModuli {
  Modulus theta2;
  Nat error_sum_bound;
};
ErrorModuli derive_error_moduli(const Modulus& theta1, const std::function<Vec(Nat)>& error);

/// Cauchy modulus for the step-ratio series from a Cauchy modulus gamma3 of
/// sum |lambda_n - lambda_{n+1}| and a flat floor lambda_n >= 1/capital_lambda
/// for n >= n_lambda: k -> max{n_lambda, gamma3(capital_lambda*(k+1) - 1)}.
/// Serves as gamma1 and gamma1_star alike.
Modulus derive_gamma1(const Modulus& gamma3, Nat capital_lambda, Nat n_lambda);

/// Rate of asymptotic regularity for successive residuals of the
/// error-carrying scheme:
///   chi(k) = max{sigma2(6K(k+1)-1), gamma1(6K(k+1)-1), theta1(6k+5)},
///   Phi(k) = sigma1(ceil((chi(2k+1) + 1 + ceil(ln(4K(k+1)))) / (1-alpha)) + 1).
/// `gamma1` is the modulus for the ratio series selected by `variant`.
RateCertificate phi_rate(const Modulus& sigma1, const Modulus& sigma2, const Modulus& gamma1,
                         const Modulus& theta1, Nat K_z, double alpha,
                         LambdaVariant variant = LambdaVariant::kRatio);

/// Upgrades phi to the scheme residuals:
///   Psi(k) = max{sigma3(6K(k+1)-1), Phi(3k+2), theta2(3k+2)}.
RateCertificate psi_rate(const RateCertificate& phi, const Modulus& sigma3,
                         const Modulus& theta2, Nat K_z);

/// Freezes the step: with lambda_n >= 1/capital_lambda (n >= n_lambda) and
/// lambda_m <= lambda_m_upper,
///   Theta_m(k) = max{n_lambda, Psi(lambda_m_upper*capital_lambda*(k+1) - 1), Psi(2k+1)}.
RateCertificate theta_m_rate(const RateCertificate& psi, Nat capital_lambda, Nat n_lambda,
                             Nat lambda_m_upper, Nat m);

/// The error-free scheme's rates, built from the smaller slack K* and the
/// 4K* levels:
///   chi*(k) = max{sigma2(4K(k+1)-1), gamma1(4K(k+1)-1)},
///   Phi*(k) = sigma1(ceil((chi*(2k+1) + 1 + ceil(ln(4K(k+1)))) / (1-alpha)) + 1),
///   Psi*(k) = max{sigma3(4K(k+1)-1), Phi*(2k+1)},
///   Theta*_m as in theta_m_rate applied to Psi*.
struct VamRates {
  RateCertificate phi_star;
  RateCertificate psi_star;
  RateCertificate theta_star_m;
};
VamRates vam_rates(const Modulus& sigma1, const Modulus& sigma2, const Modulus& gamma1,
                   const Modulus& sigma3, Nat K_z_star, double alpha, Nat capital_lambda,
                   Nat n_lambda, Nat lambda_m_upper, Nat m,
                   LambdaVariant variant = LambdaVariant::kRatio);

/// Closed-form rates for the constant-step, error-free preset, with
/// I = ceil(1/(1-alpha)):
///   Phi0(k) = 4*K*I^2*(k+1) - 2I,   Psi0(k) = (4*K*I^2 + 4*K*I)*(k+1) - 2I.
/// Psi0 also serves every fixed-index residual, the step being constant.
struct LinearRatesConstantStep {
  RateCertificate phi0;
  RateCertificate psi0;
};
LinearRatesConstantStep linear_rates_example1(Nat K_z_star, double alpha);

/// Closed-form rates for the drifting-step, inverse-square-error preset,
/// with I = ceil(1/(1-alpha)), J = 2I, and K_z at least
/// max{||x0 - z||, ||f(z) - z||/(1-alpha)} + ceil(|e*|/(J-1)):
///   Phi0(k)   = (3*J*K + ceil(|e*|))*I*(k+1) - J,
///   Psi0(k)   = 18*K*I^2*(k+1) + 3*ceil(|e*|)*I*(k+1) - 2I,
///   Theta0(k) = 36*K*I^2*(k+1) + 6*ceil(|e*|)*I*(k+1) - 2I,
/// where Theta0 is valid for every frozen index m simultaneously. The
/// pointwise successive-residual majorant (3*J*K + |e*|)/((1-alpha)(n+J))
/// is returned alongside.
struct LinearRatesDriftingStep {
  RateCertificate phi0;
  RateCertificate psi0;
  RateCertificate theta0;
  std::function<double(Nat)> pointwise_bound;
};
LinearRatesDriftingStep linear_rates_example2(Nat K_z, double alpha, double e_star_norm);

/// Least positive natural admissible as the K_z of linear_rates_example2.
Nat example2_kz_bound(const Vec& x0, const Vec& z, const ContractionMap& f,
                      double e_star_norm);

}  // namespace vame
