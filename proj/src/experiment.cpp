#include "vame/experiment.hpp"

#include <cmath>
#include <random>

#include "vame/schedules.hpp"

namespace vame {

namespace {

Eigen::Index as_index(Nat dim) { return static_cast<Eigen::Index>(dim); }

/// Broadcasts a config list (empty, scalar, or full-length) to a vector.
Vec broadcast(const std::vector<double>& values, Eigen::Index dim, double fallback) {
  if (values.empty()) return Vec::Constant(dim, fallback);
  if (values.size() == 1) return Vec::Constant(dim, values.front());
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = values[static_cast<std::size_t>(i)];
  return v;
}

struct EffectiveErrors {
  double e_star_norm = 0.0;  // example2 family magnitude
  double scale = 0.0;        // generic family magnitude
};

/// The error magnitudes after the scheme is applied: the error-free scheme
/// zeroes both families.
EffectiveErrors effective_errors(const ExperimentConfig& config) {
  EffectiveErrors eff;
  if (config.scheme == "vam") return eff;
  eff.e_star_norm = config.e_star_norm;
  eff.scale = config.error_scale;
  return eff;
}

bool run_carries_errors(const ExperimentConfig& config) {
  const EffectiveErrors eff = effective_errors(config);
  if (config.preset == "example2") {
    return eff.e_star_norm > 0.0 || config.negative_control == "nonsummable_errors";
  }
  if (config.preset == "generic") return eff.scale > 0.0;
  return false;  // example1 is error-free by construction
}

Vec example2_direction(const ExperimentConfig& config) {
  const EffectiveErrors eff = effective_errors(config);
  return eff.e_star_norm * seeded_unit_vector(as_index(config.dim), config.seed);
}

RateCertificate clone_for_fixed_index(const RateCertificate& base, Nat m) {
  RateCertificate cert = base;
  cert.kind = ResidualKind::kFixedM;
  cert.fixed_index = m;
  cert.name = base.name + "_m" + std::to_string(m);
  return cert;
}

RateCertificate shrink_certificate(const RateCertificate& base, Nat amount) {
  RateCertificate cert = base;
  const Modulus original = base.modulus;
  cert.name = base.name + "_shrunken";
  cert.provenance = base.provenance + " [control: deflated by " + std::to_string(amount) + "]";
  cert.modulus = Modulus::from_monotone_fn(
      [original, amount](Nat k) { return sat_sub(original(k), amount); }, cert.provenance);
  return cert;
}

}  // namespace

Vec seeded_unit_vector(Eigen::Index dim, unsigned seed) {
  if (dim <= 0) throw DimensionError("seeded_unit_vector: dimension must be positive");
  std::mt19937_64 rng((static_cast<std::uint64_t>(seed) + 17) * 0xD1B54A32D192ED03ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  const double norm = v.norm();
  if (norm < 1e-12) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

ResolventOperator build_operator(const ExperimentConfig& config) {
  const Eigen::Index dim = as_index(config.dim);
  if (config.op_kind == "scaled_identity") {
    return make_scaled_identity(dim, config.op_scale);
  }
  if (config.op_kind == "psd_linear") {
    Vec eigs;
    if (config.spectrum.empty()) {
      // Default spectrum 0..2, including a zero eigenvalue when dim > 1.
      eigs = (dim == 1) ? Vec(Vec::Constant(1, 1.0))
                        : Vec(Vec::LinSpaced(dim, 0.0, 2.0));
    } else {
      eigs = broadcast(config.spectrum, dim, 1.0);
    }
    return make_psd_linear_from_spectrum(eigs, config.seed);
  }
  if (config.op_kind == "box") {
    return make_box_projection(broadcast(config.box_lo, dim, -1.0),
                               broadcast(config.box_hi, dim, 1.0));
  }
  if (config.op_kind == "l1") {
    return make_l1_prox(dim, config.l1_weight);
  }
  throw ConfigError("config: unknown operator kind '" + config.op_kind + "'");
}

ContractionMap build_contraction(const ExperimentConfig& config) {
  const Eigen::Index dim = as_index(config.dim);
  if (config.f_kind == "constant") {
    return make_constant_map(broadcast(config.anchor, dim, 0.0));
  }
  if (config.f_kind == "affine") {
    return make_affine_contraction(config.alpha, random_orthogonal(dim, config.rotation_seed),
                                   broadcast(config.offset, dim, 0.0));
  }
  throw ConfigError("config: unknown contraction kind '" + config.f_kind + "'");
}

BuiltExperiment build_experiment(const ExperimentConfig& config) {
  ResolventOperator op = build_operator(config);
  ContractionMap f = build_contraction(config);
  const Eigen::Index dim = as_index(config.dim);
  const double alpha = f.alpha();
  const EffectiveErrors eff = effective_errors(config);

  ParamSchedule sched;
  if (config.preset == "example1") {
    sched = make_example1_schedule(alpha, config.lambda_value, dim);
  } else if (config.preset == "example2") {
    if (config.negative_control == "nonsummable_errors") {
      if (config.scheme == "vam") {
        throw ConfigError(
            "config: the nonsummable_errors control needs an error-carrying scheme");
      }
      if (!(eff.e_star_norm > 0.0)) {
        throw ConfigError("config: the nonsummable_errors control needs e_star_norm > 0");
      }
      sched = make_nonsummable_error_schedule(alpha, example2_direction(config), dim);
    } else {
      sched = make_example2_schedule(alpha, example2_direction(config), dim);
    }
  } else if (config.preset == "generic") {
    if (config.brute_horizon < 16) {
      throw ConfigError(
          "config: missing step/error moduli for the generic schedule -- they are mined by "
          "brute force, and brute_horizon=" + std::to_string(config.brute_horizon) +
          " disables mining (need >= 16)");
    }
    sched = make_generic_schedule(alpha, dim, config.seed, eff.scale, config.brute_horizon);
  } else {
    throw ConfigError("config: unknown schedule preset '" + config.preset + "'");
  }

  Vec x0 = broadcast(config.x0, dim, 0.0);
  return BuiltExperiment{std::move(op), std::move(f), std::move(sched), std::move(x0)};
}

IterationTrace run_experiment(const ExperimentConfig& config, const BuiltExperiment& built) {
  return run_vame(built.x0, built.op, built.f, built.sched, config.horizon);
}

IterationTrace run_experiment(const ExperimentConfig& config) {
  const BuiltExperiment built = build_experiment(config);
  return run_experiment(config, built);
}

std::vector<RateCertificate> build_certificates(const ExperimentConfig& config,
                                                const BuiltExperiment& built) {
  if (!built.op.known_zero()) {
    throw ConfigError("config: the operator exposes no known zero; certificates need one");
  }
  const Vec& z = *built.op.known_zero();
  const ContractionMap& f = built.f;
  const Vec& x0 = built.x0;
  const ScheduleModuli& sm = built.sched.moduli;
  const double alpha = f.alpha();
  const bool anchored = (config.scheme == "hppa");
  const bool errors = run_carries_errors(config);

  if (!sm.sigma1 || !sm.sigma2 || !sm.sigma3) {
    throw ConfigError("config: the schedule carries no anchor-weight moduli");
  }
  Modulus gamma1 = [&] {
    if (sm.gamma1) return *sm.gamma1;
    if (sm.gamma3 && sm.capital_lambda) {
      return derive_gamma1(*sm.gamma3, *sm.capital_lambda, sm.n_lambda.value_or(0));
    }
    throw ConfigError("config: the schedule carries no step-ratio modulus");
  }();
  const Nat capital_lambda = sm.capital_lambda.value_or(1);
  const Nat n_lambda = sm.n_lambda.value_or(0);

  std::vector<RateCertificate> certs;
  if (!errors) {
    const Nat K_star = kz_bound(x0, z, f, 0, anchored ? KzMode::kHppa : KzMode::kVam);
    const Nat m0 = config.m_list.empty() ? 0 : config.m_list.front();
    VamRates rates =
        vam_rates(*sm.sigma1, *sm.sigma2, gamma1, *sm.sigma3, K_star, alpha, capital_lambda,
                  n_lambda, built.sched.lambda_upper_at(m0), m0);
    certs.push_back(rates.phi_star);
    certs.push_back(rates.psi_star);
    for (const Nat m : config.m_list) {
      RateCertificate theta = theta_m_rate(rates.psi_star, capital_lambda, n_lambda,
                                           built.sched.lambda_upper_at(m), m);
      theta.name = "theta_star_m" + std::to_string(m);
      certs.push_back(std::move(theta));
    }
  } else {
    if (!sm.theta1) {
      throw ConfigError("config: the schedule carries errors but no error-series modulus");
    }
    const Nat head = error_sum_head(*sm.theta1, built.sched.error);
    const Nat K = kz_bound(x0, z, f, head, anchored ? KzMode::kHppaInexact : KzMode::kVame);
    const Modulus theta2 =
        sm.theta2 ? *sm.theta2 : derive_error_moduli(*sm.theta1, built.sched.error).theta2;
    RateCertificate phi = phi_rate(*sm.sigma1, *sm.sigma2, gamma1, *sm.theta1, K, alpha);
    RateCertificate psi = psi_rate(phi, *sm.sigma3, theta2, K);
    for (const Nat m : config.m_list) {
      certs.push_back(theta_m_rate(psi, capital_lambda, n_lambda,
                                   built.sched.lambda_upper_at(m), m));
    }
    certs.insert(certs.begin(), psi);
    certs.insert(certs.begin(), phi);
  }

  if (config.preset == "example1") {
    const Nat K_lin = kz_bound(x0, z, f, 0, KzMode::kVam);
    LinearRatesConstantStep lr = linear_rates_example1(K_lin, alpha);
    certs.push_back(lr.phi0);
    certs.push_back(lr.psi0);
    // The step is constant, so the scheme residual and every frozen-step
    // residual coincide; psi0 certifies them all.
    for (const Nat m : config.m_list) certs.push_back(clone_for_fixed_index(lr.psi0, m));
  } else if (config.preset == "example2") {
    const double e_norm = example2_direction(config).norm();
    const Nat K_lin = example2_kz_bound(x0, z, f, e_norm);
    LinearRatesDriftingStep lr = linear_rates_example2(K_lin, alpha, e_norm);
    certs.push_back(lr.phi0);
    certs.push_back(lr.psi0);
    if (config.m_list.empty()) {
      certs.push_back(lr.theta0);
    } else {
      for (const Nat m : config.m_list) certs.push_back(clone_for_fixed_index(lr.theta0, m));
    }
  }

  if (config.negative_control == "shrink_moduli") {
    const Nat amount = config.horizon / 2;
    for (auto& cert : certs) cert = shrink_certificate(cert, amount);
  }
  return certs;
}

}  // namespace vame
