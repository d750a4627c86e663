#include "vame/operators.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace vame {

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_positive_step(double gamma, const char* who) {
  if (!(gamma > 0.0)) {
    throw DomainError(std::string(who) + ": resolvent step must be positive, got " +
                      format_real(gamma));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ResolventOperator

ResolventOperator::ResolventOperator(Eigen::Index dim, ResolventFn fn,
                                     std::optional<Vec> known_zero, std::string label)
    : dim_(dim), fn_(std::move(fn)), known_zero_(std::move(known_zero)),
      label_(std::move(label)) {
  if (dim_ <= 0) throw DimensionError("ResolventOperator: dimension must be positive");
  if (!fn_) throw DomainError("ResolventOperator: null resolvent function");
  if (known_zero_ && known_zero_->size() != dim_) {
    throw DimensionError("ResolventOperator: known zero has wrong dimension");
  }
}

Vec ResolventOperator::resolvent(double gamma, const Vec& x) const {
  require_positive_step(gamma, "resolvent");
  if (x.size() != dim_) {
    throw DimensionError("resolvent: expected dimension " + std::to_string(dim_) +
                         ", got " + std::to_string(x.size()));
  }
  return fn_(gamma, x);
}

// ---------------------------------------------------------------------------
// Instances

ResolventOperator make_scaled_identity(Eigen::Index dim, double c) {
  if (!(c >= 0.0)) throw DomainError("make_scaled_identity: scale must be nonnegative");
  auto fn = [c](double gamma, const Vec& x) -> Vec { return x / (1.0 + gamma * c); };
  return ResolventOperator(dim, std::move(fn), Vec::Zero(dim),
                           "scaled identity (c=" + format_real(c) + ")");
}

ResolventOperator make_psd_linear(Mat M) {
  if (M.rows() != M.cols() || M.rows() <= 0) {
    throw DimensionError("make_psd_linear: matrix must be square and nonempty");
  }
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff())) {
    throw DomainError("make_psd_linear: matrix must be symmetric");
  }
  const Eigen::Index dim = M.rows();
  auto shared = std::make_shared<Mat>(std::move(M));
  auto fn = [shared](double gamma, const Vec& x) -> Vec {
    const Mat A = Mat::Identity(shared->rows(), shared->cols()) + gamma * (*shared);
    const Eigen::LDLT<Mat> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
      throw NumericError("psd resolvent: factorization failed");
    }
    Vec y = ldlt.solve(x);
    // One step of iterative refinement keeps the solve residual near
    // machine precision even when the argument is very large.
    const Vec r = x - A * y;
    y += ldlt.solve(r);
    return y;
  };
  return ResolventOperator(dim, std::move(fn), Vec::Zero(dim),
                           "psd linear (dim=" + std::to_string(dim) + ")");
}

ResolventOperator make_psd_linear_from_spectrum(const Vec& eigenvalues, unsigned seed) {
  if (eigenvalues.size() <= 0) {
    throw DimensionError("make_psd_linear_from_spectrum: empty spectrum");
  }
  if (eigenvalues.minCoeff() < 0.0) {
    throw DomainError("make_psd_linear_from_spectrum: eigenvalues must be nonnegative");
  }
  const Mat Q = random_orthogonal(eigenvalues.size(), seed);
  const Mat M = Q * eigenvalues.asDiagonal() * Q.transpose();
  return make_psd_linear(0.5 * (M + M.transpose()));
}

ResolventOperator make_box_projection(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() <= 0) {
    throw DimensionError("make_box_projection: bound vectors must share a positive dimension");
  }
  if ((hi - lo).minCoeff() < 0.0) {
    throw DomainError("make_box_projection: requires lo <= hi coordinatewise");
  }
  const Eigen::Index dim = lo.size();
  Vec zero = Vec::Zero(dim).cwiseMax(lo).cwiseMin(hi);
  auto fn = [lo = std::move(lo), hi = std::move(hi)](double, const Vec& x) -> Vec {
    return x.cwiseMax(lo).cwiseMin(hi);
  };
  return ResolventOperator(dim, std::move(fn), std::move(zero),
                           "box clamp (dim=" + std::to_string(dim) + ")");
}

ResolventOperator make_l1_prox(Eigen::Index dim, double weight) {
  if (!(weight >= 0.0)) throw DomainError("make_l1_prox: weight must be nonnegative");
  auto fn = [weight](double gamma, const Vec& x) -> Vec {
    const double level = gamma * weight;
    Vec y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double mag = std::abs(x[i]) - level;
      y[i] = mag > 0.0 ? (x[i] > 0.0 ? mag : -mag) : 0.0;
    }
    return y;
  };
  return ResolventOperator(dim, std::move(fn), Vec::Zero(dim),
                           "soft threshold (weight=" + format_real(weight) + ")");
}

// ---------------------------------------------------------------------------
// ContractionMap

ContractionMap::ContractionMap(Eigen::Index dim, ApplyFn fn, double alpha, std::string label)
    : dim_(dim), fn_(std::move(fn)), alpha_(alpha), label_(std::move(label)) {
  if (dim_ <= 0) throw DimensionError("ContractionMap: dimension must be positive");
  if (!fn_) throw DomainError("ContractionMap: null map");
  if (!(alpha_ >= 0.0) || alpha_ >= 1.0) {
    throw DomainError("ContractionMap: constant must lie in [0,1), got " + format_real(alpha));
  }
}

Vec ContractionMap::operator()(const Vec& x) const {
  if (x.size() != dim_) {
    throw DimensionError("ContractionMap: expected dimension " + std::to_string(dim_) +
                         ", got " + std::to_string(x.size()));
  }
  return fn_(x);
}

ContractionMap make_constant_map(Vec u) {
  const Eigen::Index dim = u.size();
  if (dim <= 0) throw DimensionError("make_constant_map: empty anchor");
  auto fn = [u = std::move(u)](const Vec&) -> Vec { return u; };
  return ContractionMap(dim, std::move(fn), 0.0, "constant anchor");
}

ContractionMap make_affine_contraction(double alpha, Mat Q, Vec b) {
  if (Q.rows() != Q.cols() || Q.rows() <= 0) {
    throw DimensionError("make_affine_contraction: Q must be square and nonempty");
  }
  if (b.size() != Q.rows()) {
    throw DimensionError("make_affine_contraction: offset has wrong dimension");
  }
  const Mat gram = Q.transpose() * Q;
  if ((gram - Mat::Identity(Q.rows(), Q.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("make_affine_contraction: Q must be orthogonal");
  }
  const Eigen::Index dim = Q.rows();
  auto fn = [alpha, Q = std::move(Q), b = std::move(b)](const Vec& x) -> Vec {
    return alpha * (Q * x) + b;
  };
  return ContractionMap(dim, std::move(fn), alpha,
                        "affine contraction (alpha=" + format_real(alpha) + ")");
}

Mat random_orthogonal(Eigen::Index dim, unsigned seed) {
  if (dim <= 0) throw DimensionError("random_orthogonal: dimension must be positive");
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ull + 0x6A09E667ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat G(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) G(i, j) = gauss(rng);
  }
  const Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ();
}

// ---------------------------------------------------------------------------
// Structural checks

double check_resolvent_identity(const ResolventOperator& op, double lambda, double gamma,
                                const Vec& x) {
  require_positive_step(lambda, "check_resolvent_identity");
  require_positive_step(gamma, "check_resolvent_identity");
  const Vec jl = op.resolvent(lambda, x);
  const double ratio = gamma / lambda;
  const Vec inner = ratio * x + (1.0 - ratio) * jl;
  const Vec jg = op.resolvent(gamma, inner);
  return (jl - jg).norm();
}

CheckResult check_resolvent_inequality(const ResolventOperator& op, double lambda,
                                       double gamma, const Vec& x, double tol) {
  require_positive_step(lambda, "check_resolvent_inequality");
  require_positive_step(gamma, "check_resolvent_inequality");
  const Vec jl = op.resolvent(lambda, x);
  const Vec jg = op.resolvent(gamma, x);
  const double lhs = (jg - jl).norm();
  const double rhs = std::abs(1.0 - gamma / lambda) * (jl - x).norm();
  if (lhs > rhs + tol) {
    return CheckResult::fail("step-comparison inequality violated: " + format_real(lhs) +
                             " > " + format_real(rhs) + " (lambda=" + format_real(lambda) +
                             ", gamma=" + format_real(gamma) + ")");
  }
  return CheckResult::pass();
}

CheckResult check_nonexpansive(const ResolventOperator& op, double gamma,
                               const std::vector<std::pair<Vec, Vec>>& pairs, double tol) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const double lhs = (op.resolvent(gamma, x) - op.resolvent(gamma, y)).norm();
    const double rhs = (x - y).norm();
    if (lhs > rhs + tol) {
      return CheckResult::fail("nonexpansiveness violated on pair " + std::to_string(i) +
                                   ": " + format_real(lhs) + " > " + format_real(rhs),
                               static_cast<Nat>(i));
    }
  }
  return CheckResult::pass();
}

CheckResult check_contraction(const ContractionMap& f,
                              const std::vector<std::pair<Vec, Vec>>& pairs, double tol) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const double lhs = (f(x) - f(y)).norm();
    const double rhs = f.alpha() * (x - y).norm();
    if (lhs > rhs + tol) {
      return CheckResult::fail("contraction bound violated on pair " + std::to_string(i) +
                                   ": " + format_real(lhs) + " > " + format_real(rhs),
                               static_cast<Nat>(i));
    }
  }
  return CheckResult::pass();
}

}  // namespace vame
