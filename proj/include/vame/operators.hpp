#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vame/moduli.hpp"
#include "vame/nat.hpp"

namespace vame {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// An operator presented through its resolvents: for each gamma > 0 the map
/// x -> J_gamma(x) solving x in (Id + gamma A)(J_gamma x). Instances carry
/// their dimension, an optional known zero of A (a fixed point of every
/// resolvent), and a human-readable label.
class ResolventOperator {
 public:
  using ResolventFn = std::function<Vec(double, const Vec&)>;

  ResolventOperator(Eigen::Index dim, ResolventFn fn, std::optional<Vec> known_zero,
                    std::string label);

  /// Evaluates J_gamma(x). Throws DomainError for gamma <= 0 and
  /// DimensionError on a size mismatch.
  Vec resolvent(double gamma, const Vec& x) const;

  Eigen::Index dim() const { return dim_; }
  const std::optional<Vec>& known_zero() const { return known_zero_; }
  const std::string& label() const { return label_; }

 private:
  Eigen::Index dim_;
  ResolventFn fn_;
  std::optional<Vec> known_zero_;
  std::string label_;
};

/// A = c*Id with c >= 0; the resolvent is x / (1 + gamma*c).
ResolventOperator make_scaled_identity(Eigen::Index dim, double c);

/// A = M for a symmetric positive semidefinite matrix; the resolvent solves
/// (Id + gamma*M) y = x by LDLT with one step of iterative refinement, so
/// the relative residual of the solve stays near machine precision.
ResolventOperator make_psd_linear(Mat M);

/// PSD matrix with the given nonnegative eigenvalues in a random orthonormal
/// basis drawn deterministically from the seed.
ResolventOperator make_psd_linear_from_spectrum(const Vec& eigenvalues, unsigned seed);

/// A = normal cone of the box [lo, hi]; every resolvent is the coordinate
/// clamp onto the box, independent of gamma.
ResolventOperator make_box_projection(Vec lo, Vec hi);

/// A = subdifferential of x -> weight * ||x||_1; the resolvent is coordinate
/// soft-thresholding at level gamma*weight.
ResolventOperator make_l1_prox(Eigen::Index dim, double weight);

/// A Lipschitz self-map with constant alpha in [0, 1).
class ContractionMap {
 public:
  using ApplyFn = std::function<Vec(const Vec&)>;

  ContractionMap(Eigen::Index dim, ApplyFn fn, double alpha, std::string label);

  Vec operator()(const Vec& x) const;

  Eigen::Index dim() const { return dim_; }
  double alpha() const { return alpha_; }
  const std::string& label() const { return label_; }

 private:
  Eigen::Index dim_;
  ApplyFn fn_;
  double alpha_;
  std::string label_;
};

/// The constant map x -> u (contraction constant 0), the anchor used by the
/// Halpern-style specialization of the scheme.
ContractionMap make_constant_map(Vec u);

/// x -> alpha * Q x + b with Q orthogonal, contraction constant exactly alpha.
ContractionMap make_affine_contraction(double alpha, Mat Q, Vec b);

/// Deterministic random orthogonal matrix (QR of a seeded Gaussian draw).
Mat random_orthogonal(Eigen::Index dim, unsigned seed);

/// Residual of the resolvent identity
///   J_lambda x = J_gamma((gamma/lambda) x + (1 - gamma/lambda) J_lambda x);
/// the expression is evaluated exactly in this form and the norm of the
/// difference is returned.
double check_resolvent_identity(const ResolventOperator& op, double lambda, double gamma,
                                const Vec& x);

/// Checks ||J_gamma x - J_lambda x|| <= |1 - gamma/lambda| * ||J_lambda x - x||.
CheckResult check_resolvent_inequality(const ResolventOperator& op, double lambda,
                                       double gamma, const Vec& x, double tol = kTolFloat);

/// Checks ||J_gamma x - J_gamma y|| <= ||x - y|| on the given pairs.
CheckResult check_nonexpansive(const ResolventOperator& op, double gamma,
                               const std::vector<std::pair<Vec, Vec>>& pairs,
                               double tol = kTolFloat);

/// Checks ||f(x) - f(y)|| <= alpha * ||x - y|| on the given pairs.
CheckResult check_contraction(const ContractionMap& f,
                              const std::vector<std::pair<Vec, Vec>>& pairs,
                              double tol = kTolFloat);

}  // namespace vame
