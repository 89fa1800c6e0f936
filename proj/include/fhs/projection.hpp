#pragma once

#include <Eigen/Dense>

#include "fhs/basis.hpp"

namespace fhs {

/// Relative singular-value threshold below which a matrix is rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Orthogonal projector stored as an orthonormal factor U (n x d), so that
/// Q = U U^T is applied in O(n d) and only materialized on request.
class Projector {
 public:
  Projector() = default;
  explicit Projector(Eigen::MatrixXd orthonormal_basis) : basis_(std::move(orthonormal_basis)) {}

  const Eigen::MatrixXd& basis() const { return basis_; }
  Eigen::Index rank() const { return basis_.cols(); }
  Eigen::Index dim() const { return basis_.rows(); }

  /// U^T v
  Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const { return basis_.transpose() * v; }
  /// Q v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return basis_ * (basis_.transpose() * v); }
  Eigen::MatrixXd dense() const { return basis_ * basis_.transpose(); }

 private:
  Eigen::MatrixXd basis_;
};

/// Orthonormal basis for the column space of `a` by Gram-Schmidt with one
/// full reorthogonalization pass per column. Throws NumericalError when the
/// smallest singular value is below kRankTolerance times the largest.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a);

/// Orthogonal projector onto the column space of a full-column-rank matrix.
Projector projector(const Eigen::MatrixXd& a);

/// Spline design together with the nested parametric null design and the
/// orthogonal decomposition Q_phi = Q0 + Q1.
struct ShrinkageDesign {
  Eigen::MatrixXd phi;   // n x k_n
  Eigen::MatrixXd phi0;  // n x d0, as supplied
  Eigen::MatrixXd phi1;  // n x (k_n - d0), orthonormal, orthogonal to phi0
  Projector q_phi;
  Projector q0;
  Projector q1;
  /// k_n x k_n map from block coordinates to coefficients:
  /// beta = to_coefficients * [U0^T; U1^T]-coordinates, i.e.
  /// phi * to_coefficients = [U0, U1].
  Eigen::MatrixXd to_coefficients;
  int d0 = 0;

  Eigen::Index n() const { return phi.rows(); }
  int k_n() const { return static_cast<int>(phi.cols()); }
  int shrunk_dim() const { return k_n() - d0; }
};

/// Builds the decomposition. Throws NumericalError if either design is rank
/// deficient, ConfigError if d0 >= k_n, and NumericalError("null space not
/// nested") if span(phi0) is not contained in span(phi).
ShrinkageDesign orthogonal_complement(const DesignMatrix& phi, const Eigen::MatrixXd& phi0);
ShrinkageDesign orthogonal_complement(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& phi0);

/// Conditional posterior mean of the fit given omega:
/// (1 - omega) Q_phi y + omega Q0 y.
Eigen::VectorXd shrinkage_mean(const Eigen::VectorXd& y, double omega, const ShrinkageDesign& design);

/// Common null designs evaluated at covariates x.
Eigen::MatrixXd polynomial_null_design(const Eigen::VectorXd& x, int degree);
Eigen::MatrixXd piecewise_linear_null_design(const Eigen::VectorXd& x);

}  // namespace fhs
