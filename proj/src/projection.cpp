#include "fhs/projection.hpp"

#include <cmath>
#include <string>

#include "fhs/errors.hpp"

namespace fhs {

namespace {

void check_rank(const Eigen::MatrixXd& a, const char* what) {
  if (a.cols() == 0) return;
  if (a.rows() < a.cols()) {
    throw NumericalError(std::string(what) + ": more columns (" + std::to_string(a.cols()) +
                         ") than rows (" + std::to_string(a.rows()) + ")");
  }
  if (!a.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
  const Eigen::VectorXd sv = a.jacobiSvd().singularValues();
  const double cutoff = kRankTolerance * sv[0];
  Eigen::Index deficient = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (!(sv[i] >= cutoff) || sv[0] == 0.0) ++deficient;
  }
  if (deficient > 0) {
    throw NumericalError(std::string(what) + " is rank deficient: " + std::to_string(deficient) +
                         " of " + std::to_string(a.cols()) + " columns fall below the rank tolerance");
  }
}

// Removes the span of `q` (orthonormal columns) from v twice.
void reorthogonalize(const Eigen::MatrixXd& q, Eigen::Index used, Eigen::VectorXd& v) {
  if (used == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd c = q.leftCols(used).transpose() * v;
    v.noalias() -= q.leftCols(used) * c;
  }
}

}  // namespace

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a) {
  check_rank(a, "design");
  Eigen::MatrixXd q(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Eigen::VectorXd v = a.col(j);
    reorthogonalize(q, j, v);
    q.col(j) = v / v.norm();
  }
  return q;
}

Projector projector(const Eigen::MatrixXd& a) { return Projector(orthonormalize(a)); }

ShrinkageDesign orthogonal_complement(const DesignMatrix& phi, const Eigen::MatrixXd& phi0) {
  return orthogonal_complement(phi.values, phi0);
}

ShrinkageDesign orthogonal_complement(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& phi0) {
  if (phi0.rows() != phi.rows()) {
    throw ConfigError("null design has " + std::to_string(phi0.rows()) + " rows, design has " +
                      std::to_string(phi.rows()));
  }
  const auto k = phi.cols();
  const auto d0 = phi0.cols();
  if (d0 >= k) {
    throw ConfigError("null space dimension d0=" + std::to_string(d0) +
                      " must be smaller than k_n=" + std::to_string(k));
  }

  ShrinkageDesign out;
  out.phi = phi;
  out.phi0 = phi0;
  out.d0 = static_cast<int>(d0);
  out.q_phi = Projector(orthonormalize(phi));
  out.q0 = Projector(d0 > 0 ? orthonormalize(phi0) : Eigen::MatrixXd(phi.rows(), 0));

  if (d0 > 0) {
    const Eigen::MatrixXd outside = phi0 - out.q_phi.basis() * (out.q_phi.basis().transpose() * phi0);
    const double rel = outside.norm() / phi0.norm();
    if (!(rel < 1e-8)) {
      throw NumericalError("null space not nested: span(phi0) is not contained in span(phi) "
                           "(relative residual " + std::to_string(rel) + ")");
    }
  }

  // Pivoted Gram-Schmidt with reorthogonalization: repeatedly take the column
  // of phi with the largest component outside the current span.
  const Eigen::Index m = k - d0;
  const Eigen::Index n = phi.rows();
  Eigen::MatrixXd basis(n, k);
  basis.leftCols(d0) = out.q0.basis();
  Eigen::MatrixXd remainder = phi - out.q0.basis() * (out.q0.basis().transpose() * phi);
  for (Eigen::Index step = 0; step < m; ++step) {
    Eigen::Index pivot = 0;
    remainder.colwise().norm().maxCoeff(&pivot);
    Eigen::VectorXd v = remainder.col(pivot);
    reorthogonalize(basis, d0 + step, v);
    const double norm = v.norm();
    if (!(norm > 0.0)) throw NumericalError("orthogonal complement collapsed");
    v /= norm;
    basis.col(d0 + step) = v;
    remainder.noalias() -= v * (v.transpose() * remainder);
  }
  out.phi1 = basis.rightCols(m);
  out.q1 = Projector(out.phi1);
  out.to_coefficients = phi.colPivHouseholderQr().solve(basis);
  return out;
}

Eigen::VectorXd shrinkage_mean(const Eigen::VectorXd& y, double omega, const ShrinkageDesign& design) {
  if (y.size() != design.n()) throw ConfigError("response length does not match design rows");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in [0, 1]");
  return (1.0 - omega) * design.q_phi.apply(y) + omega * design.q0.apply(y);
}

Eigen::MatrixXd polynomial_null_design(const Eigen::VectorXd& x, int degree) {
  if (degree < 0) throw ConfigError("polynomial degree must be non-negative");
  Eigen::MatrixXd out(x.size(), degree + 1);
  out.col(0).setOnes();
  for (int p = 1; p <= degree; ++p) out.col(p) = out.col(p - 1).cwiseProduct(x);
  return out;
}

Eigen::MatrixXd piecewise_linear_null_design(const Eigen::VectorXd& x) {
  Eigen::MatrixXd out(x.size(), 4);
  out.col(0).setOnes();
  out.col(1) = (x.array() + 1.0).max(0.0);
  out.col(2) = (-x.array() - 1.0).max(0.0);
  out.col(3) = (x.array() - 1.0).max(0.0);
  return out;
}

}  // namespace fhs
