#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fhs {

enum class KnotPlacement { kUniform, kQuantile };

/// Clamped B-spline basis of a given degree on [lower, upper].
///
/// Built from ascending breakpoints t_0 < ... < t_m; each end knot is
/// repeated `degree` extra times, so the full knot vector has
/// m + 1 + 2 * degree entries and the basis has m + degree functions.
/// Evaluation is right-continuous at interior knots and closed at the right
/// boundary, where the last function equals one.
class BSplineBasis {
 public:
  BSplineBasis(int degree, std::vector<double> breaks);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(breaks_.size()) - 1 + degree_; }
  double lower() const { return breaks_.front(); }
  double upper() const { return breaks_.back(); }
  bool contains(double x) const { return x >= lower() && x <= upper(); }

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Writes the degree + 1 possibly-nonzero values at x into `values` and
  /// returns the index of the first of them. Throws DataError when x lies
  /// outside [lower, upper].
  int eval_nonzero(double x, std::span<double> values) const;

  Eigen::VectorXd eval(double x) const;

 private:
  int span_index(double x) const;

  int degree_;
  std::vector<double> breaks_;
  std::vector<double> knots_;
};

/// Equally spaced breakpoints over [lower, upper] giving exactly n_basis
/// functions. Requires n_basis >= degree + 1 and upper > lower.
BSplineBasis make_basis(int n_basis, int degree, double lower, double upper);

/// Breakpoints at empirical quantiles of xs (end points at min/max).
BSplineBasis make_quantile_basis(int n_basis, int degree, std::span<const double> xs);

BSplineBasis make_basis(int n_basis, int degree, std::span<const double> xs,
                        KnotPlacement placement);

Eigen::VectorXd eval_basis(const BSplineBasis& basis, double x);

/// Basis functions evaluated at the observed covariates: values(i, j) = phi_j(x_i).
struct DesignMatrix {
  Eigen::MatrixXd values;
  Eigen::VectorXd covariates;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

DesignMatrix design_matrix(const BSplineBasis& basis, std::span<const double> xs);
DesignMatrix design_matrix(const BSplineBasis& basis, const Eigen::VectorXd& xs);

}  // namespace fhs
