#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (used by the
// library) and a plain serial reference in `serial::` that the tests and the
// benchmark compare against.

#include <span>

#include <Eigen/Dense>

#include "fhs/basis.hpp"

namespace fhs {

struct PointwiseBands {
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

namespace kernels {

/// n x k_n matrix of basis values at xs. Throws DataError naming the first
/// out-of-domain index.
Eigen::MatrixXd design_rows(const BSplineBasis& basis, std::span<const double> xs);

/// Row-wise mean and equal-tailed `level` quantile band of a (points x draws)
/// matrix. Quantiles use linear interpolation between order statistics.
PointwiseBands pointwise_bands(const Eigen::MatrixXd& values, double level);

}  // namespace kernels

namespace serial {

Eigen::MatrixXd design_rows(const BSplineBasis& basis, std::span<const double> xs);
PointwiseBands pointwise_bands(const Eigen::MatrixXd& values, double level);

}  // namespace serial

/// Linear-interpolation quantile of an ascending sample, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

}  // namespace fhs
