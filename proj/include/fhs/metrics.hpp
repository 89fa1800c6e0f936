#pragma once

#include <span>

#include <Eigen/Dense>

namespace fhs {

/// n^-1 sum (fhat_i - f_i)^2
double empirical_mse(const Eigen::VectorXd& fhat, const Eigen::VectorXd& ftrue);

/// Same after subtracting each vector's own mean (functions identified only
/// up to an additive constant).
double gauge_aligned_mse(const Eigen::VectorXd& fhat, const Eigen::VectorXd& ftrue);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

}  // namespace fhs
