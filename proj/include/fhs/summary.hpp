#pragma once

#include <Eigen/Dense>

#include "fhs/basis.hpp"
#include "fhs/kernels.hpp"
#include "fhs/sampler.hpp"

namespace fhs {

/// Posterior summary of f(x) = sum_j beta_j phi_j(x) on a grid.
struct FitSummary {
  Eigen::VectorXd grid;
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double level = 0.95;
  double omega_mean = 0.0;
  double sigma2_mean = 0.0;
};

/// Pointwise mean and equal-tailed `level` band of the curve draws.
FitSummary posterior_summary(const ChainDraws& draws, const BSplineBasis& basis, double level,
                             const Eigen::VectorXd& grid);

/// Same, for curves given by an arbitrary (points x k) evaluation matrix.
PointwiseBands curve_bands(const Eigen::MatrixXd& eval, const Eigen::MatrixXd& betas, double level);

/// Posterior mean of the coefficients.
Eigen::VectorXd posterior_mean_beta(const ChainDraws& draws);

Eigen::VectorXd linspace(double lo, double hi, Eigen::Index n);

}  // namespace fhs
