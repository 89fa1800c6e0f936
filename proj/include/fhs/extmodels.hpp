#pragma once

#include <string>

#include <Eigen/Dense>

#include "fhs/basis.hpp"
#include "fhs/projection.hpp"
#include "fhs/random.hpp"
#include "fhs/sampler.hpp"

namespace fhs {

/// Parametric class a fit is shrunk towards.
enum class NullSpace { kNone, kConstant, kLinear, kQuadratic, kPiecewiseLinear };

NullSpace parse_null_space(const std::string& name);
const char* to_string(NullSpace null);

/// Null design of the given class evaluated at x (n x d0; d0 = 0 for kNone).
Eigen::MatrixXd null_design(NullSpace null, const Eigen::VectorXd& x);

struct RegressionFit {
  BSplineBasis basis;
  ShrinkageDesign design;
  ChainDraws draws;
  /// Least-squares coefficients (the unshrunk projection fit).
  Eigen::VectorXd ls_beta;
};

/// y_i = f(x_i) + e_i with f shrunk towards `null`.
RegressionFit fit_regression(const Eigen::VectorXd& x, const Eigen::VectorXd& y, NullSpace null,
                             const FhsConfig& cfg);

struct VaryingCoefficientData {
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  Eigen::VectorXd x;

  void validate() const;
};

/// y_i = w_i f(x_i) + e_i, run on the weighted designs diag(w) Phi and
/// diag(w) Phi0.
RegressionFit fit_varying_coefficient(const VaryingCoefficientData& data, NullSpace null, const FhsConfig& cfg);

struct LogSplineSettings {
  int grid_nodes = 512;
  /// Fraction of the data range added on each side.
  double extension = 0.1;
  double target_low = 0.2;
  double target_high = 0.4;
  int adapt_every = 200;
};

/// Log density f(t) = phi(t)^T beta on the extended range, normalized on
/// the trapezoid grid.
class LogSplineModel {
 public:
  LogSplineModel(BSplineBasis basis, int grid_nodes);

  const BSplineBasis& basis() const { return basis_; }
  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::MatrixXd& grid_design() const { return grid_design_; }

  /// log int exp(f), with f recentred by its grid maximum before exponentiation.
  double log_normalizer(const Eigen::VectorXd& beta) const;
  /// exp(f - log_normalizer) on the grid.
  Eigen::VectorXd density_on_grid(const Eigen::VectorXd& beta) const;
  /// Trapezoid weights of the grid.
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  BSplineBasis basis_;
  Eigen::VectorXd grid_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd grid_design_;
};

struct LogSplineFit {
  LogSplineModel model;
  ShrinkageDesign design;
  ChainDraws draws;
  /// Maximum-likelihood coefficients without shrinkage.
  Eigen::VectorXd mle_beta;
  double acceptance_rate = 0.0;
  double proposal_scale = 0.0;
};

/// Density estimation with f shrunk towards quadratics {1, y, y^2}: random
/// walk Metropolis on beta within Gibbs, slice update for the shrinkage
/// scale, sigma^2 = 1.
LogSplineFit fit_logspline(const Eigen::VectorXd& y, const FhsConfig& cfg, const LogSplineSettings& mh = {});

/// Newton maximum likelihood for the log-spline model on the given data.
Eigen::VectorXd logspline_mle(const LogSplineModel& model, const Eigen::MatrixXd& data_design);

enum class KernelKind { kExponential, kSquaredExponential };

struct GpShrinkagePrior {
  KernelKind kernel = KernelKind::kExponential;
  double length_scale = 1.0;
  NullSpace null = NullSpace::kLinear;
  double a = 0.5;
  double b = 1e-4;
  /// Relative to the mean kernel diagonal.
  double jitter = 1e-8;
};

Eigen::MatrixXd kernel_matrix(KernelKind kernel, double length_scale, const Eigen::VectorXd& xs);

struct GpPaths {
  /// n_paths x n
  Eigen::MatrixXd paths;
  Eigen::VectorXd omegas;
};

/// Draws paths F ~ N(0, (Sigma^-1 + (I - Q0) / tau^2)^-1) with
/// omega = 1 / (1 + tau^2) ~ Beta(a, b) per path.
GpPaths gp_prior_sample(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs, int n_paths, RandomStream& rng);

/// Same with tau held fixed.
GpPaths gp_prior_sample_fixed_tau(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs, double tau,
                                  int n_paths, RandomStream& rng);

/// (Sigma^-1 + (I - Q0) / tau^2)^-1
Eigen::MatrixXd gp_covariance(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs, double tau);

/// ||(I - Q0) F|| / ||F|| per path.
Eigen::VectorXd off_null_fraction(const Eigen::MatrixXd& paths, const Eigen::MatrixXd& phi0);

}  // namespace fhs
