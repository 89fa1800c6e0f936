#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fhs/basis.hpp"
#include "fhs/kernels.hpp"
#include "fhs/sampler.hpp"

namespace fhs {

/// One additive component: a centered B-spline design with the last column
/// dropped (the centered columns sum to zero), together with its thin QR
/// factor phi = U R.
struct AdditiveComponent {
  int id = 0;
  BSplineBasis basis;
  Eigen::RowVectorXd column_means;  // of the full k_n columns
  Eigen::MatrixXd phi;              // n x m, m = k_n - 1
  Eigen::MatrixXd u;                // n x m orthonormal
  Eigen::MatrixXd r_inv;            // beta = r_inv * theta with theta = U^T phi beta

  int dim() const { return static_cast<int>(phi.cols()); }
  /// Centered design rows at arbitrary points in the basis domain.
  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
};

struct AdditiveDesign {
  std::vector<AdditiveComponent> components;
  Eigen::VectorXd y_centered;
  double intercept = 0.0;

  Eigen::Index n() const { return y_centered.size(); }
  int p() const { return static_cast<int>(components.size()); }
};

/// Builds one component per column of X. `ids` defaults to 0..p-1.
AdditiveDesign make_additive_design(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k_n, int degree,
                                    std::vector<int> ids = {});

/// Draws in the orthonormal coordinates theta_j = U_j^T phi_j beta_j.
struct AdditiveDraws {
  std::vector<int> ids;
  std::vector<Eigen::MatrixXd> thetas;  // per component, n_kept x m
  Eigen::MatrixXd omegas;               // n_kept x p
  Eigen::VectorXd sigma2s;
  std::uint64_t seed = 0;
  double b = 0.0;

  Eigen::Index n_kept() const { return sigma2s.size(); }
  /// Index of the component with the given id in the draw arrays.
  int index_of(int id) const;
};

/// Called before each coefficient draw with the partial residual r_j and the
/// conditional mean (1 - omega_j)(phi_j^T phi_j)^-1 phi_j^T r_j in beta
/// coordinates.
using AdditiveObserver = std::function<void(int sweep, int id, const Eigen::VectorXd& partial_residual,
                                            double omega, const Eigen::VectorXd& mean_beta)>;

/// Componentwise Gibbs sampler with zero-function null spaces. Components
/// are scanned in ascending id order; each draws from its own random stream
/// keyed by its id, so reordering the components reorders the draws only.
AdditiveDraws backfit_chain(const AdditiveDesign& design, const FhsConfig& cfg,
                            const AdditiveObserver& observer = {});

/// Posterior mean of sum_j f_j at the sample points (centered scale).
Eigen::VectorXd additive_fitted_mean(const AdditiveDesign& design, const AdditiveDraws& draws);

/// Unpenalized least-squares additive fit by Gauss-Seidel backfitting;
/// returns theta per component.
std::vector<Eigen::VectorXd> backfit_least_squares(const AdditiveDesign& design, int max_sweeps = 500,
                                                   double tol = 1e-10);
Eigen::VectorXd additive_fitted(const AdditiveDesign& design, const std::vector<Eigen::VectorXd>& thetas);

struct SelectionResult {
  std::vector<bool> included;
  std::vector<Eigen::VectorXd> grids;
  std::vector<PointwiseBands> bands;
  Eigen::VectorXd max_abs_center;
  Eigen::VectorXd mean_width;
};

/// Component j is included iff its pointwise band excludes zero somewhere on
/// a grid of `grid_points` equally spaced points over its covariate range.
SelectionResult select_components(const AdditiveDraws& draws, const AdditiveDesign& design, double level = 0.95,
                                  int grid_points = 101);

/// Component included iff some band excludes zero.
bool band_excludes_zero(const PointwiseBands& bands);

struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;
};

ConfusionCounts confusion(const std::vector<bool>& included, const std::vector<bool>& truth);

/// Matthews correlation coefficient; 0 when any marginal sum is zero.
double mcc(long tp, long tn, long fp, long fn);
inline double mcc(const ConfusionCounts& c) { return mcc(c.tp, c.tn, c.fp, c.fn); }

}  // namespace fhs
