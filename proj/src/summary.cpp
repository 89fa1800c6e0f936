#include "fhs/summary.hpp"

#include "fhs/errors.hpp"

namespace fhs {

PointwiseBands curve_bands(const Eigen::MatrixXd& eval, const Eigen::MatrixXd& betas, double level) {
  if (betas.rows() == 0) throw DataError("no draws to summarise");
  if (eval.cols() != betas.cols()) throw ConfigError("basis size does not match coefficient draws");
  const Eigen::MatrixXd curves = eval * betas.transpose();
  return kernels::pointwise_bands(curves, level);
}

FitSummary posterior_summary(const ChainDraws& draws, const BSplineBasis& basis, double level,
                             const Eigen::VectorXd& grid) {
  if (draws.n_kept() == 0) throw DataError("no draws to summarise");
  const DesignMatrix eval = design_matrix(basis, grid);
  PointwiseBands bands = curve_bands(eval.values, draws.betas, level);
  FitSummary out;
  out.grid = grid;
  out.mean = std::move(bands.mean);
  out.lower = std::move(bands.lower);
  out.upper = std::move(bands.upper);
  out.level = level;
  out.omega_mean = draws.omegas.mean();
  out.sigma2_mean = draws.sigma2s.mean();
  return out;
}

Eigen::VectorXd posterior_mean_beta(const ChainDraws& draws) {
  if (draws.n_kept() == 0) throw DataError("no draws to summarise");
  return draws.betas.colwise().mean().transpose();
}

Eigen::VectorXd linspace(double lo, double hi, Eigen::Index n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, lo);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out[n - 1] = hi;
  return out;
}

}  // namespace fhs
