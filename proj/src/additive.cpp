#include "fhs/additive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fhs/errors.hpp"
#include "fhs/summary.hpp"

namespace fhs {

Eigen::MatrixXd AdditiveComponent::eval(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd full = design_matrix(basis, x).values.rowwise() - column_means;
  return full.leftCols(dim());
}

int AdditiveDraws::index_of(int id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw ConfigError("no component with id " + std::to_string(id));
  return static_cast<int>(it - ids.begin());
}

AdditiveDesign make_additive_design(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k_n, int degree,
                                    std::vector<int> ids) {
  if (x.rows() != y.size()) throw DataError("covariate rows do not match response length");
  if (x.cols() < 1) throw ConfigError("additive model needs at least one covariate");
  if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite values in additive data");
  if (ids.empty()) {
    ids.resize(static_cast<std::size_t>(x.cols()));
    std::iota(ids.begin(), ids.end(), 0);
  }
  if (static_cast<Eigen::Index>(ids.size()) != x.cols()) throw ConfigError("one id per component required");

  AdditiveDesign out;
  out.intercept = y.mean();
  out.y_centered = y.array() - out.intercept;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd col = x.col(j);
    AdditiveComponent c{ids[static_cast<std::size_t>(j)],
                        make_basis(k_n, degree, col.minCoeff(), col.maxCoeff()),
                        {}, {}, {}, {}};
    const Eigen::MatrixXd full = design_matrix(c.basis, col).values;
    c.column_means = full.colwise().mean();
    c.phi = (full.rowwise() - c.column_means).leftCols(full.cols() - 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.phi);
    const auto m = c.phi.cols();
    c.u = qr.householderQ() * Eigen::MatrixXd::Identity(c.phi.rows(), m);
    Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const Eigen::VectorXd diag = r.diagonal().cwiseAbs();
    if (!(diag.minCoeff() > kRankTolerance * diag.maxCoeff())) {
      throw NumericalError("component " + std::to_string(c.id) + " has a singular Gram matrix");
    }
    c.r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
    out.components.push_back(std::move(c));
  }
  return out;
}

namespace {

std::vector<int> scan_order(const AdditiveDesign& design) {
  std::vector<int> order(static_cast<std::size_t>(design.p()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int l, int r) { return design.components[l].id < design.components[r].id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (design.components[order[i]].id == design.components[order[i - 1]].id) {
      throw ConfigError("duplicate component id " + std::to_string(design.components[order[i]].id));
    }
  }
  return order;
}

// Summed in scan order so that the result does not depend on storage order.
Eigen::VectorXd residual_of(const AdditiveDesign& design, const std::vector<Eigen::VectorXd>& thetas,
                            const std::vector<int>& order) {
  Eigen::VectorXd resid = design.y_centered;
  for (int j : order) resid.noalias() -= design.components[j].u * thetas[j];
  return resid;
}

}  // namespace

AdditiveDraws backfit_chain(const AdditiveDesign& design, const FhsConfig& cfg, const AdditiveObserver& observer) {
  cfg.validate();
  const int p = design.p();
  if (p < 1) throw ConfigError("additive model needs at least one component");
  const auto n = design.n();
  const std::vector<int> order = scan_order(design);
  const double b = cfg.resolve_b(n);

  std::vector<RandomStream> streams;
  streams.reserve(static_cast<std::size_t>(p));
  for (const auto& c : design.components) streams.emplace_back(mix_seed(cfg.seed, static_cast<std::uint64_t>(c.id) + 1));
  RandomStream global(mix_seed(cfg.seed, 0));

  std::vector<Eigen::VectorXd> theta(static_cast<std::size_t>(p));
  std::vector<double> eta(static_cast<std::size_t>(p), 1.0);
  int total_dim = 0;
  for (int j = 0; j < p; ++j) {
    theta[j] = Eigen::VectorXd::Zero(design.components[j].dim());
    total_dim += design.components[j].dim();
  }
  if (cfg.fixed_omega) {
    const double w = *cfg.fixed_omega;
    std::fill(eta.begin(), eta.end(), w >= 1.0 ? std::numeric_limits<double>::infinity() : w / (1.0 - w));
  }
  double sigma2 = cfg.sigma2_prior ? std::max(design.y_centered.squaredNorm() / static_cast<double>(n), 1e-8)
                                   : cfg.fixed_sigma2;
  Eigen::VectorXd resid = design.y_centered;

  const auto kept = cfg.n_iter - cfg.n_burnin;
  AdditiveDraws out;
  out.seed = cfg.seed;
  out.b = b;
  for (const auto& c : design.components) {
    out.ids.push_back(c.id);
    out.thetas.emplace_back(kept, c.dim());
  }
  out.omegas.resize(kept, p);
  out.sigma2s.resize(kept);

  for (int sweep = 0; sweep < cfg.n_iter; ++sweep) {
    if (sweep > 0 && sweep % 500 == 0) resid = residual_of(design, theta, order);
    const double sd = std::sqrt(sigma2);
    for (int j : order) {
      const AdditiveComponent& c = design.components[j];
      RandomStream& rng = streams[j];
      const double shrink = 1.0 / (1.0 + eta[j]);  // 1 - omega_j
      const Eigen::VectorXd coord = c.u.transpose() * resid + theta[j];
      if (observer) {
        const Eigen::VectorXd partial = resid + c.u * theta[j];
        observer(sweep, c.id, partial, 1.0 / (1.0 + 1.0 / eta[j]), c.r_inv * (shrink * coord));
      }
      Eigen::VectorXd next(c.dim());
      const double sd_j = sd * std::sqrt(shrink);
      for (int i = 0; i < c.dim(); ++i) next[i] = shrink * coord[i] + sd_j * rng.normal();
      resid.noalias() -= c.u * (next - theta[j]);
      theta[j] = std::move(next);
    }

    double penalty = 0.0;
    for (int j : order) {
      const AdditiveComponent& c = design.components[j];
      const double q = theta[j].squaredNorm();
      if (!cfg.fixed_omega) eta[j] = slice_update_eta(eta[j], q / (2.0 * sigma2), cfg.a + c.dim() / 2.0, cfg.a, b, streams[j]);
      if (q > 0.0 && eta[j] > 0.0) penalty += eta[j] * q;
    }

    if (cfg.sigma2_prior) {
      const InverseGammaPrior prior = *cfg.sigma2_prior;
      InverseGammaParams params{prior.shape + static_cast<double>(n) / 2.0, prior.rate + resid.squaredNorm() / 2.0};
      if (cfg.sigma2_prior_includes_beta_term) {
        params.shape += total_dim / 2.0;
        params.rate += penalty / 2.0;
      }
      sigma2 = draw_inverse_gamma(global, params);
    }
    if (!std::isfinite(sigma2) || !(sigma2 > 0.0) || !resid.allFinite()) {
      throw NumericalError("additive chain produced a non-finite state at sweep " + std::to_string(sweep));
    }

    if (sweep >= cfg.n_burnin) {
      const auto row = sweep - cfg.n_burnin;
      for (int j = 0; j < p; ++j) {
        out.thetas[j].row(row) = theta[j].transpose();
        out.omegas(row, j) = 1.0 / (1.0 + 1.0 / eta[j]);
      }
      out.sigma2s[row] = sigma2;
    }
  }
  return out;
}

Eigen::VectorXd additive_fitted(const AdditiveDesign& design, const std::vector<Eigen::VectorXd>& thetas) {
  Eigen::VectorXd fit = Eigen::VectorXd::Zero(design.n());
  for (int j = 0; j < design.p(); ++j) fit.noalias() += design.components[j].u * thetas[j];
  return fit;
}

Eigen::VectorXd additive_fitted_mean(const AdditiveDesign& design, const AdditiveDraws& draws) {
  std::vector<Eigen::VectorXd> means;
  for (int j = 0; j < design.p(); ++j) means.push_back(draws.thetas[j].colwise().mean().transpose());
  return additive_fitted(design, means);
}

std::vector<Eigen::VectorXd> backfit_least_squares(const AdditiveDesign& design, int max_sweeps, double tol) {
  const std::vector<int> order = scan_order(design);
  std::vector<Eigen::VectorXd> theta;
  for (const auto& c : design.components) theta.push_back(Eigen::VectorXd::Zero(c.dim()));
  Eigen::VectorXd resid = design.y_centered;
  const double scale = std::max(design.y_centered.squaredNorm(), 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int j : order) {
      const auto& c = design.components[j];
      const Eigen::VectorXd next = c.u.transpose() * resid + theta[j];
      const Eigen::VectorXd delta = next - theta[j];
      resid.noalias() -= c.u * delta;
      change += delta.squaredNorm();
      theta[j] = next;
    }
    if (change < tol * scale) break;
  }
  return theta;
}

bool band_excludes_zero(const PointwiseBands& bands) {
  for (Eigen::Index i = 0; i < bands.lower.size(); ++i) {
    if (bands.lower[i] > 0.0 || bands.upper[i] < 0.0) return true;
  }
  return false;
}

SelectionResult select_components(const AdditiveDraws& draws, const AdditiveDesign& design, double level,
                                  int grid_points) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
  if (grid_points < 2) throw ConfigError("selection grid needs at least two points");
  SelectionResult out;
  const int p = design.p();
  out.max_abs_center.resize(p);
  out.mean_width.resize(p);
  for (int j = 0; j < p; ++j) {
    const AdditiveComponent& c = design.components[j];
    const int d = draws.index_of(c.id);
    Eigen::VectorXd grid = linspace(c.basis.lower(), c.basis.upper(), grid_points);
    const Eigen::MatrixXd eval = c.eval(grid) * c.r_inv;
    PointwiseBands bands = curve_bands(eval, draws.thetas[d], level);
    out.included.push_back(band_excludes_zero(bands));
    out.max_abs_center[j] = (0.5 * (bands.lower + bands.upper)).cwiseAbs().maxCoeff();
    out.mean_width[j] = (bands.upper - bands.lower).mean();
    out.grids.push_back(std::move(grid));
    out.bands.push_back(std::move(bands));
  }
  return out;
}

ConfusionCounts confusion(const std::vector<bool>& included, const std::vector<bool>& truth) {
  if (included.size() != truth.size()) throw ConfigError("selection and truth lengths differ");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      included[i] ? ++c.tp : ++c.fn;
    } else {
      included[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

double mcc(long tp, long tn, long fp, long fn) {
  const double a = static_cast<double>(tp + fp);
  const double b = static_cast<double>(tp + fn);
  const double c = static_cast<double>(tn + fp);
  const double d = static_cast<double>(tn + fn);
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) return 0.0;
  const double num = static_cast<double>(tp) * static_cast<double>(tn) - static_cast<double>(fp) * static_cast<double>(fn);
  return num / std::sqrt(a * b * c * d);
}

}  // namespace fhs
