#include "fhs/extmodels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fhs/errors.hpp"
#include "fhs/special.hpp"

namespace fhs {

NullSpace parse_null_space(const std::string& name) {
  if (name == "none") return NullSpace::kNone;
  if (name == "constant") return NullSpace::kConstant;
  if (name == "linear") return NullSpace::kLinear;
  if (name == "quadratic") return NullSpace::kQuadratic;
  if (name == "piecewise-linear") return NullSpace::kPiecewiseLinear;
  throw ConfigError("unknown null space '" + name + "'");
}

const char* to_string(NullSpace null) {
  switch (null) {
    case NullSpace::kNone: return "none";
    case NullSpace::kConstant: return "constant";
    case NullSpace::kLinear: return "linear";
    case NullSpace::kQuadratic: return "quadratic";
    case NullSpace::kPiecewiseLinear: return "piecewise-linear";
  }
  return "?";
}

Eigen::MatrixXd null_design(NullSpace null, const Eigen::VectorXd& x) {
  switch (null) {
    case NullSpace::kNone: return Eigen::MatrixXd(x.size(), 0);
    case NullSpace::kConstant: return polynomial_null_design(x, 0);
    case NullSpace::kLinear: return polynomial_null_design(x, 1);
    case NullSpace::kQuadratic: return polynomial_null_design(x, 2);
    case NullSpace::kPiecewiseLinear: return piecewise_linear_null_design(x);
  }
  throw ConfigError("unknown null space");
}

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

RegressionFit fit_weighted(const Eigen::VectorXd& x, const Eigen::VectorXd& w, const Eigen::VectorXd& y,
                           NullSpace null, const FhsConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size() || x.size() != w.size()) throw DataError("x, w and y lengths differ");
  if (!x.allFinite() || !w.allFinite()) throw DataError("covariates contain non-finite values");
  BSplineBasis basis = make_basis(cfg.k_n, cfg.degree, as_span(x), cfg.knots);
  const Eigen::MatrixXd phi = w.asDiagonal() * design_matrix(basis, x).values;
  const Eigen::MatrixXd phi0 = w.asDiagonal() * null_design(null, x);
  ShrinkageDesign design = orthogonal_complement(phi, phi0);
  Eigen::VectorXd ls = least_squares_coefficients(design, y);
  ChainDraws draws = run_chain(y, design, cfg);
  return RegressionFit{std::move(basis), std::move(design), std::move(draws), std::move(ls)};
}

}  // namespace

RegressionFit fit_regression(const Eigen::VectorXd& x, const Eigen::VectorXd& y, NullSpace null,
                             const FhsConfig& cfg) {
  return fit_weighted(x, Eigen::VectorXd::Ones(x.size()), y, null, cfg);
}

void VaryingCoefficientData::validate() const {
  if (y.size() != w.size() || y.size() != x.size()) throw DataError("y, w and x lengths differ");
  if (!y.allFinite() || !w.allFinite() || !x.allFinite()) throw DataError("non-finite entries");
}

RegressionFit fit_varying_coefficient(const VaryingCoefficientData& data, NullSpace null, const FhsConfig& cfg) {
  data.validate();
  return fit_weighted(data.x, data.w, data.y, null, cfg);
}

// ---------------------------------------------------------------------------
// log-spline density

LogSplineModel::LogSplineModel(BSplineBasis basis, int grid_nodes) : basis_(std::move(basis)) {
  if (grid_nodes < 3) throw ConfigError("quadrature grid needs at least 3 nodes");
  grid_ = Eigen::VectorXd::LinSpaced(grid_nodes, basis_.lower(), basis_.upper());
  grid_[grid_nodes - 1] = basis_.upper();
  const double h = (basis_.upper() - basis_.lower()) / (grid_nodes - 1);
  weights_ = Eigen::VectorXd::Constant(grid_nodes, h);
  weights_[0] = weights_[grid_nodes - 1] = h / 2.0;
  grid_design_ = design_matrix(basis_, grid_).values;
}

double LogSplineModel::log_normalizer(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd f = grid_design_ * beta;
  const double top = f.maxCoeff();
  return top + std::log(weights_.dot((f.array() - top).exp().matrix()));
}

Eigen::VectorXd LogSplineModel::density_on_grid(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd f = grid_design_ * beta;
  return (f.array() - log_normalizer(beta)).exp().matrix();
}

namespace {

// The chain runs on reduced block coordinates g with beta = t_r g: the
// component along the constant function is pinned at zero, which fixes the
// additive-constant gauge of f.
struct ReducedLogSpline {
  const LogSplineModel& model;
  Eigen::MatrixXd t_r;     // k x (k - 1)
  Eigen::MatrixXd grid_g;  // grid design in g coordinates
  Eigen::VectorXd data_g;  // sum over data of the design rows, in g coordinates
  double n;

  // Log-likelihood; fills the grid probabilities p (weights included).
  double loglik(const Eigen::VectorXd& g, Eigen::VectorXd* p = nullptr) const {
    const Eigen::VectorXd f = grid_g * g;
    const double top = f.maxCoeff();
    const Eigen::ArrayXd e = model.weights().array() * (f.array() - top).exp();
    const double z = e.sum();
    if (p) *p = (e / z).matrix();
    return data_g.dot(g) - n * (top + std::log(z));
  }

  // Fisher information n Cov_p(grid_g).
  Eigen::MatrixXd information(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd mean = grid_g.transpose() * p;
    Eigen::MatrixXd cov = grid_g.transpose() * p.asDiagonal() * grid_g;
    cov.noalias() -= mean * mean.transpose();
    return n * cov;
  }
};

ReducedLogSpline reduce(const LogSplineModel& model, const ShrinkageDesign& design) {
  const auto k = design.k_n();
  ReducedLogSpline r{model, design.to_coefficients.rightCols(k - 1), {}, {}, static_cast<double>(design.n())};
  r.grid_g = model.grid_design() * r.t_r;
  r.data_g = (design.phi * r.t_r).transpose() * Eigen::VectorXd::Ones(design.n());
  return r;
}

Eigen::VectorXd newton_mle(const ReducedLogSpline& r) {
  const auto m = r.grid_g.cols();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd p;
  double ll = r.loglik(g, &p);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd grad = r.data_g - r.n * (r.grid_g.transpose() * p);
    Eigen::MatrixXd info = r.information(p);
    info.diagonal().array() += 1e-10 * (1.0 + info.diagonal().array().abs());
    const Eigen::VectorXd step = info.ldlt().solve(grad);
    if (!step.allFinite()) throw NumericalError("log-spline Newton step is not finite");
    double t = 1.0;
    Eigen::VectorXd next;
    double next_ll = -std::numeric_limits<double>::infinity();
    for (int half = 0; half < 40; ++half, t /= 2.0) {
      next = g + t * step;
      next_ll = r.loglik(next);
      if (next_ll >= ll) break;
    }
    if (!(next_ll >= ll)) break;
    const double gain = next_ll - ll;
    g = next;
    ll = r.loglik(g, &p);
    if (gain < 1e-12 * (1.0 + std::abs(ll))) break;
  }
  return g;
}

}  // namespace

Eigen::VectorXd logspline_mle(const LogSplineModel& model, const Eigen::MatrixXd& data_design) {
  if (data_design.cols() != model.basis().size()) throw ConfigError("design width does not match basis");
  // Constant-only null design: its block coordinate is the pinned gauge.
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(data_design.rows(), 1);
  const ShrinkageDesign design = orthogonal_complement(data_design, ones);
  const ReducedLogSpline r = reduce(model, design);
  return r.t_r * newton_mle(r);
}

LogSplineFit fit_logspline(const Eigen::VectorXd& y, const FhsConfig& cfg, const LogSplineSettings& mh) {
  cfg.validate();
  if (y.size() < cfg.k_n) throw DataError("log-spline fit needs at least k_n observations");
  if (!y.allFinite()) throw DataError("observations contain non-finite values");
  if (!(mh.extension >= 0.0)) throw ConfigError("grid extension must be non-negative");
  if (!(mh.target_low > 0.0 && mh.target_low < mh.target_high && mh.target_high < 1.0)) {
    throw ConfigError("acceptance band must satisfy 0 < low < high < 1");
  }

  const double lo = y.minCoeff();
  const double hi = y.maxCoeff();
  const double pad = mh.extension * (hi - lo);
  LogSplineModel model(make_basis(cfg.k_n, cfg.degree, lo - pad, hi + pad), mh.grid_nodes);
  const Eigen::MatrixXd phi = design_matrix(model.basis(), y).values;
  ShrinkageDesign design = orthogonal_complement(phi, polynomial_null_design(y, 2));
  const ReducedLogSpline r = reduce(model, design);

  const auto m = r.grid_g.cols();         // k - 1 free coordinates
  const int shrunk = design.shrunk_dim();  // the last `shrunk` of them
  const double b = cfg.resolve_b(design.n());
  const double shape = cfg.a + shrunk / 2.0;
  RandomStream rng(cfg.seed);

  Eigen::VectorXd g = newton_mle(r);
  const Eigen::VectorXd mle_beta = r.t_r * g;
  Eigen::VectorXd p;
  double ll = r.loglik(g, &p);
  Eigen::MatrixXd info = r.information(p);
  double eta = 1.0;
  double scale = 2.38 / std::sqrt(static_cast<double>(m));

  const auto kept = cfg.n_iter - cfg.n_burnin;
  LogSplineFit out{model, design, {}, mle_beta, 0.0, 0.0};
  out.draws.betas.resize(kept, design.k_n());
  out.draws.omegas.resize(kept);
  out.draws.log_etas.resize(kept);
  out.draws.sigma2s = Eigen::VectorXd::Ones(kept);
  out.draws.seed = cfg.seed;
  out.draws.b = b;
  out.draws.config = cfg;

  long window_accepts = 0;
  long window = 0;
  long kept_accepts = 0;
  Eigen::VectorXd z(m);
  for (int iter = 0; iter < cfg.n_iter; ++iter) {
    // Metropolis step for g given eta; proposal precision n Cov + eta P1.
    Eigen::MatrixXd precision = info;
    if (std::isfinite(eta)) precision.diagonal().tail(shrunk).array() += eta;
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) throw NumericalError("proposal precision is not positive definite at iteration " + std::to_string(iter));
    for (Eigen::Index i = 0; i < m; ++i) z[i] = rng.normal();
    const Eigen::VectorXd proposal = g + scale * llt.matrixU().solve(z);
    const double proposal_ll = r.loglik(proposal);
    const double log_ratio = proposal_ll - ll - 0.5 * eta * (proposal.tail(shrunk).squaredNorm() - g.tail(shrunk).squaredNorm());
    const bool accept = std::log(rng.uniform()) < log_ratio;
    if (accept) {
      g = proposal;
      ll = proposal_ll;
    }

    const double s = 0.5 * g.tail(shrunk).squaredNorm();
    eta = slice_update_eta(eta, s, shape, cfg.a, b, rng);

    if (!std::isfinite(ll) || std::isnan(eta) || !(eta > 0.0)) {
      throw NumericalError("log-spline chain produced a non-finite state at iteration " + std::to_string(iter));
    }

    if (iter < cfg.n_burnin) {
      window_accepts += accept;
      if (++window == mh.adapt_every) {
        const double rate = static_cast<double>(window_accepts) / static_cast<double>(window);
        if (rate < mh.target_low) scale *= 0.8;
        if (rate > mh.target_high) scale *= 1.25;
        r.loglik(g, &p);
        info = r.information(p);
        window = window_accepts = 0;
      }
    } else {
      kept_accepts += accept;
      const auto row = iter - cfg.n_burnin;
      out.draws.betas.row(row) = (r.t_r * g).transpose();
      out.draws.omegas[row] = 1.0 / (1.0 + 1.0 / eta);
      out.draws.log_etas[row] = std::log(eta);
    }
  }
  out.acceptance_rate = static_cast<double>(kept_accepts) / static_cast<double>(kept);
  out.proposal_scale = scale;
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian process prior

Eigen::MatrixXd kernel_matrix(KernelKind kernel, double length_scale, const Eigen::VectorXd& xs) {
  if (!(length_scale > 0.0)) throw ConfigError("kernel length scale must be positive");
  const auto n = xs.size();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = std::abs(xs[i] - xs[j]) / length_scale;
      k(i, j) = kernel == KernelKind::kExponential ? std::exp(-d) : std::exp(-0.5 * d * d);
    }
  }
  return k;
}

namespace {

// Precision Sigma^-1 written in the orthonormal coordinates [U0, Up], where
// Up spans the orthogonal complement of the null design. Adding eta I to the
// Up block gives the shrunk precision.
struct GpFactor {
  Eigen::MatrixXd u0;
  Eigen::MatrixXd up;
  Eigen::MatrixXd a00;
  Eigen::MatrixXd w;   // eigenvectors of the Up block
  Eigen::VectorXd d;   // its eigenvalues
  Eigen::MatrixXd r;   // w^T A_p0

  struct Marginal {
    Eigen::VectorXd e;  // 1 / (d + eta)
    Eigen::LLT<Eigen::MatrixXd> schur;
  };

  Marginal marginal(double eta) const {
    Marginal m;
    if (std::isinf(eta)) {
      m.e = Eigen::VectorXd::Zero(d.size());
    } else {
      m.e = (d.array() + eta).inverse().matrix();
    }
    const Eigen::MatrixXd s = a00 - r.transpose() * m.e.asDiagonal() * r;
    m.schur.compute(s);
    if (u0.cols() > 0 && m.schur.info() != Eigen::Success) {
      throw NumericalError("GP null-block precision is not positive definite");
    }
    return m;
  }
};

GpFactor gp_factor(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs) {
  if (xs.size() < 2) throw DataError("GP prior needs at least two locations");
  if (!(prior.a > 0.0) || !(prior.b > 0.0)) throw ConfigError("GP prior needs a > 0 and b > 0");
  if (!(prior.jitter > 0.0)) throw ConfigError("GP jitter must be positive");
  const auto n = xs.size();
  Eigen::MatrixXd sigma = kernel_matrix(prior.kernel, prior.length_scale, xs);
  const double base = prior.jitter * sigma.diagonal().mean();
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  double jitter = base;
  for (int attempt = 0; attempt <= 3 && !ok; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd s = sigma;
    s.diagonal().array() += jitter;
    llt.compute(s);
    ok = llt.info() == Eigen::Success;
  }
  if (!ok) throw NumericalError("kernel matrix factorization failed after jitter escalation");
  const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(n, n));

  GpFactor f;
  const Eigen::MatrixXd phi0 = null_design(prior.null, xs);
  f.u0 = phi0.cols() > 0 ? orthonormalize(phi0) : Eigen::MatrixXd(n, 0);
  const auto d0 = f.u0.cols();
  if (d0 > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(f.u0);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    f.up = q.rightCols(n - d0);
  } else {
    f.up = Eigen::MatrixXd::Identity(n, n);
  }
  f.a00 = f.u0.transpose() * precision * f.u0;
  const Eigen::MatrixXd app = f.up.transpose() * precision * f.up;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (app + app.transpose()));
  f.w = eig.eigenvectors();
  f.d = eig.eigenvalues();
  f.r = f.w.transpose() * (f.up.transpose() * precision * f.u0);
  return f;
}

Eigen::VectorXd gp_path(const GpFactor& f, double eta, RandomStream& rng) {
  const auto d0 = f.u0.cols();
  const auto m = f.up.cols();
  const GpFactor::Marginal mg = f.marginal(eta);
  Eigen::VectorXd f0(d0);
  if (d0 > 0) {
    Eigen::VectorXd z0(d0);
    for (Eigen::Index i = 0; i < d0; ++i) z0[i] = rng.normal();
    f0 = mg.schur.matrixU().solve(z0);
  }
  Eigen::VectorXd h(m);
  for (Eigen::Index i = 0; i < m; ++i) h[i] = std::sqrt(mg.e[i]) * rng.normal();
  if (d0 > 0) h -= mg.e.asDiagonal() * (f.r * f0);
  return f.u0 * f0 + f.up * (f.w * h);
}

}  // namespace

GpPaths gp_prior_sample(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs, int n_paths, RandomStream& rng) {
  if (n_paths < 1) throw ConfigError("need at least one path");
  const GpFactor f = gp_factor(prior, xs);
  GpPaths out;
  out.paths.resize(n_paths, xs.size());
  out.omegas.resize(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    const BetaDraw omega = draw_beta_variate(rng, prior.a, prior.b);
    // eta = 1 / tau^2 = omega / (1 - omega)
    const double eta = std::exp(-omega.log_odds_complement);
    out.omegas[i] = omega.value;
    out.paths.row(i) = gp_path(f, eta, rng).transpose();
  }
  return out;
}

GpPaths gp_prior_sample_fixed_tau(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs, double tau,
                                  int n_paths, RandomStream& rng) {
  if (n_paths < 1) throw ConfigError("need at least one path");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  const GpFactor f = gp_factor(prior, xs);
  const double eta = 1.0 / (tau * tau);
  GpPaths out;
  out.paths.resize(n_paths, xs.size());
  out.omegas = Eigen::VectorXd::Constant(n_paths, eta / (1.0 + eta));
  for (int i = 0; i < n_paths; ++i) out.paths.row(i) = gp_path(f, eta, rng).transpose();
  return out;
}

Eigen::MatrixXd gp_covariance(const GpShrinkagePrior& prior, const Eigen::VectorXd& xs, double tau) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  const GpFactor f = gp_factor(prior, xs);
  const GpFactor::Marginal mg = f.marginal(1.0 / (tau * tau));
  const auto d0 = f.u0.cols();
  const Eigen::MatrixXd we = f.w * mg.e.asDiagonal();
  Eigen::MatrixXd cpp = we * f.w.transpose();
  Eigen::MatrixXd out;
  if (d0 > 0) {
    const Eigen::MatrixXd c00 = mg.schur.solve(Eigen::MatrixXd::Identity(d0, d0));
    const Eigen::MatrixXd cp0 = -we * f.r * c00;
    cpp += we * f.r * c00 * f.r.transpose() * we.transpose();
    out = f.u0 * c00 * f.u0.transpose() + f.up * cpp * f.up.transpose() + f.up * cp0 * f.u0.transpose() +
          f.u0 * cp0.transpose() * f.up.transpose();
  } else {
    out = f.up * cpp * f.up.transpose();
  }
  return 0.5 * (out + out.transpose());
}

Eigen::VectorXd off_null_fraction(const Eigen::MatrixXd& paths, const Eigen::MatrixXd& phi0) {
  const Projector q0(phi0.cols() > 0 ? orthonormalize(phi0) : Eigen::MatrixXd(paths.cols(), 0));
  Eigen::VectorXd out(paths.rows());
  for (Eigen::Index i = 0; i < paths.rows(); ++i) {
    const Eigen::VectorXd f = paths.row(i).transpose();
    const double total = f.norm();
    out[i] = total > 0.0 ? (f - q0.apply(f)).norm() / total : 0.0;
  }
  return out;
}

}  // namespace fhs
