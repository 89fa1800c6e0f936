#include "fhs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fhs/errors.hpp"
#include "fhs/special.hpp"

namespace fhs {

double auto_b(int k_n, Eigen::Index n) {
  return std::exp(-static_cast<double>(k_n) * std::log(static_cast<double>(n)) / 2.0);
}

double FhsConfig::resolve_b(Eigen::Index n) const { return b ? *b : auto_b(k_n, n); }

void FhsConfig::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("a must be positive");
  if (b && (!(*b > 0.0) || !std::isfinite(*b))) throw ConfigError("b must be positive");
  if (k_n < 1) throw ConfigError("k_n must be positive");
  if (degree < 0) throw ConfigError("degree must be non-negative");
  if (n_iter < 1) throw ConfigError("n_iter must be positive");
  if (n_burnin < 0 || n_burnin >= n_iter) throw ConfigError("n_burnin must lie in [0, n_iter)");
  if (sigma2_prior && (!(sigma2_prior->shape > 0.0) || !(sigma2_prior->rate > 0.0))) {
    throw ConfigError("sigma^2 prior shape and rate must be positive");
  }
  if (!sigma2_prior && !(fixed_sigma2 > 0.0)) throw ConfigError("fixed sigma^2 must be positive");
  if (fixed_omega && !(*fixed_omega >= 0.0 && *fixed_omega <= 1.0)) {
    throw ConfigError("fixed omega must lie in [0, 1]");
  }
}

ChainState::ChainState(Eigen::VectorXd beta, double eta, double sigma2, double y_q1_y)
    : beta_(std::move(beta)), eta_(eta), sigma2_(sigma2), y_q1_y_(y_q1_y), h_n_(y_q1_y / (2.0 * sigma2)) {}

void ChainState::set_sigma2(double sigma2) {
  sigma2_ = sigma2;
  h_n_ = y_q1_y_ / (2.0 * sigma2);
}

namespace {

// Sufficient statistics of y in the block coordinates.
struct Projected {
  Eigen::VectorXd c0;  // U0^T y
  Eigen::VectorXd c1;  // U1^T y
  double outside;      // ||(I - Q_phi) y||^2
};

Projected project(const Eigen::VectorXd& y, const ShrinkageDesign& design) {
  if (y.size() != design.n()) {
    throw ConfigError("response has " + std::to_string(y.size()) + " rows, design has " +
                      std::to_string(design.n()));
  }
  if (!y.allFinite()) throw DataError("response contains non-finite values");
  Projected p;
  p.c0 = design.q0.coordinates(y);
  p.c1 = design.q1.coordinates(y);
  p.outside = std::max(0.0, y.squaredNorm() - p.c0.squaredNorm() - p.c1.squaredNorm());
  return p;
}

struct BlockDraw {
  Eigen::VectorXd g0;
  Eigen::VectorXd g1;
};

BlockDraw draw_blocks(const Projected& p, double one_minus_omega, double sigma2, RandomStream& rng) {
  const double sd = std::sqrt(sigma2);
  BlockDraw d;
  d.g0.resize(p.c0.size());
  for (Eigen::Index i = 0; i < p.c0.size(); ++i) d.g0[i] = p.c0[i] + sd * rng.normal();
  d.g1.resize(p.c1.size());
  if (one_minus_omega > 0.0) {
    const double sd1 = sd * std::sqrt(one_minus_omega);
    for (Eigen::Index i = 0; i < p.c1.size(); ++i) d.g1[i] = one_minus_omega * p.c1[i] + sd1 * rng.normal();
  } else {
    d.g1.setZero();
  }
  return d;
}

Eigen::VectorXd to_beta(const BlockDraw& d, const ShrinkageDesign& design) {
  Eigen::VectorXd g(d.g0.size() + d.g1.size());
  g << d.g0, d.g1;
  return design.to_coefficients * g;
}

// ||Q1 phi beta||^2 = ||U1^T phi beta||^2
double penalty_of(const Eigen::VectorXd& beta, const ShrinkageDesign& design) {
  const Eigen::VectorXd fit = design.phi * beta;
  return design.q1.coordinates(fit).squaredNorm();
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log of int_0^{1/2} v^(p-1) exp(log_g(v) - scale) dv for smooth log_g.
template <class LogG>
double log_endpoint_piece(double p, LogG log_g, double scale) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double tol = 1e-13;
  auto g = [&](double v) { return std::exp(log_g(v) - scale); };
  double value = 0.0;
  if (p >= 1.0) {
    value = integrator.integrate([&](double v) { return std::pow(v, p - 1.0) * g(v); }, 0.0, 0.5, tol);
  } else {
    // Subtract the endpoint value so the remaining integrand is bounded.
    const double g0 = g(0.0);
    const double head = g0 * std::exp(-p * std::log(2.0) - std::log(p));
    const double rest =
        integrator.integrate([&](double v) { return std::pow(v, p - 1.0) * (g(v) - g0); }, 0.0, 0.5, tol);
    value = head + rest;
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw NumericalError("normalizer quadrature failed (p=" + std::to_string(p) + ")");
  }
  return scale + std::log(value);
}

}  // namespace

Eigen::VectorXd draw_beta(const Eigen::VectorXd& y, const ChainState& state, const ShrinkageDesign& design,
                          RandomStream& rng) {
  const Projected p = project(y, design);
  return to_beta(draw_blocks(p, state.one_minus_omega(), state.sigma2(), rng), design);
}

double slice_update_eta(double eta, double s, double shape, double a, double b, RandomStream& rng) {
  const double ab = a + b;
  const double log_u = std::log(rng.uniform()) - ab * std::log1p(eta);
  const double t_star = std::expm1(-log_u / ab);
  return sample_truncated_gamma(rng, shape, s, t_star);
}

double slice_update_tau(const Eigen::VectorXd& beta, const ChainState& state, const ShrinkageDesign& design,
                        const FhsConfig& cfg, RandomStream& rng) {
  if (!beta.allFinite()) throw NumericalError("non-finite coefficients in slice update");
  if (!(state.sigma2() > 0.0)) throw NumericalError("sigma^2 must be positive in slice update");
  const double s = penalty_of(beta, design) / (2.0 * state.sigma2());
  const double shape = cfg.a + design.shrunk_dim() / 2.0;
  const double eta = slice_update_eta(state.eta(), s, shape, cfg.a, cfg.resolve_b(design.n()), rng);
  return 1.0 / std::sqrt(eta);
}

InverseGammaParams sigma2_conditional(double rss, Eigen::Index n, double penalty, double eta, int shrunk_dim,
                                      const FhsConfig& cfg) {
  const InverseGammaPrior prior = cfg.sigma2_prior.value_or(InverseGammaPrior{});
  InverseGammaParams out{prior.shape + static_cast<double>(n) / 2.0, prior.rate + rss / 2.0};
  if (cfg.sigma2_prior_includes_beta_term) {
    out.shape += shrunk_dim / 2.0;
    if (penalty > 0.0 && eta > 0.0) out.rate += eta * penalty / 2.0;
  }
  return out;
}

double draw_inverse_gamma(RandomStream& rng, InverseGammaParams params) {
  return params.rate / rng.gamma(params.shape);
}

double update_sigma2(const Eigen::VectorXd& y, const Eigen::VectorXd& beta, const ChainState& state,
                     const ShrinkageDesign& design, const FhsConfig& cfg, RandomStream& rng) {
  if (!cfg.sigma2_prior) throw ConfigError("sigma^2 is fixed; no update");
  const double rss = (y - design.phi * beta).squaredNorm();
  const auto params =
      sigma2_conditional(rss, design.n(), penalty_of(beta, design), state.eta(), design.shrunk_dim(), cfg);
  return draw_inverse_gamma(rng, params);
}

double omega_log_density(double omega, double a, double b, int k_n, int d0, double h_n) {
  if (!(omega > 0.0 && omega < 1.0)) return -std::numeric_limits<double>::infinity();
  const double alpha = a + (k_n - d0) / 2.0;
  return (alpha - 1.0) * std::log(omega) + (b - 1.0) * std::log1p(-omega) - h_n * omega;
}

double log_normalizer_quadrature(double a_n, double b_n, double h_n) {
  // Left half in v = w, right half in v = 1 - w; each piece is
  // int_0^{1/2} v^(p-1) g(v) dv with g smooth on [0, 1/2].
  auto log_left = [&](double v) { return (b_n - 1.0) * std::log1p(-v) - h_n * v; };
  auto log_right = [&](double v) { return (a_n - 1.0) * std::log1p(-v) - h_n * (1.0 - v); };
  double scale_right = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 64; ++i) scale_right = std::max(scale_right, log_right(0.5 * i / 64.0));
  const double left = log_endpoint_piece(a_n, log_left, 0.0);
  const double right = log_endpoint_piece(b_n, log_right, scale_right);
  return log_add_exp(left, right);
}

NormalizerBounds normalizer_bounds(double a_n, double b_n, double h_n) {
  if (!(a_n > 0.0) || !(b_n > 0.0) || !(h_n >= 0.0)) {
    throw ConfigError("normalizer bounds need A > 0, B > 0, H >= 0");
  }
  const double log_be = log_beta_function(a_n, b_n);
  NormalizerBounds out{};
  out.log_lower = log_be - h_n + std::log1p(b_n * h_n / (a_n + b_n));
  out.log_upper = log_be - h_n + softplus(std::log(b_n) + h_n - std::log(a_n + b_n));
  out.log_exact = log_normalizer_quadrature(a_n, b_n, h_n);
  return out;
}

Eigen::VectorXd least_squares_coefficients(const ShrinkageDesign& design, const Eigen::VectorXd& y) {
  const Projected p = project(y, design);
  BlockDraw d{p.c0, p.c1};
  return to_beta(d, design);
}

ChainDraws run_chain(const Eigen::VectorXd& y, const ShrinkageDesign& design, const FhsConfig& cfg) {
  cfg.validate();
  const Projected p = project(y, design);
  const double b = cfg.resolve_b(design.n());
  const double shape = cfg.a + design.shrunk_dim() / 2.0;
  RandomStream rng(cfg.seed);

  double sigma2 = cfg.sigma2_prior ? std::max(p.outside / std::max<Eigen::Index>(1, design.n() - design.k_n()), 1e-8)
                                   : cfg.fixed_sigma2;
  double eta = 1.0;
  if (cfg.fixed_omega) {
    const double w = *cfg.fixed_omega;
    eta = w >= 1.0 ? std::numeric_limits<double>::infinity() : w / (1.0 - w);
  }

  const auto kept = cfg.n_iter - cfg.n_burnin;
  ChainDraws out;
  out.betas.resize(kept, design.k_n());
  out.omegas.resize(kept);
  out.log_etas.resize(kept);
  out.sigma2s.resize(kept);
  out.seed = cfg.seed;
  out.b = b;
  out.config = cfg;

  for (int iter = 0; iter < cfg.n_iter; ++iter) {
    const double one_minus_omega = 1.0 / (1.0 + eta);
    const BlockDraw d = draw_blocks(p, one_minus_omega, sigma2, rng);
    const double penalty = d.g1.squaredNorm();

    if (!cfg.fixed_omega) eta = slice_update_eta(eta, penalty / (2.0 * sigma2), shape, cfg.a, b, rng);

    if (cfg.sigma2_prior) {
      const double rss = p.outside + (p.c0 - d.g0).squaredNorm() + (p.c1 - d.g1).squaredNorm();
      sigma2 = draw_inverse_gamma(rng, sigma2_conditional(rss, design.n(), penalty, eta, design.shrunk_dim(), cfg));
    }

    if (!std::isfinite(penalty) || std::isnan(eta) || !(eta > 0.0) || !std::isfinite(sigma2) || !(sigma2 > 0.0)) {
      throw NumericalError("chain produced a non-finite state at iteration " + std::to_string(iter));
    }

    if (iter >= cfg.n_burnin) {
      const auto row = iter - cfg.n_burnin;
      out.betas.row(row) = to_beta(d, design).transpose();
      out.omegas[row] = 1.0 / (1.0 + 1.0 / eta);
      out.log_etas[row] = std::log(eta);
      out.sigma2s[row] = sigma2;
    }
  }
  return out;
}

void write_draws_csv(std::ostream& out, const ChainDraws& draws) {
  const auto k = draws.betas.cols();
  for (Eigen::Index j = 0; j < k; ++j) out << "beta_" << (j + 1) << ',';
  out << "omega,sigma2\n";
  out.precision(17);
  for (Eigen::Index r = 0; r < draws.n_kept(); ++r) {
    for (Eigen::Index j = 0; j < k; ++j) out << draws.betas(r, j) << ',';
    out << draws.omegas[r] << ',' << draws.sigma2s[r] << '\n';
  }
}

}  // namespace fhs
