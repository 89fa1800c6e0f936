#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "fhs/basis.hpp"
#include "fhs/errors.hpp"
#include "fhs/projection.hpp"
#include "fhs/sampler.hpp"
#include "fhs/special.hpp"
#include "fhs/summary.hpp"
#include "oracles.hpp"

using namespace fhs;

namespace {

struct Setup {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd f;
  BSplineBasis basis;
  ShrinkageDesign design;
};

Setup linear_setup(int n, std::uint64_t seed, double slope = 0.5, double wiggle = 0.0) {
  RandomStream rng(seed);
  Eigen::VectorXd x(n), y(n), f(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -M_PI + 2 * M_PI * rng.uniform();
    f[i] = slope * x[i] + wiggle * std::sin(2 * x[i]);
    y[i] = f[i] + rng.normal();
  }
  auto basis = make_basis(8, 3, x.minCoeff(), x.maxCoeff());
  auto design = orthogonal_complement(design_matrix(basis, x), polynomial_null_design(x, 1));
  return {x, y, f, std::move(basis), std::move(design)};
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double d : v) s += d;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double d : v) s += (d - m) * (d - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("config defaults and validation") {
  FhsConfig cfg;
  CHECK(cfg.a == 0.5);
  CHECK(cfg.k_n == 8);
  CHECK(cfg.n_iter == 30000);
  CHECK(cfg.n_burnin == 10000);
  CHECK(cfg.resolve_b(200) == doctest::Approx(std::exp(-8 * std::log(200.0) / 2)));
  CHECK(auto_b(8, 200) == doctest::Approx(std::pow(200.0, -4)));
  cfg.n_burnin = cfg.n_iter;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.b = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("chain state parametrizations agree") {
  ChainState s(Eigen::VectorXd::Zero(3), 1.0, 2.0, 8.0);
  CHECK(s.h_n() == doctest::Approx(2.0));
  s.set_sigma2(4.0);
  CHECK(s.h_n() == doctest::Approx(1.0));
  s.set_tau(0.5);
  CHECK(s.eta() == doctest::Approx(4.0));
  CHECK(s.omega() == doctest::Approx(0.8));
  CHECK(s.one_minus_omega() == doctest::Approx(0.2));
  s.set_omega(0.25);
  CHECK(std::abs(s.tau() - std::sqrt((1 - 0.25) / 0.25)) < 1e-12);
  CHECK(std::abs(s.omega() + s.one_minus_omega() - 1.0) < 1e-15);
}

TEST_CASE("draw_beta: small omega recovers the spline fit") {
  const auto s = linear_setup(100, 21);
  RandomStream rng(1);
  ChainState state(Eigen::VectorXd::Zero(8), 1e-8, 1.0);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(100);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) acc += s.design.phi * draw_beta(s.y, state, s.design, rng);
  acc /= draws;
  const Eigen::VectorXd fit = s.design.q_phi.apply(s.y);
  // per-point sd of the mean is at most sqrt(max leverage / draws)
  const double se = std::sqrt(1.0 / draws);
  CHECK((acc - fit).cwiseAbs().maxCoeff() < 4 * se);
}

TEST_CASE("draw_beta: covariance matches the dense solve") {
  const auto s = linear_setup(80, 22);
  const double omega = 0.4;
  const double sigma2 = 1.7;
  RandomStream rng(2);
  ChainState state(Eigen::VectorXd::Zero(8), omega / (1 - omega), sigma2);
  const int draws = 50000;
  Eigen::MatrixXd samples(draws, 8);
  for (int i = 0; i < draws; ++i) samples.row(i) = draw_beta(s.y, state, s.design, rng).transpose();
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centred = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / (draws - 1);
  const Eigen::MatrixXd want = oracle::penalized_covariance(s.design.phi, s.design.phi0, omega, sigma2);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const double scale = std::sqrt(want(i, i) * want(j, j));
      CHECK(std::abs(cov(i, j) - want(i, j)) < 0.05 * scale);
    }
  }
  const Eigen::VectorXd mean_fit = s.design.phi * mean.transpose();
  const Eigen::VectorXd want_fit = oracle::penalized_fit(s.design.phi, s.design.phi0, s.y, omega);
  CHECK((mean_fit - want_fit).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("draw_beta: omega at one keeps only the null block") {
  const auto s = linear_setup(60, 23);
  RandomStream rng(3);
  ChainState state(Eigen::VectorXd::Zero(8), INFINITY, 1.0);
  const Eigen::VectorXd beta = draw_beta(s.y, state, s.design, rng);
  const Eigen::VectorXd fit = s.design.phi * beta;
  CHECK(s.design.q1.coordinates(fit).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conditional chi-square laws") {
  const auto s = linear_setup(100, 24, 0.5, 0.6);
  const double omega = 0.6;
  const double sigma2 = 1.3;
  RandomStream rng(4);
  ChainState state(Eigen::VectorXd::Zero(8), omega / (1 - omega), sigma2);
  const Eigen::VectorXd q0y = s.design.q0.apply(s.y);
  const Eigen::VectorXd q1y = s.design.q1.apply(s.y);
  std::vector<double> c0, c1;
  for (int i = 0; i < 20000; ++i) {
    const Eigen::VectorXd fit = s.design.phi * draw_beta(s.y, state, s.design, rng);
    c0.push_back((s.design.q0.apply(fit) - q0y).squaredNorm() / sigma2);
    c1.push_back((s.design.q1.apply(fit) - (1 - omega) * q1y).squaredNorm() / ((1 - omega) * sigma2));
  }
  CHECK(mean_of(c0) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(var_of(c0) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(mean_of(c1) == doctest::Approx(6.0).epsilon(0.05));
  CHECK(var_of(c1) == doctest::Approx(12.0).epsilon(0.1));
}

TEST_CASE("truncated gamma draws follow the truncated law") {
  RandomStream rng(5);
  struct Case {
    double shape, rate, upper;
  };
  for (const Case c : {Case{2.5, 1.0, 3.0}, Case{0.5, 4.0, 0.2}, Case{3.5, 1e-6, 1e-3}, Case{4.0, 50.0, 1e5},
                       Case{1.0, 0.0, 2.0}, Case{0.7, 2.0, INFINITY}}) {
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) {
      const double x = sample_truncated_gamma(rng, c.shape, c.rate, c.upper);
      REQUIRE(x > 0.0);
      REQUIRE(x <= c.upper);
      xs.push_back(x);
    }
    std::function<double(double)> cdf;
    if (c.rate == 0.0) {
      cdf = [&](double x) { return std::pow(x / c.upper, c.shape); };
    } else {
      const double total = std::isinf(c.upper) ? 1.0 : boost::math::gamma_p(c.shape, c.rate * c.upper);
      cdf = [&, total](double x) { return boost::math::gamma_p(c.shape, c.rate * x) / total; };
    }
    // 1.95 / sqrt(20000) is the 0.1% Kolmogorov critical value
    CHECK(oracle::ks_distance(xs, cdf) < 0.0138);
  }
}

TEST_CASE("slice step: limits and stationary law") {
  RandomStream rng(6);
  double eta = 1.0;
  for (int i = 0; i < 200; ++i) eta = slice_update_eta(eta, 1e6, 3.5, 0.5, 0.5, rng);
  CHECK(eta < 1e-3);

  const double a = 0.5, b = 0.5, shape = 1.5, s = 1.0;
  const oracle::SliceTargetCdf cdf(a, b, shape, s);
  std::vector<double> etas;
  eta = 1.0;
  for (int i = 0; i < 1000; ++i) eta = slice_update_eta(eta, s, shape, a, b, rng);
  for (int i = 0; i < 100000; ++i) {
    eta = slice_update_eta(eta, s, shape, a, b, rng);
    etas.push_back(eta);
  }
  CHECK(oracle::ks_distance(etas, [&](double e) { return cdf(e); }) < 0.01);
}

TEST_CASE("sigma^2 conditional parameters") {
  FhsConfig cfg;
  auto p = sigma2_conditional(10.0, 50, 4.0, 2.0, 6, cfg);
  CHECK(p.shape == doctest::Approx(0.01 + 25 + 3));
  CHECK(p.rate == doctest::Approx(0.01 + 5 + 4));
  cfg.sigma2_prior_includes_beta_term = false;
  p = sigma2_conditional(10.0, 50, 4.0, 2.0, 6, cfg);
  CHECK(p.shape == doctest::Approx(25.01));
  CHECK(p.rate == doctest::Approx(5.01));

  RandomStream rng(7);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(draw_inverse_gamma(rng, {0.5, 0.3}));
  CHECK(oracle::ks_distance(xs, [](double x) { return boost::math::gamma_q(0.5, 0.3 / x); }) < 0.0138);
}

TEST_CASE("omega log density") {
  CHECK(omega_log_density(0.3, 1, 1, 0, 0, 0) == 0.0);
  CHECK(omega_log_density(0.8, 1, 1, 0, 0, 0) == 0.0);
  CHECK(std::isinf(omega_log_density(1.0, 0.5, 0.5, 8, 2, 1)));
  const double hand = (3.5 - 1) * std::log(2.0) + (0.5 - 1) * std::log(0.5 / 0.75) - 3 * 0.25;
  CHECK(omega_log_density(0.5, .5, .5, 8, 2, 3) - omega_log_density(0.25, .5, .5, 8, 2, 3) ==
        doctest::Approx(hand));
}

TEST_CASE("normalizer: quadrature against the series and the bounds") {
  const auto at0 = normalizer_bounds(3.0, 0.5, 0.0);
  const double lbe = std::lgamma(3.0) + std::lgamma(0.5) - std::lgamma(3.5);
  CHECK(at0.log_exact == doctest::Approx(lbe).epsilon(1e-10));
  CHECK(at0.log_lower == doctest::Approx(lbe).epsilon(1e-12));
  CHECK(at0.log_upper == doctest::Approx(lbe + std::log1p(0.5 / 3.5)).epsilon(1e-12));

  for (double a : {0.7, 5.0, 50.0, 500.0}) {
    for (double b : {1e-6, 1e-2, 0.5, 2.0}) {
      for (double h : {0.0, 1.0, 10.0, 100.0}) {
        const auto nb = normalizer_bounds(a, b, h);
        const double series = oracle::log_normalizer_series(a, b, h);
        CHECK(std::abs(nb.log_exact - series) < 1e-8 * std::max(1.0, std::abs(series)));
        CHECK(nb.log_lower <= nb.log_exact + 1e-12);
        CHECK(nb.log_exact <= nb.log_upper + 1e-12);
      }
    }
  }
  const auto ex = normalizer_bounds(50, 0.1, 10);
  CHECK(ex.lower() <= ex.exact());
  CHECK(ex.exact() <= ex.upper());
  CHECK(std::isfinite(normalizer_bounds(5, 0.5, 2000).log_exact));
}

TEST_CASE("run_chain: determinism and failures") {
  const auto s = linear_setup(100, 25);
  FhsConfig cfg;
  cfg.n_iter = 600;
  cfg.n_burnin = 100;
  cfg.seed = 99;
  const auto d1 = run_chain(s.y, s.design, cfg);
  const auto d2 = run_chain(s.y, s.design, cfg);
  CHECK(d1.n_kept() == 500);
  CHECK(d1.betas == d2.betas);
  CHECK(d1.omegas == d2.omegas);
  CHECK(d1.sigma2s == d2.sigma2s);
  for (Eigen::Index i = 0; i < d1.n_kept(); ++i) {
    CHECK(d1.omegas[i] > 0.0);
    CHECK(d1.omegas[i] <= 1.0);
  }
  cfg.seed = 100;
  CHECK(run_chain(s.y, s.design, cfg).betas != d1.betas);

  Eigen::VectorXd bad = s.y;
  bad[3] = NAN;
  CHECK_THROWS_AS(run_chain(bad, s.design, cfg), DataError);

  std::ostringstream out;
  write_draws_csv(out, d1);
  const std::string text = out.str();
  CHECK(text.rfind("beta_1,beta_2,beta_3,beta_4,beta_5,beta_6,beta_7,beta_8,omega,sigma2\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 501);
}

TEST_CASE("Gibbs marginal of omega with fixed sigma^2") {
  const auto s = linear_setup(150, 26, 0.5, 0.25);
  FhsConfig cfg;
  cfg.sigma2_prior.reset();
  cfg.fixed_sigma2 = 1.0;
  cfg.b = 0.5;
  cfg.seed = 5;
  const auto draws = run_chain(s.y, s.design, cfg);
  const double h = s.design.q1.coordinates(s.y).squaredNorm() / 2.0;
  const double alpha = cfg.a + 3.0;
  const double b = 0.5;
  // 1 - omega = u^(1/b) flattens the (1 - omega)^(b - 1) singularity
  const int cells = 1000000;
  std::vector<double> cdf_u(cells + 1, 0.0);
  std::vector<double> logs(cells);
  double top = -INFINITY;
  for (int i = 0; i < cells; ++i) {
    const double u = (i + 0.5) / cells;
    const double w = 1.0 - std::pow(u, 1.0 / b);
    logs[i] = (alpha - 1) * std::log(w) - h * w;
    top = std::max(top, logs[i]);
  }
  for (int i = 0; i < cells; ++i) cdf_u[i + 1] = cdf_u[i] + std::exp(logs[i] - top);
  for (double& c : cdf_u) c /= cdf_u.back();
  auto cdf = [&](double w) {
    const double pos = std::pow(1.0 - w, b) * cells;
    const auto i = std::min(static_cast<int>(pos), cells - 1);
    return 1.0 - (cdf_u[i] + (pos - i) * (cdf_u[i + 1] - cdf_u[i]));
  };
  std::vector<double> ws(draws.omegas.data(), draws.omegas.data() + draws.omegas.size());
  CHECK(oracle::ks_distance(ws, cdf) < 0.015);
}

TEST_CASE("sigma^2 posterior at fixed omega") {
  const auto s = linear_setup(200, 27, 0.5, 0.4);
  FhsConfig cfg;
  const double omega = 0.3;
  cfg.fixed_omega = omega;
  cfg.seed = 3;
  const auto draws = run_chain(s.y, s.design, cfg);
  // integrating the coefficients out leaves
  // IG(0.01 + (n - d0) / 2, 0.01 + (|(I - Q_phi) y|^2 + omega |U1^T y|^2) / 2)
  const double outside = (s.y - s.design.q_phi.apply(s.y)).squaredNorm();
  const double shape = 0.01 + (200 - 2) / 2.0;
  const double rate = 0.01 + (outside + omega * s.design.q1.coordinates(s.y).squaredNorm()) / 2.0;
  const double want = rate / (shape - 1);
  const int batches = 50;
  const Eigen::Index len = draws.n_kept() / batches;
  std::vector<double> means;
  for (int i = 0; i < batches; ++i) means.push_back(draws.sigma2s.segment(i * len, len).mean());
  const double se = std::sqrt(var_of(means) / batches);
  CHECK(std::abs(draws.sigma2s.mean() - want) < 3 * se);
}

TEST_CASE("posterior summary") {
  ChainDraws d;
  d.betas = Eigen::MatrixXd::Ones(50, 8) * 2.0;
  d.omegas = Eigen::VectorXd::Constant(50, 0.5);
  d.sigma2s = Eigen::VectorXd::Ones(50);
  const auto b = make_basis(8, 3, 0.0, 1.0);
  const auto s = posterior_summary(d, b, 0.95, linspace(0, 1, 11));
  CHECK((s.mean.array() - 2.0).abs().maxCoeff() < 1e-12);
  CHECK((s.upper - s.lower).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.omega_mean == 0.5);
  CHECK_THROWS(posterior_summary(ChainDraws{}, b, 0.95, linspace(0, 1, 11)));
}

TEST_CASE("band coverage and sigma^2 consistency on linear truth") {
  FhsConfig cfg;
  cfg.n_iter = 4000;
  cfg.n_burnin = 1000;
  double covered = 0.0;
  const int sets = 50;
  for (int r = 0; r < sets; ++r) {
    const auto s = linear_setup(200, 1000 + r);
    cfg.seed = 500 + r;
    const auto draws = run_chain(s.y, s.design, cfg);
    const Eigen::VectorXd grid = linspace(s.basis.lower(), s.basis.upper(), 50);
    const auto sum = posterior_summary(draws, s.basis, 0.95, grid);
    const Eigen::VectorXd truth = 0.5 * grid;
    covered += ((sum.lower.array() <= truth.array()) && (truth.array() <= sum.upper.array())).cast<double>().mean();
  }
  CHECK(covered / sets >= 0.85);

  cfg.n_iter = 3000;
  for (int r = 0; r < 20; ++r) {
    const auto s = linear_setup(500, 2000 + r);
    cfg.seed = 700 + r;
    const double m = run_chain(s.y, s.design, cfg).sigma2s.mean();
    CHECK(m > 0.85);
    CHECK(m < 1.15);
  }
}
