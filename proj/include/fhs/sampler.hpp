#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "fhs/basis.hpp"
#include "fhs/projection.hpp"
#include "fhs/random.hpp"

namespace fhs {

struct InverseGammaPrior {
  double shape = 0.01;
  double rate = 0.01;
};

/// Hyperparameters of the prior and sampler settings.
struct FhsConfig {
  double a = 0.5;
  /// Beta(a, b) shape near omega = 1. Unset means exp(-k_n log(n) / 2).
  std::optional<double> b;
  int k_n = 8;
  int degree = 3;
  KnotPlacement knots = KnotPlacement::kUniform;
  /// Unset means sigma^2 is held at fixed_sigma2.
  std::optional<InverseGammaPrior> sigma2_prior = InverseGammaPrior{};
  double fixed_sigma2 = 1.0;
  /// Count the coefficient prior's sigma^-(k_n - d0) normalizer and its
  /// exponent in the sigma^2 full conditional.
  bool sigma2_prior_includes_beta_term = true;
  /// Pins omega instead of sampling it (diagnostics and conjugate checks).
  std::optional<double> fixed_omega;
  int n_iter = 30000;
  int n_burnin = 10000;
  std::uint64_t seed = 20170601;

  double resolve_b(Eigen::Index n) const;
  void validate() const;
};

/// exp(-k_n log(n) / 2)
double auto_b(int k_n, Eigen::Index n);

/// Current Gibbs state. The shrinkage scale is stored as eta = 1 / tau^2,
/// from which tau and omega = eta / (1 + eta) are derived; h_n is kept in
/// sync with sigma^2.
class ChainState {
 public:
  ChainState(Eigen::VectorXd beta, double eta, double sigma2, double y_q1_y = 0.0);

  const Eigen::VectorXd& beta() const { return beta_; }
  void set_beta(Eigen::VectorXd beta) { beta_ = std::move(beta); }

  double eta() const { return eta_; }
  double tau() const { return 1.0 / std::sqrt(eta_); }
  double omega() const { return 1.0 / (1.0 + 1.0 / eta_); }
  double one_minus_omega() const { return 1.0 / (1.0 + eta_); }
  void set_eta(double eta) { eta_ = eta; }
  void set_tau(double tau) { eta_ = 1.0 / (tau * tau); }
  void set_omega(double omega) { eta_ = omega / (1.0 - omega); }

  double sigma2() const { return sigma2_; }
  void set_sigma2(double sigma2);
  /// Y^T Q1 Y / (2 sigma^2)
  double h_n() const { return h_n_; }

 private:
  Eigen::VectorXd beta_;
  double eta_;
  double sigma2_;
  double y_q1_y_;
  double h_n_;
};

/// Kept draws of one chain, one row per kept iteration.
struct ChainDraws {
  Eigen::MatrixXd betas;
  Eigen::VectorXd omegas;
  /// log(eta); keeps omega's distance from one when omega rounds to 1.0.
  Eigen::VectorXd log_etas;
  Eigen::VectorXd sigma2s;
  std::uint64_t seed = 0;
  double b = 0.0;
  FhsConfig config;

  Eigen::Index n_kept() const { return betas.rows(); }
};

/// One exact draw from the conditional Gaussian of beta given omega and
/// sigma^2, sampled in the orthonormal block coordinates [U0, U1].
Eigen::VectorXd draw_beta(const Eigen::VectorXd& y, const ChainState& state,
                          const ShrinkageDesign& design, RandomStream& rng);

/// Slice step for eta given the quadratic form s:
/// u ~ U(0, (1 + eta)^-(a+b)), t* = u^(-1/(a+b)) - 1,
/// eta* ~ Gamma(shape, rate = s) truncated to (0, t*).
double slice_update_eta(double eta, double s, double shape, double a, double b, RandomStream& rng);

/// Slice update of tau given beta with s = beta^T Phi^T (I - Q0) Phi beta / (2 sigma^2)
/// and shape a + (k_n - d0) / 2. Returns the new tau.
double slice_update_tau(const Eigen::VectorXd& beta, const ChainState& state,
                        const ShrinkageDesign& design, const FhsConfig& cfg, RandomStream& rng);

struct InverseGammaParams {
  double shape;
  double rate;
};

/// Full conditional of sigma^2. `penalty` is beta^T Phi^T (I - Q0) Phi beta,
/// `shrunk_dim` is k_n - d0.
InverseGammaParams sigma2_conditional(double rss, Eigen::Index n, double penalty, double eta,
                                      int shrunk_dim, const FhsConfig& cfg);

double draw_inverse_gamma(RandomStream& rng, InverseGammaParams params);

double update_sigma2(const Eigen::VectorXd& y, const Eigen::VectorXd& beta, const ChainState& state,
                     const ShrinkageDesign& design, const FhsConfig& cfg, RandomStream& rng);

/// Unnormalized log posterior density of omega; -inf outside (0, 1).
double omega_log_density(double omega, double a, double b, int k_n, int d0, double h_n);

/// Two-sided bounds on t = int_0^1 w^(A-1) (1-w)^(B-1) exp(-H w) dw, all
/// held in log space.
struct NormalizerBounds {
  double log_lower;
  double log_upper;
  double log_exact;

  double lower() const { return std::exp(log_lower); }
  double upper() const { return std::exp(log_upper); }
  double exact() const { return std::exp(log_exact); }
};

NormalizerBounds normalizer_bounds(double a_n, double b_n, double h_n);

/// log of the integral t above by adaptive quadrature.
double log_normalizer_quadrature(double a_n, double b_n, double h_n);

/// Gibbs sampler: beta | omega, then the slice update of tau, then sigma^2.
/// Deterministic given cfg.seed. Throws NumericalError naming the iteration
/// on non-finite state.
ChainDraws run_chain(const Eigen::VectorXd& y, const ShrinkageDesign& design, const FhsConfig& cfg);

/// Least-squares coefficients (ΦᵀΦ)⁻¹Φᵀy, used to start chains.
Eigen::VectorXd least_squares_coefficients(const ShrinkageDesign& design, const Eigen::VectorXd& y);

/// CSV: beta_1..beta_k, omega, sigma2 (one row per kept iteration).
void write_draws_csv(std::ostream& out, const ChainDraws& draws);

}  // namespace fhs
