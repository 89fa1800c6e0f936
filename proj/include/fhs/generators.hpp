#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fhs {

/// Bumped whenever a generator's output for a given seed changes.
inline constexpr int kGeneratorVersion = 1;

enum class ModelKind { kSimple, kVaryingCoefficient, kDensity, kAdditive };

ModelKind parse_model(const std::string& name);
const char* to_string(ModelKind model);

/// Simulated univariate data set. For density models x is empty and y holds
/// the sample; f_true is the true log density at y. Otherwise f_true is the
/// standardized truth at x (w is empty for the simple model).
struct UnivariateData {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
  Eigen::VectorXd y;
  Eigen::VectorXd f_true;
};

/// Truths: simple and varying-coefficient models accept constant, linear,
/// quadratic and sine; the density model accepts normal, lognormal and
/// mixture. Regression truths are scaled so that the signal variance equals
/// `snr` with unit noise variance.
UnivariateData gen_univariate(ModelKind model, const std::string& truth, int n, double snr, std::uint64_t seed);

/// Scale applied to the raw truth to reach the requested signal variance.
double truth_scale(ModelKind model, const std::string& truth, double snr);

/// Raw (unscaled) regression truth.
double raw_truth(const std::string& truth, double x);

/// log density of a named density truth.
double log_density_truth(const std::string& truth, double y);

struct AdditiveData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd f_true;
  std::vector<bool> active;
};

/// Additive settings 1-3. `p` = 0 keeps each setting's own dimension
/// (200, 80, 60); smaller values drop trailing inactive covariates.
AdditiveData gen_additive_setting(int id, int n, std::uint64_t seed, int p = 0);

/// Component functions of the additive settings.
double setting1_component(int j, double x);
double setting23_component(int j, double x);

}  // namespace fhs
