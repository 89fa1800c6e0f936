#include "fhs/generators.hpp"

#include <cmath>
#include <numbers>

#include "fhs/errors.hpp"
#include "fhs/random.hpp"

namespace fhs {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_regression_truth(const std::string& truth) {
  return truth == "constant" || truth == "linear" || truth == "quadratic" || truth == "sine";
}

bool is_density_truth(const std::string& truth) {
  return truth == "normal" || truth == "lognormal" || truth == "mixture";
}

// Moments of the raw truth under x ~ U(-pi, pi).
double raw_variance(const std::string& truth) {
  if (truth == "linear") return kPi * kPi / 3.0;
  if (truth == "quadratic") return 4.0 * std::pow(kPi, 4) / 45.0;
  if (truth == "sine") return 0.5;
  throw ConfigError("truth '" + truth + "' has no variance under the simple model");
}

double raw_second_moment(const std::string& truth) {
  if (truth == "constant") return 1.0;
  if (truth == "linear") return kPi * kPi / 3.0;
  if (truth == "quadratic") return std::pow(kPi, 4) / 5.0;
  if (truth == "sine") return 0.5;
  throw ConfigError("unknown truth '" + truth + "'");
}

double log_normal_pdf(double y, double mean, double var) {
  const double d = y - mean;
  return -0.5 * std::log(2.0 * kPi * var) - d * d / (2.0 * var);
}

}  // namespace

ModelKind parse_model(const std::string& name) {
  if (name == "simple") return ModelKind::kSimple;
  if (name == "vc" || name == "varying_coefficient") return ModelKind::kVaryingCoefficient;
  if (name == "density") return ModelKind::kDensity;
  if (name == "additive") return ModelKind::kAdditive;
  throw ConfigError("unknown model '" + name + "'");
}

const char* to_string(ModelKind model) {
  switch (model) {
    case ModelKind::kSimple: return "simple";
    case ModelKind::kVaryingCoefficient: return "vc";
    case ModelKind::kDensity: return "density";
    case ModelKind::kAdditive: return "additive";
  }
  return "?";
}

double raw_truth(const std::string& truth, double x) {
  if (truth == "constant") return 1.0;
  if (truth == "linear") return x;
  if (truth == "quadratic") return x * x;
  if (truth == "sine") return std::sin(x);
  throw ConfigError("unknown regression truth '" + truth + "'");
}

double truth_scale(ModelKind model, const std::string& truth, double snr) {
  if (!(snr > 0.0)) throw ConfigError("snr must be positive");
  if (!is_regression_truth(truth)) throw ConfigError("unknown regression truth '" + truth + "'");
  switch (model) {
    case ModelKind::kSimple: return std::sqrt(snr / raw_variance(truth));
    // Var(w f(x)) = E[w^2] E[f^2] with w ~ U(-pi, pi).
    case ModelKind::kVaryingCoefficient: return std::sqrt(snr / (kPi * kPi / 3.0 * raw_second_moment(truth)));
    default: throw ConfigError("snr scaling applies only to simple and varying-coefficient models");
  }
}

double log_density_truth(const std::string& truth, double y) {
  if (truth == "normal") return log_normal_pdf(y, 0.0, 1.0);
  if (truth == "lognormal") {
    if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_normal_pdf(std::log(y), 0.0, 1.0) - std::log(y);
  }
  if (truth == "mixture") {
    const double a = std::log(0.3) + log_normal_pdf(y, 2.0, 1.0);
    const double b = std::log(0.7) + log_normal_pdf(y, -1.0, 0.5);
    const double hi = std::max(a, b);
    return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
  }
  throw ConfigError("unknown density truth '" + truth + "'");
}

UnivariateData gen_univariate(ModelKind model, const std::string& truth, int n, double snr, std::uint64_t seed) {
  if (n < 1) throw ConfigError("n must be positive");
  RandomStream rng(seed);
  UnivariateData d;
  if (model == ModelKind::kDensity) {
    if (!is_density_truth(truth)) throw ConfigError("unknown density truth '" + truth + "'");
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
      if (truth == "normal") {
        d.y[i] = rng.normal();
      } else if (truth == "lognormal") {
        d.y[i] = std::exp(rng.normal());
      } else {
        d.y[i] = rng.uniform() < 0.3 ? 2.0 + rng.normal() : -1.0 + std::sqrt(0.5) * rng.normal();
      }
    }
    d.f_true = d.y.unaryExpr([&](double v) { return log_density_truth(truth, v); });
    return d;
  }
  if (model == ModelKind::kAdditive) throw ConfigError("use gen_additive_setting for additive data");

  const double scale = truth_scale(model, truth, snr);
  d.x.resize(n);
  d.y.resize(n);
  d.f_true.resize(n);
  if (model == ModelKind::kVaryingCoefficient) d.w.resize(n);
  for (int i = 0; i < n; ++i) {
    d.x[i] = -kPi + 2.0 * kPi * rng.uniform();
    d.f_true[i] = scale * raw_truth(truth, d.x[i]);
    double signal = d.f_true[i];
    if (model == ModelKind::kVaryingCoefficient) {
      d.w[i] = -kPi + 2.0 * kPi * rng.uniform();
      signal *= d.w[i];
    }
    d.y[i] = signal + rng.normal();
  }
  return d;
}

double setting1_component(int j, double x) {
  switch (j) {
    case 0: return -std::sin(2.0 * x);
    case 1: return x * x - 25.0 / 12.0;
    case 2: return x;
    case 3: return std::exp(-x) - 0.4 * std::sinh(2.5);
    default: throw ConfigError("setting 1 has four components");
  }
}

double setting23_component(int j, double x) {
  const double s = std::sin(2.0 * kPi * x);
  const double c = std::cos(2.0 * kPi * x);
  switch (j) {
    case 0: return x;
    case 1: return (2.0 * x - 1.0) * (2.0 * x - 1.0);
    case 2: return s / (2.0 - s);
    case 3: return 0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c * c * c + 0.5 * s * s * s;
    default: throw ConfigError("settings 2 and 3 have four component functions");
  }
}

AdditiveData gen_additive_setting(int id, int n, std::uint64_t seed, int p) {
  if (id < 1 || id > 3) throw ConfigError("additive setting must be 1, 2 or 3");
  if (n < 50) throw ConfigError("additive settings need n >= 50");
  const int full_p = id == 1 ? 200 : id == 2 ? 80 : 60;
  const int n_active = id == 3 ? 12 : 4;
  if (p == 0) p = full_p;
  if (p < n_active || p > full_p) {
    throw ConfigError("setting " + std::to_string(id) + " needs " + std::to_string(n_active) + " <= p <= " +
                      std::to_string(full_p));
  }
  RandomStream rng(seed);
  AdditiveData d;
  d.x.resize(n, p);
  d.y.resize(n);
  d.f_true.resize(n);
  d.active.assign(static_cast<std::size_t>(p), false);
  for (int j = 0; j < n_active; ++j) d.active[j] = true;

  for (int i = 0; i < n; ++i) {
    if (id == 1) {
      for (int j = 0; j < p; ++j) d.x(i, j) = -2.5 + 5.0 * rng.uniform();
    } else {
      const double u = rng.uniform();
      for (int j = 0; j < p; ++j) d.x(i, j) = (rng.uniform() + u) / 2.0;
    }
  }
  const double noise_sd = id == 1 ? 1.0 : id == 2 ? std::sqrt(1.74) : std::sqrt(0.5184);
  static constexpr double kSetting2[4] = {5.0, 3.0, 4.0, 6.0};
  static constexpr double kSetting3[3] = {1.0, 1.5, 2.5};
  for (int i = 0; i < n; ++i) {
    double f = 0.0;
    for (int j = 0; j < n_active; ++j) {
      const double x = d.x(i, j);
      if (id == 1) {
        f += setting1_component(j, x);
      } else if (id == 2) {
        f += kSetting2[j] * setting23_component(j, x);
      } else {
        f += kSetting3[j / 4] * setting23_component(j % 4, x);
      }
    }
    d.f_true[i] = f;
    d.y[i] = f + noise_sd * rng.normal();
  }
  return d;
}

}  // namespace fhs
