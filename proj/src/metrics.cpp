#include "fhs/metrics.hpp"

#include <cmath>

#include "fhs/errors.hpp"

namespace fhs {

double empirical_mse(const Eigen::VectorXd& fhat, const Eigen::VectorXd& ftrue) {
  if (fhat.size() != ftrue.size()) {
    throw ConfigError("mse inputs differ in length (" + std::to_string(fhat.size()) + " vs " +
                      std::to_string(ftrue.size()) + ")");
  }
  if (fhat.size() == 0) throw DataError("mse of empty vectors");
  return (fhat - ftrue).squaredNorm() / static_cast<double>(fhat.size());
}

double gauge_aligned_mse(const Eigen::VectorXd& fhat, const Eigen::VectorXd& ftrue) {
  if (fhat.size() != ftrue.size()) throw ConfigError("mse inputs differ in length");
  if (fhat.size() == 0) throw DataError("mse of empty vectors");
  const Eigen::VectorXd a = fhat.array() - fhat.mean();
  const Eigen::VectorXd b = ftrue.array() - ftrue.mean();
  return empirical_mse(a, b);
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace fhs
