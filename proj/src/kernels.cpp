#include "fhs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "fhs/errors.hpp"

namespace fhs {

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

void check_domain(const BSplineBasis& basis, std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!basis.contains(xs[i])) {
      std::ostringstream msg;
      msg << "covariate at index " << i << " (" << xs[i] << ") outside basis domain ["
          << basis.lower() << ", " << basis.upper() << "]";
      throw DataError(msg.str());
    }
  }
}

double row_into(const Eigen::MatrixXd& values, Eigen::Index i, std::vector<double>& scratch) {
  const Eigen::Index k = values.cols();
  scratch.resize(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    scratch[j] = values(i, j);
    sum += scratch[j];
  }
  return sum / static_cast<double>(k);
}

// Same value as sorted_quantile, from two order statistics found by selection.
double select_quantile(std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + frac * (b - a);
}

PointwiseBands allocate_bands(const Eigen::MatrixXd& values, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
  if (values.cols() == 0) throw DataError("no draws to summarise");
  PointwiseBands out;
  out.mean.resize(values.rows());
  out.lower.resize(values.rows());
  out.upper.resize(values.rows());
  return out;
}

}  // namespace

namespace kernels {

Eigen::MatrixXd design_rows(const BSplineBasis& basis, std::span<const double> xs) {
  check_domain(basis, xs);
  const auto n = static_cast<Eigen::Index>(xs.size());
  const int k = basis.size();
  const int q = basis.degree();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, k);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double local[32];
    const int first = basis.eval_nonzero(xs[i], std::span<double>(local, q + 1));
    for (int r = 0; r <= q; ++r) out(i, first + r) = local[r];
  }
  return out;
}

PointwiseBands pointwise_bands(const Eigen::MatrixXd& values, double level) {
  PointwiseBands out = allocate_bands(values, level);
  const double alpha = 1.0 - level;
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      out.mean[i] = row_into(values, i, scratch);
      out.lower[i] = select_quantile(scratch, alpha / 2.0);
      out.upper[i] = select_quantile(scratch, 1.0 - alpha / 2.0);
    }
  }
  return out;
}

}  // namespace kernels

namespace serial {

Eigen::MatrixXd design_rows(const BSplineBasis& basis, std::span<const double> xs) {
  check_domain(basis, xs);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), basis.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = basis.eval(xs[i]).transpose();
  return out;
}

PointwiseBands pointwise_bands(const Eigen::MatrixXd& values, double level) {
  PointwiseBands out = allocate_bands(values, level);
  const double alpha = 1.0 - level;
  std::vector<double> scratch;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out.mean[i] = row_into(values, i, scratch);
    std::sort(scratch.begin(), scratch.end());
    out.lower[i] = sorted_quantile(scratch, alpha / 2.0);
    out.upper[i] = sorted_quantile(scratch, 1.0 - alpha / 2.0);
  }
  return out;
}

}  // namespace serial
}  // namespace fhs
