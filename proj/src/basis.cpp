#include "fhs/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhs/errors.hpp"
#include "fhs/kernels.hpp"

namespace fhs {

BSplineBasis::BSplineBasis(int degree, std::vector<double> breaks)
    : degree_(degree), breaks_(std::move(breaks)) {
  if (degree_ < 0) throw ConfigError("B-spline degree must be non-negative");
  if (breaks_.size() < 2) throw ConfigError("B-spline basis needs at least two breakpoints");
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (!std::isfinite(breaks_[i])) throw ConfigError("B-spline breakpoints must be finite");
    if (i > 0 && !(breaks_[i] > breaks_[i - 1])) {
      throw ConfigError("B-spline breakpoints must be strictly increasing");
    }
  }
  knots_.reserve(breaks_.size() + 2 * degree_);
  knots_.insert(knots_.end(), degree_, breaks_.front());
  knots_.insert(knots_.end(), breaks_.begin(), breaks_.end());
  knots_.insert(knots_.end(), degree_, breaks_.back());
}

int BSplineBasis::span_index(double x) const {
  // Index mu into knots_ with knots_[mu] <= x < knots_[mu + 1]; the right
  // boundary maps onto the last non-degenerate span.
  const int last_span = static_cast<int>(breaks_.size()) - 2;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  int interval = static_cast<int>(it - breaks_.begin()) - 1;
  interval = std::clamp(interval, 0, last_span);
  return interval + degree_;
}

int BSplineBasis::eval_nonzero(double x, std::span<double> values) const {
  if (!contains(x)) {
    std::ostringstream msg;
    msg << "covariate " << x << " outside basis domain [" << lower() << ", " << upper() << "]";
    throw DataError(msg.str());
  }
  const int q = degree_;
  const int mu = span_index(x);
  // de Boor's triangular scheme (BasisFuns), order q + 1.
  double left[32];
  double right[32];
  if (q >= 31) throw ConfigError("B-spline degree too large");
  values[0] = 1.0;
  for (int j = 1; j <= q; ++j) {
    left[j] = x - knots_[mu + 1 - j];
    right[j] = knots_[mu + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  return mu - q;
}

Eigen::VectorXd BSplineBasis::eval(double x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  double local[32];
  const int first = eval_nonzero(x, std::span<double>(local, degree_ + 1));
  for (int r = 0; r <= degree_; ++r) out[first + r] = local[r];
  return out;
}

BSplineBasis make_basis(int n_basis, int degree, double lower, double upper) {
  if (degree < 0) throw ConfigError("degree must be non-negative");
  if (n_basis < degree + 1) {
    throw ConfigError("n_basis must be at least degree + 1 (got n_basis=" +
                      std::to_string(n_basis) + ", degree=" + std::to_string(degree) + ")");
  }
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower)) {
    throw ConfigError("basis domain must be a finite interval of positive length");
  }
  const int spans = n_basis - degree;
  std::vector<double> breaks(spans + 1);
  for (int i = 0; i <= spans; ++i) {
    breaks[i] = lower + (upper - lower) * static_cast<double>(i) / spans;
  }
  breaks.back() = upper;
  return BSplineBasis(degree, std::move(breaks));
}

BSplineBasis make_quantile_basis(int n_basis, int degree, std::span<const double> xs) {
  if (n_basis < degree + 1) throw ConfigError("n_basis must be at least degree + 1");
  if (xs.size() < 2) throw DataError("quantile knots need at least two covariate values");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const int spans = n_basis - degree;
  std::vector<double> breaks(spans + 1);
  const double last = static_cast<double>(sorted.size() - 1);
  for (int i = 0; i <= spans; ++i) {
    const double pos = last * i / spans;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    breaks[i] = sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  }
  breaks.front() = sorted.front();
  breaks.back() = sorted.back();
  for (int i = 1; i <= spans; ++i) {
    if (!(breaks[i] > breaks[i - 1])) {
      throw DataError("quantile knots collapse: too many tied covariate values");
    }
  }
  return BSplineBasis(degree, std::move(breaks));
}

BSplineBasis make_basis(int n_basis, int degree, std::span<const double> xs,
                        KnotPlacement placement) {
  if (xs.empty()) throw DataError("no covariate values");
  if (placement == KnotPlacement::kQuantile) return make_quantile_basis(n_basis, degree, xs);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return make_basis(n_basis, degree, *lo, *hi);
}

Eigen::VectorXd eval_basis(const BSplineBasis& basis, double x) { return basis.eval(x); }

DesignMatrix design_matrix(const BSplineBasis& basis, std::span<const double> xs) {
  DesignMatrix out;
  out.covariates = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  out.values = kernels::design_rows(basis, xs);
  return out;
}

DesignMatrix design_matrix(const BSplineBasis& basis, const Eigen::VectorXd& xs) {
  return design_matrix(basis, std::span<const double>(xs.data(), static_cast<std::size_t>(xs.size())));
}

}  // namespace fhs
