#include "fhs/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "fhs/errors.hpp"

namespace fhs {

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_add_exp(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(-std::abs(x - y)));
}

double sample_truncated_gamma(RandomStream& rng, double shape, double rate, double upper) {
  if (!(shape > 0.0) || !(rate >= 0.0) || !(upper > 0.0)) {
    throw NumericalError("truncated gamma: invalid parameters shape=" + std::to_string(shape) +
                         " rate=" + std::to_string(rate) + " upper=" + std::to_string(upper));
  }
  if (std::isinf(upper)) {
    if (rate == 0.0) throw NumericalError("truncated gamma: improper target (rate 0, no bound)");
    return rng.gamma(shape) / rate;
  }

  const double c = rate * upper;
  if (c == 0.0) {
    return upper * std::exp(std::log(rng.uniform()) / shape);
  }

  if (c <= 0.5 * shape) {
    // Target on y = x / upper in (0,1): y^(shape-1) exp(-c y).
    // Envelope y^(shape-c-1); the ratio y^c exp(-c y) peaks at y = 1.
    const double tilted = shape - c;
    for (;;) {
      const double y = std::exp(std::log(rng.uniform()) / tilted);
      if (std::log(rng.uniform()) <= c * (std::log(y) - y + 1.0)) return upper * y;
    }
  }

  using boost::math::gamma_p;
  using boost::math::gamma_p_inv;
  using boost::math::gamma_q;
  using boost::math::gamma_q_inv;
  const double u = rng.uniform();
  const double p_upper = gamma_p(shape, c);
  const double target = u * p_upper;
  double x;
  if (target <= 0.5) {
    x = gamma_p_inv(shape, target);
  } else {
    // 1 - target computed without cancellation
    const double q = gamma_q(shape, c) + p_upper * (1.0 - u);
    x = gamma_q_inv(shape, q);
  }
  return std::clamp(x / rate, std::numeric_limits<double>::min(), upper);
}

}  // namespace fhs
