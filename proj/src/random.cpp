#include "fhs/random.hpp"

#include <cmath>

namespace fhs {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (key + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

double RandomStream::uniform() {
  // 53 random bits, shifted by half an ulp so neither endpoint is reachable.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double RandomStream::log_gamma_draw(double shape) {
  if (shape >= 1.0) return std::log(gamma(shape));
  // Gamma(s) = Gamma(s + 1) * U^(1/s)
  const double g = gamma(shape + 1.0);
  return std::log(g) + std::log(uniform()) / shape;
}

BetaDraw draw_beta_variate(RandomStream& rng, double a, double b) {
  const double lx = rng.log_gamma_draw(a);
  const double ly = rng.log_gamma_draw(b);
  const double d = ly - lx;  // log((1 - w) / w)
  BetaDraw out{};
  out.log_odds_complement = d;
  if (d > 0) {
    const double e = std::exp(-d);
    out.value = e / (1.0 + e);
    out.complement = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(d);
    out.value = 1.0 / (1.0 + e);
    out.complement = e / (1.0 + e);
  }
  return out;
}

}  // namespace fhs
