#pragma once

#include <cstdint>
#include <random>

namespace fhs {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a stream key (replicate index, component id, ...).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key);

/// Owning random stream for one chain or one replicate. Not shared across
/// threads.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, rate = 1).
  double gamma(double shape);
  /// log of a Gamma(shape, 1) draw; stays finite for tiny shapes where the
  /// draw itself underflows.
  double log_gamma_draw(double shape);

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// A Beta(a, b) draw returned together with its complement and the log
/// odds log((1 - w) / w), all computed without cancellation so that
/// b ~ 1e-10 does not collapse the draw to exactly one.
struct BetaDraw {
  double value;
  double complement;
  double log_odds_complement;
};

BetaDraw draw_beta_variate(RandomStream& rng, double a, double b);

}  // namespace fhs
