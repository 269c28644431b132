#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace twinsim {

// Deterministic random stream addressed by (seed, stream_index).
//
// Contract: identical (seed, stream_index) pairs produce identical draw
// sequences on every platform, and distinct stream indices give statistically
// independent streams. The engine is mt19937_64, whose output sequence is
// fully specified by the standard; all variate transforms are implemented
// here instead of std::*_distribution, whose algorithms are
// implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed),
        stream_index_(stream_index),
        engine_(mix(mix(seed) ^ stream_index)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  // Child stream fully determined by (seed, stream_index, tag). Used to fan
  // out one logical seed into per-replication and per-purpose streams.
  RngStream substream(std::uint64_t tag) const {
    return RngStream(mix(seed_) ^ mix(~stream_index_), tag);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double exponential(double rate) {
    if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log1p(-uniform01()) / rate;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Index drawn proportionally to nonnegative weights (need not be normalized).
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("categorical: weights sum to zero");
    const double u = uniform01() * total;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      cum += weights[i];
      last_positive = i;
      if (u < cum) return i;
    }
    return last_positive;  // numerical tail
  }

 private:
  // splitmix64 finalizer; full 64-bit avalanche.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

}  // namespace twinsim
