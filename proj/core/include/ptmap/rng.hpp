#pragma once

#include <cstdint>
#include <span>

namespace ptmap {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both to expand a
/// 64-bit seed into generator state and to derive per-episode seeds.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix64(std::uint64_t x);

/// seed_i = mix64(master + (i + 1) * 0x9E3779B97F4A7C15). Each episode of an
/// evaluation can be replayed on its own from (master, i).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded by four SplitMix64
/// outputs. The algorithm is fixed so streams reproduce across platforms and
/// language ports; std::mt19937 + std::*_distribution do not guarantee that.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos();

  /// Unbiased integer in [0, bound) by rejection. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller. Both variates of a pair are used.
  double normal();

  /// Exp(1) via inverse CDF: -log(U), U in (0, 1].
  double exponential();

  /// Fisher-Yates prefix shuffle: afterwards values[0..k) is a uniform
  /// k-subset in uniform order.
  void partial_shuffle(std::span<std::uint32_t> values, std::size_t k);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ptmap
