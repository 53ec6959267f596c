#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace evade {

// splitmix64 step, used both as a mixer for seed derivation and to
// bootstrap engine state.
std::uint64_t splitmix64(std::uint64_t& state);

// Hierarchical seed derivation: master -> repetition -> phase -> sample.
// Children are decorrelated so adding a phase never perturbs siblings.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view phase,
                          std::uint64_t index = 0);

// Deterministic RNG wrapper. The standard distributions are
// implementation-defined, so uniform/normal draws are implemented here to
// keep outputs stable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, bound), bound > 0. Unbiased (rejection sampling).
  std::uint64_t uniform_index(std::uint64_t bound);

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01();

  bool bernoulli(double p);

  // Standard normal via the polar method (spare discarded).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // k distinct values from 0..n-1, in random order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

  // Index drawn proportionally to weights (all weights >= 0, sum > 0).
  std::size_t weighted_index(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace evade
