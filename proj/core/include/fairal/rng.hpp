#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace fairal {

/// Deterministic random stream. std::mt19937_64 supplies the raw bits; the
/// value mappings (uniform, normal, shuffle) are implemented here because the
/// standard <random> distributions are implementation-defined and would break
/// bit-reproducibility of runs across toolchains.
///
/// Streams are usually created via named(), which derives an independent
/// stream from a base seed and a role tag ("init", "dropout", ...). Equal
/// (seed, tag, index) triples always yield identical streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a named role under a base seed.
  static RngStream named(std::uint64_t base_seed, std::string_view tag,
                         std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_below(std::size_t n);

  /// Standard normal via Marsaglia's polar method (one value per call, the
  /// pair partner is cached).
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace fairal
