#include "fairal/rng.hpp"

#include <cmath>

#include "fairal/errors.hpp"

namespace fairal {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

RngStream RngStream::named(std::uint64_t base_seed, std::string_view tag,
                           std::uint64_t index) {
  std::uint64_t s = splitmix64(base_seed);
  s ^= fnv1a64(tag);
  s = splitmix64(s ^ splitmix64(index + 1));
  return RngStream(s);
}

std::size_t RngStream::uniform_below(std::size_t n) {
  if (n == 0) throw ConfigError("uniform_below: n must be > 0");
  // Rejection sampling over the top of the 64-bit range keeps the draw
  // exactly uniform.
  std::uint64_t bound = n;
  std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * m;
  has_cached_normal_ = true;
  return u * m;
}

}  // namespace fairal
