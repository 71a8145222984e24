#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rks {

// Random streams: xoshiro256** 1.0 seeded through SplitMix64, normals by the
// polar-free Box-Muller transform (both outputs used, cosine branch first).
// Per-sample seeds are hashes of (master seed, index...), so every stream is
// independent of execution order and worker count.
inline constexpr const char* kRngVersion = "xoshiro256ss-splitmix64-boxmuller/1";

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t s = x;
  return splitmix64(s);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) noexcept { return seed; }

template <class... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key, Rest... rest) noexcept {
  return derive_seed(mix64(seed ^ mix64(key + 0x632be59bd9b4e019ULL)), static_cast<std::uint64_t>(rest)...);
}

// FNV-1a, for folding short tags (experiment names) into seeds.
constexpr std::uint64_t hash_tag(const char* s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (*s) {
    h ^= static_cast<unsigned char>(*s++);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_positive() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

class NormalSampler {
 public:
  double operator()(Xoshiro256ss& rng) noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng.uniform_positive();
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rks
