#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>

namespace rks {

inline int popcount(std::uint64_t x) noexcept { return std::popcount(x); }
inline bool odd_parity(std::uint64_t x) noexcept { return (std::popcount(x) & 1) != 0; }

// Unnormalized in-place Walsh-Hadamard transform:
//   out[z] = sum_s (-1)^{popcount(s & z)} in[s],  size a power of two.
template <class T>
void walsh_hadamard(std::span<T> v) noexcept {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const T a = v[j];
        const T b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

}  // namespace rks
