#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace wltls {

class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// splitmix64 finalizer, used to derive independent RNG streams from
// (seed, stream id, round) triples.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ b); }

inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) {
  return mix64(mix64(mix64(a) ^ b) ^ c);
}

// Unbiased draw from [0, n). Hand rolled so results do not depend on the
// standard library's distribution internals.
inline uint64_t bounded_draw(std::mt19937_64& gen, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = gen();
  } while (r >= limit);
  return r % n;
}

template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_draw(gen, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace detail
}  // namespace wltls
