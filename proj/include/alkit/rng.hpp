#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace alkit {

// Deterministic 64-bit generator (SplitMix64). All randomness in the toolkit
// flows through this type so that runs are reproducible bit-for-bit across
// platforms; standard-library distributions are implementation-defined and
// are deliberately not used.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  uint64_t next_below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int pick_index(size_t n) { return static_cast<int>(next_below(static_cast<uint64_t>(n))); }

 private:
  uint64_t state_;
};

inline uint64_t fnv1a_bytes(const void* data, size_t len, uint64_t h = 0xCBF29CE484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xCBF29CE484222325ull) {
  return fnv1a_bytes(s.data(), s.size(), h);
}

// Builds child seeds from a master seed plus a sequence of tags, so that
// independent random streams never alias each other.
class SeedSeq {
 public:
  explicit SeedSeq(uint64_t master) : h_(0xCBF29CE484222325ull) { mix(master); }

  SeedSeq& mix(uint64_t v) {
    h_ = fnv1a_bytes(&v, sizeof(v), h_);
    return *this;
  }
  SeedSeq& mix(std::string_view s) {
    h_ = fnv1a(s, h_);
    // separator byte so ("ab","c") != ("a","bc")
    unsigned char sep = 0xFF;
    h_ = fnv1a_bytes(&sep, 1, h_);
    return *this;
  }

  uint64_t value() const {
    // final scramble through one splitmix step
    uint64_t z = h_ + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  uint64_t h_;
};

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = rng.next_below(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace alkit
