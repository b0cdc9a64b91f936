#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sapo {

// Deterministic RNG used everywhere randomness is needed. All draws go through
// explicit integer/real helpers (never std::*_distribution, whose outputs are
// implementation-defined), so artifacts are byte-stable across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t bounded(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[bounded(items.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[bounded(i)]);
    }
  }

  // k distinct values from [0, n), in selection order.
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<size_t> out;
    out.reserve(k);
    for (size_t i = 0; i < k && i < n; ++i) {
      const size_t j = i + bounded(n - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent child streams from a root
// seed plus a stream tag.
inline uint64_t mix_seed(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream));
}

}  // namespace sapo
