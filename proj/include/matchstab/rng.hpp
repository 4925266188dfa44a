#pragma once

#include <cstdint>

namespace matchstab {

/// SplitMix64, used only to expand seeds into generator state.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256++ seeded through SplitMix64. Replication streams are derived
/// from (base_seed, cell, replication) so sweep cells can run in any order,
/// on any number of threads, and still produce identical draws.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static Xoshiro256pp stream(uint64_t base_seed, uint64_t cell, uint64_t rep) {
    SplitMix64 sm(base_seed);
    uint64_t a = sm.next();
    SplitMix64 smc(a ^ (0x6c62272e07bb0142ULL + cell));
    uint64_t b = smc.next();
    SplitMix64 smr(b ^ (0x27d4eb2f165667c5ULL + rep));
    return Xoshiro256pp(smr.next());
  }

  uint64_t next() {
    uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Unbiased uniform draw from [0, n) via rejection.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t threshold = (0 - n) % n;
    uint64_t r;
    do {
      r = next();
    } while (r < threshold);
    return r % n;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
};

}  // namespace matchstab
