#pragma once
#include <array>
#include <cstdint>

namespace hran {

// Seedable PRNG with a fully pinned algorithm (splitmix64-seeded
// xoshiro256**). std::mt19937_64 would also be portable, but the standard
// distributions are not, so draws here are implemented by hand: identical
// seed means identical stream on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform integer in [0, bound). Debiased via rejection on the top range.
  uint32_t uniform_u32(uint32_t bound) {
    if (bound <= 1) return 0;
    const uint64_t span = UINT64_C(1) << 32;
    const uint64_t limit = span - span % bound;
    for (;;) {
      uint64_t v = next_u64() >> 32;
      if (v < limit) return static_cast<uint32_t>(v % bound);
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real01(); }

  // Independent stream derived from (seed, stream_id); used for
  // per-iteration draws so training can resume mid-run bit-exactly.
  static Rng derive(uint64_t seed, uint64_t stream_id) {
    uint64_t x = seed;
    uint64_t a = splitmix64(x);
    uint64_t y = stream_id + UINT64_C(0x9e3779b97f4a7c15);
    uint64_t b = splitmix64(y);
    return Rng(a ^ rotl(b, 31));
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix64(uint64_t& x) {
    x += UINT64_C(0x9e3779b97f4a7c15);
    uint64_t z = x;
    z = (z ^ (z >> 30)) * UINT64_C(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94d049bb133111eb);
    return z ^ (z >> 31);
  }

  uint64_t seed_;
  std::array<uint64_t, 4> state_;
};

}  // namespace hran
