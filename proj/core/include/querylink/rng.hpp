#pragma once

// Deterministic random stream. std::mt19937_64 has a fully specified output
// sequence, and the bounded draws below use masked rejection rather than
// std::uniform_int_distribution, whose mapping the standard leaves open, so
// a (seed, draw sequence) pair replays identically on any platform.

#include <cstdint>
#include <random>

namespace querylink {

class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Unbiased draw from [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      uint64_t v = gen_() & mask;
      if (v < n) return v;
    }
  }

  // Inclusive range draw.
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // True with probability pct/100.
  bool chance_pct(int pct) { return below(100) < static_cast<uint64_t>(pct); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace querylink
