#pragma once

#include <cstdint>
#include <vector>

namespace kmk {

// splitmix64; self-contained so seeded runs are byte-stable across platforms
// (std::uniform_int_distribution is not).
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n)
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % n;
    uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  int range(int lo, int hi) { // inclusive
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool chance(int num, int den) { return below(static_cast<uint64_t>(den)) < static_cast<uint64_t>(num); }

  // weighted pick; weights need not be normalized
  size_t pick_weighted(const std::vector<int>& w) {
    long long total = 0;
    for (int x : w) total += x;
    if (total <= 0) return 0;
    long long r = static_cast<long long>(below(static_cast<uint64_t>(total)));
    for (size_t i = 0; i < w.size(); ++i) {
      r -= w[i];
      if (r < 0) return i;
    }
    return w.size() - 1;
  }

  // derive an independent stream (for per-trial determinism under parallelism)
  Rng fork(uint64_t salt) {
    Rng r(state_ ^ (0x6a09e667f3bcc909ULL + salt * 0x9e3779b97f4a7c15ULL));
    r.next();
    return r;
  }

private:
  uint64_t state_;
};

} // namespace kmk
