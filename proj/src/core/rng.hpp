#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace relsim {

// splitmix64 finalizer. Used to derive independent seeds for per-purpose,
// per-node and per-trial streams so results do not depend on draw order
// across streams.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t salt = 0) {
  return splitmix64(splitmix64(base + 0x632be59bd9b4e019ULL * stream) ^
                    splitmix64(salt ^ 0x9e3779b97f4a7c15ULL));
}

// mt19937_64 with hand-rolled distributions. std:: distributions are
// implementation-defined, which would break byte-identical traces across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [0, n). n == 0 is a caller bug; returns 0.
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) return 0;
    // Rejection sampling to avoid modulo bias.
    uint64_t limit = std::numeric_limits<uint64_t>::max() -
                     std::numeric_limits<uint64_t>::max() % n;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  // Exponential with the given rate; rate <= 0 yields +inf (never fires).
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform01()) / rate;
  }

  // Standard normal via Box-Muller, no second-value cache so the stream
  // position stays predictable. A zero first draw (p = 2^-53) retries.
  double normal() {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  double lognormal(double mu_log, double sigma_log) {
    return std::exp(mu_log + sigma_log * normal());
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace relsim
