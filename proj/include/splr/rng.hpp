#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace splr {

// splitmix64 finalizer (Steele et al.). Spreads structured keys into
// well-separated engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive key combiner: mix_key(a, b, c) != mix_key(a, c, b).
inline std::uint64_t mix_key(std::uint64_t a) { return mix64(a); }

template <typename... Rest>
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix_key(mix64(a) ^ mix64(b + 0x632be59bd9b4e019ULL), rest...);
}

// One seeded random stream backed by mt19937_64 (the raw engine output is
// fixed by the standard, so streams replay across platforms). Distributions
// are implemented here rather than taken from <random>, whose real-valued
// distributions are implementation-defined.
//
// Stream-splitting rule: everything that consumes randomness derives its
// stream as RngStream(seed, stream_id), one id per independent draw, so
// adding a new draw never perturbs existing ones.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(mix_key(seed, stream_id)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exact uniform integer on [0, n), by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal, Marsaglia polar method (sqrt/log only, no trig).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // k distinct values from [0, n), ascending (Floyd's sampling).
  std::vector<std::uint64_t> distinct(std::uint64_t n, std::uint64_t k) {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(k);
    for (std::uint64_t j = n - k; j < n; ++j) {
      const std::uint64_t t = below(j + 1);
      chosen.insert(chosen.count(t) ? j : t);
    }
    std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace splr
