#pragma once

// Counter-addressable Gaussian sample stream.  Sample i is a pure function of
// (seed, i), so any partition of [0, N) over workers reproduces the serial
// result exactly and estimators stay order-independent.

#include <cstdint>
#include <cmath>

namespace gaussblab {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

}  // namespace detail

// Independent stream seed for a tagged sub-experiment (per facet, per corpus
// body, per solver start, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (tag + 1));
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Fills out[0..n) with the standard normal coordinates of sample `index`.
  void fill(std::int64_t index, double* out, int n) const {
    std::uint64_t s = detail::mix64(seed_ ^ detail::mix64(static_cast<std::uint64_t>(index) + 1));
    int k = 0;
    while (k < n) {
      const double u1 = next_unit(s);
      const double u2 = next_unit(s);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      const double ang = 2.0 * M_PI * u2;
      out[k++] = rad * std::cos(ang);
      if (k < n) out[k++] = rad * std::sin(ang);
    }
  }

  // Uniform in (0,1), advancing the per-sample generator.
  static double next_unit(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    const std::uint64_t bits = detail::mix64(state);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

// Small deterministic helper for non-Gaussian randomness (corpus generation,
// multi-start initialization).
class Splitmix {
 public:
  explicit Splitmix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }
  double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
  double normal() {
    const double u1 = next_unit(), u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace gaussblab
