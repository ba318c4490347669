#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace splinewalk {

// SplitMix64 step. Used for engine seeding and child-seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child-seed mixing function. Every Monte Carlo trial draws from an engine
// seeded with mix_seed(master_seed, stream_index), so trial t produces the
// same numbers no matter which thread runs it or in what order. Nested
// streams (grid point -> trial) chain mix_seed calls.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (stream * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b >> 1);
}

// xoshiro256++ with a Marsaglia-polar normal on top. Header-only because
// the big walks draw ~1e10 variates and the calls must inline.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1): never returns an exact endpoint, safe for quantile transforms.
  double open01() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  // [-1, 1)
  double uniform_sym() { return 2.0 * uniform01() - 1.0; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform_sym();
      v = uniform_sym();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double cauchy() { return std::tan(std::numbers::pi * (open01() - 0.5)); }

  int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class DistKind { StandardNormal, UniformSym, Rademacher, PointMassZero };

// A scalar sampling law: one of N(0,1), U(-1,1), {-1,+1}, or the point mass
// at zero, times a positive scale.
struct DistributionSpec {
  DistKind kind = DistKind::StandardNormal;
  double scale = 1.0;

  double sample(Rng& rng) const {
    switch (kind) {
      case DistKind::StandardNormal: return scale * rng.normal();
      case DistKind::UniformSym: return scale * rng.uniform_sym();
      case DistKind::Rademacher: return scale * static_cast<double>(rng.rademacher());
      case DistKind::PointMassZero: return 0.0;
    }
    return 0.0;
  }

  std::string name() const {
    std::string base;
    switch (kind) {
      case DistKind::StandardNormal: base = "normal"; break;
      case DistKind::UniformSym: base = "uniform"; break;
      case DistKind::Rademacher: base = "rademacher"; break;
      case DistKind::PointMassZero: return "zero";
    }
    if (scale != 1.0) base += "*" + std::to_string(scale);
    return base;
  }

  static DistributionSpec parse(std::string_view text) {
    if (text == "normal") return {DistKind::StandardNormal, 1.0};
    if (text == "uniform") return {DistKind::UniformSym, 1.0};
    if (text == "rademacher") return {DistKind::Rademacher, 1.0};
    if (text == "zero") return {DistKind::PointMassZero, 1.0};
    throw std::invalid_argument("unknown distribution: " + std::string(text));
  }
};

inline DistributionSpec normal_dist(double scale = 1.0) {
  return {DistKind::StandardNormal, scale};
}
inline DistributionSpec uniform_dist(double scale = 1.0) {
  return {DistKind::UniformSym, scale};
}
inline DistributionSpec rademacher_dist(double scale = 1.0) {
  return {DistKind::Rademacher, scale};
}
inline DistributionSpec zero_dist() { return {DistKind::PointMassZero, 1.0}; }

}  // namespace splinewalk
