#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamrep {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Rotation number used by the twisted cohomological equation, alpha = 2*sqrt(2)*pi.
inline constexpr double kAlpha = 2.0 * 1.4142135623730950488016887242096981 * kPi;

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// C-infinity step: 0 for t<=0, 1 for t>=1, all derivatives vanish at both ends.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

inline double smooth_step_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double da = a / (t * t);
  const double db = -b / ((1.0 - t) * (1.0 - t));
  const double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

// Plateau bump: 1 on [-lo,lo], 0 outside (-hi,hi), monotone flanks.
inline double plateau_bump(double t, double lo, double hi) {
  const double a = std::fabs(t);
  if (a <= lo) return 1.0;
  if (a >= hi) return 0.0;
  return smooth_step((hi - a) / (hi - lo));
}

class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// SplitMix64: tiny deterministic generator for seeded sampling.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; uses two uniforms per call, no caching so results are
    // insensitive to call interleaving.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  uint64_t state_;
};

// 2-d Halton points, used for quasi-random audit samples.
inline double halton(uint64_t i, uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline std::string format_double(double x) {
  char buf[32];
  snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace hamrep
