#pragma once

#include <cmath>
#include <cstdint>

#include "mbal/types.hpp"

namespace mbal {

// Counter-based SplitMix64 generator with splittable streams.  A stream is
// addressed by (seed, stream, substream); the same triple always yields the
// same sequence, independent of any other stream.  Normal variates come from
// the inverse CDF (Acklam's rational approximation polished by one Newton
// step), so a draw consumes exactly one uniform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0,
               std::uint64_t substream = 0) {
    std::uint64_t h = mix(seed + kGolden);
    h = mix(h ^ (stream * 0xd6e8feb86659fd93ULL + 1));
    h = mix(h ^ (substream * 0xa5cb3c5a48657b13ULL + 2));
    state_ = h;
    gamma_ = mix(h + kGolden) | 1ULL;
  }

  std::uint64_t next_u64() {
    state_ += gamma_;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  double next_normal() {
    // (0,1) open interval; 0 cannot occur after the shift below.
    double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return inverse_normal_cdf(u);
  }

  Vector normal_vector(Index k) {
    Vector v(k);
    for (Index i = 0; i < k; ++i) v[i] = next_normal();
    return v;
  }

  static double inverse_normal_cdf(double u);

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t gamma_;
};

inline double Rng::inverse_normal_cdf(double u) {
  // Acklam's approximation, |relative error| < 1.15e-9 on (0,1).
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    double q = u - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Newton step against the exact CDF brings the result to full double
  // precision away from the extreme tails.
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  constexpr double sqrt_2pi = 2.5066282746310005024;
  double cdf = 0.5 * std::erfc(-x * inv_sqrt2);
  double pdf = std::exp(-0.5 * x * x) / sqrt_2pi;
  if (pdf > 0.0) x -= (cdf - u) / pdf;
  return x;
}

}  // namespace mbal
