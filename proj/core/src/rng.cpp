// SPDX-License-Identifier: Apache-2.0
#include "xrsim/rng.hpp"

#include <array>

namespace xrsim {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

// bisection inverse of the normal CDF; one-time table build
double normal_quantile(double p) {
  double lo = -4.0, hi = 4.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const double* FastGaussian::table() {
  static const std::array<double, kTableSize> t = [] {
    std::array<double, kTableSize> a{};
    constexpr double clamp_z = 3.7;
    for (int i = 0; i < kTableSize; ++i) {
      const double p = static_cast<double>(i) / (kTableSize - 1);
      if (p <= normal_cdf(-clamp_z))
        a[i] = -clamp_z;
      else if (p >= normal_cdf(clamp_z))
        a[i] = clamp_z;
      else
        a[i] = normal_quantile(p);
    }
    return a;
  }();
  return t.data();
}

}  // namespace xrsim
