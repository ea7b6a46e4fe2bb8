#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace hdsi {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, p);
}

// Two-sided p-value of a standard-normal test statistic.
inline double two_sided_pvalue(double t) {
  return std::erfc(std::abs(t) / std::sqrt(2.0));
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Type-1 (right-continuous) empirical quantile: order statistic at ceil(level*B).
inline double empirical_quantile(std::vector<double> v, double level) {
  if (v.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("empirical_quantile: bad level");
  std::sort(v.begin(), v.end());
  const auto b = static_cast<std::ptrdiff_t>(v.size());
  std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::ceil(level * static_cast<double>(b)));
  k = std::clamp<std::ptrdiff_t>(k, 1, b);
  return v[static_cast<std::size_t>(k - 1)];
}

}  // namespace hdsi
