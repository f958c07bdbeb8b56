#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stkde {

// Empirical quantile with linear interpolation between order statistics
// (the convention R calls type 7): h = p * (n - 1), interpolate between
// x[floor(h)] and x[floor(h) + 1].
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p < 0 || p > 1) throw std::invalid_argument("quantile: p outside [0,1]");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = p * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> sample, double p) {
  std::sort(sample.begin(), sample.end());
  return quantile_sorted(sample, p);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation with the n - 1 denominator.
inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
  double m = mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double interquartile_range(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
}

inline double geometric_mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("geometric_mean: empty sample");
  double s = 0;
  for (double x : v) {
    if (!(x > 0)) throw std::invalid_argument("geometric_mean: nonpositive value");
    s += std::log(x);
  }
  return std::exp(s / static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace stkde
