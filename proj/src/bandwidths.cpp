#include "stkde/bandwidths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stkde/fft.hpp"
#include "stkde/kernels.hpp"
#include "stkde/stats.hpp"

namespace stkde {

namespace {

constexpr double kPilotFloorScale = 1e-12;
constexpr double kEdgeFloor = 1e-6;
constexpr double kTrimFactor = 5.0;

double robust_scale_min(const std::vector<double>& v) {
  return std::min(sample_sd(v), interquartile_range(v) / 1.34);
}

double phi(double x) { return std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi); }

// Gaussian density derivatives via probabilists' Hermite polynomials.
double phi4(double x) {
  double x2 = x * x;
  return (x2 * x2 - 6 * x2 + 3) * phi(x);
}
double phi6(double x) {
  double x2 = x * x;
  return ((x2 - 15) * x2 * x2 + 45 * x2 - 15) * phi(x);
}

// Integrated squared density derivative functional psi_r at bandwidth g,
// estimated on a binned sample: all-pairs double sum collapses to one pass
// over bin lags against precomputed count autocorrelations.
double psi_binned(const std::vector<double>& lag_counts, double bin_width, double n, int r, double g) {
  double s = 0;
  for (std::size_t lag = 0; lag < lag_counts.size(); ++lag) {
    if (lag_counts[lag] == 0) continue;
    double x = static_cast<double>(lag) * bin_width / g;
    double f = r == 4 ? phi4(x) : phi6(x);
    s += (lag == 0 ? 1.0 : 2.0) * lag_counts[lag] * f;
  }
  return s / (n * n * std::pow(g, r + 1));
}

}  // namespace

double oversmooth_bandwidth(const PointPattern& pattern) {
  const auto& pts = pattern.points();
  const std::size_t n = pts.size();
  if (n < 2) throw std::invalid_argument("oversmooth_bandwidth: need at least 2 points");
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pts[i].x;
    ys[i] = pts[i].y;
  }
  double sx = 0.5 * (sample_sd(xs) + interquartile_range(xs) / 1.34);
  double sy = 0.5 * (sample_sd(ys) + interquartile_range(ys) / 1.34);
  double sigma = std::min(sx, sy);
  if (!(sigma > 0)) throw std::invalid_argument("oversmooth_bandwidth: degenerate spread");
  return 1.085 * sigma * std::pow(static_cast<double>(n), -1.0 / 6.0);
}

double temporal_plugin_bandwidth(const std::vector<double>& times) {
  const std::size_t n = times.size();
  if (n < 4) throw std::invalid_argument("temporal_plugin_bandwidth: need at least 4 values");
  const double nd = static_cast<double>(n);

  double sd = sample_sd(times);
  if (!(sd > 0)) throw std::invalid_argument("temporal_plugin_bandwidth: zero variance");
  double iqr = interquartile_range(times);
  double sigma = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;

  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const double sqrt_2pi = std::sqrt(2 * std::numbers::pi);

  // bin the sample once; both functional estimates reuse the lag counts
  const int bins = 1024;
  auto [lo_it, hi_it] = std::minmax_element(times.begin(), times.end());
  double lo = *lo_it, hi = *hi_it;
  double bin_width = (hi - lo) / (bins - 1);
  std::vector<double> counts(bins, 0.0);
  for (double t : times) {
    int b = static_cast<int>((t - lo) / bin_width + 0.5);
    counts[std::clamp(b, 0, bins - 1)] += 1.0;
  }
  std::vector<double> lag_counts(bins, 0.0);
  for (int lag = 0; lag < bins; ++lag) {
    double s = 0;
    for (int b = 0; b + lag < bins; ++b) s += counts[b] * counts[b + lag];
    lag_counts[lag] = s;
  }

  // stage 1: normal-scale psi_8, bandwidth for the psi_6 estimate
  double psi8 = 105.0 / (32.0 * sqrt_pi * std::pow(sigma, 9));
  double g6 = std::pow((30.0 / sqrt_2pi) / (psi8 * nd), 1.0 / 9.0);
  double psi6 = psi_binned(lag_counts, bin_width, nd, 6, g6);
  if (!(psi6 < 0)) psi6 = -15.0 / (16.0 * sqrt_pi * std::pow(sigma, 7));

  // stage 2: bandwidth for the psi_4 estimate
  double g4 = std::pow((-6.0 / sqrt_2pi) / (psi6 * nd), 1.0 / 7.0);
  double psi4 = psi_binned(lag_counts, bin_width, nd, 4, g4);
  if (!(psi4 > 0)) psi4 = 3.0 / (8.0 * sqrt_pi * std::pow(sigma, 5));

  // AMISE-optimal bandwidth, Gaussian kernel: R(K) = 1/(2 sqrt(pi)), mu2 = 1
  return std::pow(1.0 / (2.0 * sqrt_pi * psi4 * nd), 0.2);
}

namespace {

GridArray spatial_mask2(const Grid3& grid) {
  const auto& d = grid.dims();
  GridArray m({d[0], d[1], 1}, 2);
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      if (grid.inside(i, j)) m.at(i, j) = 1.0;
  return m;
}

int clamped_bin(double x, double origin, double step, int count) {
  int i = bin_index(x, origin, step);
  return std::min(i, count - 1);
}

double floor_value(const GridArray& field) { return kPilotFloorScale * field.max_abs(); }

}  // namespace

PilotField pilot_spatial(const PointPattern& pattern, double eps_star, const Grid3& grid) {
  if (!(eps_star > 0)) throw std::invalid_argument("pilot_spatial: bandwidth must be positive");
  const auto& d = grid.dims();
  const auto& o = grid.origin();
  const auto& m = grid.step();
  if (eps_star > d[0] * m[0] || eps_star > d[1] * m[1])
    throw std::invalid_argument("pilot_spatial: bandwidth exceeds half the padded extent");

  GridArray w({d[0], d[1], 1}, 2);
  for (const Point3& p : pattern.points()) {
    w.at(clamped_bin(p.x, o[0], m[0], d[0]), clamped_bin(p.y, o[1], m[1], d[1])) += 1.0;
  }
  WrappedKernelArray k = wrapped_gaussian_2d(d, m, eps_star);
  GridArray num = convolve(pad_to_double(w), k);
  GridArray edge = convolve(pad_to_double(spatial_mask2(grid)), k);

  PilotField out;
  out.field = GridArray({d[0], d[1], 1}, 2);
  const double cell = m[0] * m[1];
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      double e = std::max(edge.at(i, j) * cell, kEdgeFloor);
      out.field.at(i, j) = std::max(num.at(i, j), 0.0) / e;
    }
  }

  const double floor = floor_value(out.field);
  out.at_points.reserve(pattern.size());
  for (const Point3& p : pattern.points()) {
    double u = (p.x - o[0]) / m[0] - 0.5;
    double v = (p.y - o[1]) / m[1] - 0.5;
    int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, d[0] - 2);
    int j0 = std::clamp(static_cast<int>(std::floor(v)), 0, d[1] - 2);
    double fx = std::clamp(u - i0, 0.0, 1.0);
    double fy = std::clamp(v - j0, 0.0, 1.0);
    double val = (1 - fx) * ((1 - fy) * out.field.at(i0, j0) + fy * out.field.at(i0, j0 + 1)) +
                 fx * ((1 - fy) * out.field.at(i0 + 1, j0) + fy * out.field.at(i0 + 1, j0 + 1));
    out.at_points.push_back(std::max(val, floor));
  }
  return out;
}

PilotField pilot_temporal(const PointPattern& pattern, double delta_star, const Grid3& grid) {
  if (!(delta_star > 0)) throw std::invalid_argument("pilot_temporal: bandwidth must be positive");
  const int mt = grid.dims()[2];
  const double o = grid.origin()[2];
  const double step = grid.step()[2];
  if (delta_star > mt * step)
    throw std::invalid_argument("pilot_temporal: bandwidth exceeds half the padded extent");

  GridArray w({mt, 1, 1}, 1);
  for (const Point3& p : pattern.points()) w.at(clamped_bin(p.t, o, step, mt)) += 1.0;
  GridArray ones({mt, 1, 1}, 1);
  for (int k = 0; k < mt; ++k) ones.at(k) = 1.0;

  WrappedKernelArray k1 = wrapped_gaussian_1d(mt, step, delta_star);
  GridArray num = convolve(pad_to_double(w), k1);
  GridArray edge = convolve(pad_to_double(ones), k1);

  PilotField out;
  out.field = GridArray({mt, 1, 1}, 1);
  for (int k = 0; k < mt; ++k) {
    double e = std::max(edge.at(k) * step, kEdgeFloor);
    out.field.at(k) = std::max(num.at(k), 0.0) / e;
  }

  const double floor = floor_value(out.field);
  out.at_points.reserve(pattern.size());
  for (const Point3& p : pattern.points()) {
    double u = (p.t - o) / step - 0.5;
    int k0 = std::clamp(static_cast<int>(std::floor(u)), 0, mt - 2);
    double f = std::clamp(u - k0, 0.0, 1.0);
    double val = (1 - f) * out.field.at(k0) + f * out.field.at(k0 + 1);
    out.at_points.push_back(std::max(val, floor));
  }
  return out;
}

PilotIntensities pilot_intensities(const PointPattern& pattern, const GlobalBandwidths& global,
                                   const Grid3& grid) {
  return {pilot_spatial(pattern, global.eps_star, grid),
          pilot_temporal(pattern, global.delta_star, grid)};
}

namespace {

struct AbramsonAxis {
  std::vector<double> values;
  double gamma = 1;
  double cap = 0;
};

AbramsonAxis abramson_axis(const std::vector<double>& pilots_at_points, double star, std::size_t n,
                           const char* what) {
  AbramsonAxis out;
  const double nd = static_cast<double>(n);
  std::vector<double> s(pilots_at_points.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(pilots_at_points[i] > 0))
      throw std::logic_error(std::string("abramson_bandwidths: nonpositive ") + what + " pilot");
    s[i] = std::sqrt(nd / pilots_at_points[i]);
  }
  out.gamma = geometric_mean(s);
  out.values.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out.values[i] = star * s[i] / out.gamma;
  out.cap = kTrimFactor * geometric_mean(out.values);
  for (double& v : out.values) v = std::min(v, out.cap);
  return out;
}

}  // namespace

AdaptiveBandwidths abramson_bandwidths(const PointPattern& pattern, const GlobalBandwidths& global,
                                       const PilotIntensities& pilots) {
  const std::size_t n = pattern.size();
  if (pilots.spatial.at_points.size() != n || pilots.temporal.at_points.size() != n)
    throw std::invalid_argument("abramson_bandwidths: pilot/point count mismatch");
  if (!(global.eps_star > 0) || !(global.delta_star > 0))
    throw std::invalid_argument("abramson_bandwidths: global bandwidths must be positive");

  AdaptiveBandwidths out;
  out.eps_star = global.eps_star;
  out.delta_star = global.delta_star;
  if (n == 0) {
    out.cap_s = kTrimFactor * global.eps_star;
    out.cap_t = kTrimFactor * global.delta_star;
    return out;
  }
  AbramsonAxis s = abramson_axis(pilots.spatial.at_points, global.eps_star, n, "spatial");
  AbramsonAxis t = abramson_axis(pilots.temporal.at_points, global.delta_star, n, "temporal");
  out.eps = std::move(s.values);
  out.del = std::move(t.values);
  out.gamma_s = s.gamma;
  out.gamma_t = t.gamma;
  out.cap_s = s.cap;
  out.cap_t = t.cap;
  return out;
}

std::vector<double> abramson_field(const GridArray& pilot_field, double gamma, double star,
                                   std::size_t n, double cap) {
  const double nd = static_cast<double>(n);
  const double floor = floor_value(pilot_field);
  if (!(floor > 0)) throw std::invalid_argument("abramson_field: pilot field is identically zero");
  std::vector<double> out(pilot_field.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double lam = std::max(pilot_field[i], floor);
    out[i] = std::min(star * std::sqrt(nd / lam) / gamma, cap);
  }
  return out;
}

}  // namespace stkde
