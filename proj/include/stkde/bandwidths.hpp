#pragma once

#include <vector>

#include "stkde/array.hpp"
#include "stkde/geometry.hpp"

namespace stkde {

struct GlobalBandwidths {
  double eps_star = 0;
  double delta_star = 0;
};

// Maximal-smoothing spatial bandwidth: 1.085 * sigma_hat * n^(-1/6) with
// sigma_hat the minimum over the two spatial axes of (sd + IQR/1.34) / 2.
double oversmooth_bandwidth(const PointPattern& pattern);

// Two-stage direct plug-in selector for the temporal density, Gaussian
// kernel, normal-reference start, functional estimates on a binned sample.
double temporal_plugin_bandwidth(const std::vector<double>& times);

struct PilotField {
  GridArray field;                // marginal intensity on the grid, zero off-mask
  std::vector<double> at_points;  // interpolated at data points, floored positive
};

// Fixed-bandwidth, uniformly edge-corrected marginal intensity of the
// spatial projection on the M1 x M2 grid; values at the data points by
// bilinear interpolation between voxel centroids.
PilotField pilot_spatial(const PointPattern& pattern, double eps_star, const Grid3& grid);

// Temporal analogue on the M3 grid, linear interpolation at points.
PilotField pilot_temporal(const PointPattern& pattern, double delta_star, const Grid3& grid);

struct PilotIntensities {
  PilotField spatial;
  PilotField temporal;
};

PilotIntensities pilot_intensities(const PointPattern& pattern, const GlobalBandwidths& global,
                                   const Grid3& grid);

struct AdaptiveBandwidths {
  std::vector<double> eps;  // per point, trimmed
  std::vector<double> del;
  double gamma_s = 1, gamma_t = 1;
  double eps_star = 0, delta_star = 0;
  double cap_s = 0, cap_t = 0;  // trim caps, 5x the pre-trim geometric mean
};

// Abramson square-root bandwidths with geometric-mean normalisation: the
// pre-trim geometric mean of each vector equals the global bandwidth.
AdaptiveBandwidths abramson_bandwidths(const PointPattern& pattern, const GlobalBandwidths& global,
                                       const PilotIntensities& pilots);

// The same rule applied to a pilot field sampled on grid nodes, reusing the
// normaliser and trim cap derived from the data points.
std::vector<double> abramson_field(const GridArray& pilot_field, double gamma, double star,
                                   std::size_t n, double cap);

}  // namespace stkde
