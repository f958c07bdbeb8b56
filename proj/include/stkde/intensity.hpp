#pragma once

#include <string>

#include "stkde/array.hpp"
#include "stkde/geometry.hpp"

namespace stkde {

struct EstimateInfo {
  std::string method;
  std::size_t n = 0;
  double eps = 0, delta = 0;            // fixed-kernel bandwidths when applicable
  double eps_star = 0, delta_star = 0;  // global bandwidths when applicable
  double xi1 = 0, xi2 = 0;              // quantile steps for the partition path
};

// Estimated intensity on a grid. lambda is zero off-mask; edge holds the
// uniform edge-correction divisor actually used (floored below at 1e-6),
// zero off-mask, so lambda * edge recovers the numerator field.
struct IntensityGrid {
  Grid3 grid;
  GridArray lambda;
  GridArray edge;
  EstimateInfo info;
};

// Riemann integral of the numerator (lambda * edge) over the mask; close to
// n when the kernels' mass stays inside the observation domain.
double numerator_mass(const IntensityGrid& g);

inline constexpr double kEdgeFloor = 1e-6;

// Ratio of numerator to floored edge divisor on-mask, zeros elsewhere.
IntensityGrid assemble_ratio(const Grid3& grid, const GridArray& num, const GridArray& edge,
                             EstimateInfo info);

}  // namespace stkde
