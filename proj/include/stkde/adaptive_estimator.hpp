#pragma once

#include <vector>

#include "stkde/bandwidths.hpp"
#include "stkde/geometry.hpp"
#include "stkde/intensity.hpp"

namespace stkde {

// Quantile discretisation of the per-point bandwidths into C1 x C2 bins.
// Edges are type-7 empirical quantiles at probabilities 0, xi, 2xi, ..., 1;
// a point joins the first bin whose upper edge is >= its bandwidth.
struct PartitionScheme {
  double xi1 = 1, xi2 = 1;
  std::vector<double> eps_edges, del_edges;  // C + 1 nondecreasing values each
  std::vector<int> bin_s, bin_t;             // per-point bin index in [0, C)
  std::vector<double> eps_mid, del_mid;      // per-bin edge-pair midpoints
  int c1() const { return static_cast<int>(eps_mid.size()); }
  int c2() const { return static_cast<int>(del_mid.size()); }
};

// Requires 1/xi1 and 1/xi2 integral (up to 1e-9) and at least one point.
PartitionScheme build_partition(const AdaptiveBandwidths& bw, double xi1, double xi2);

// Sum of fixed-bandwidth FFT estimates over the sub-patterns of the scheme,
// each addend using its bin's midpoint bandwidths and carrying its own edge
// correction. The returned edge field is the effective divisor: lambda *
// edge recovers the summed numerator.
IntensityGrid estimate_adaptive_partition(const PointPattern& pattern, const AdaptiveBandwidths& bw,
                                          const PartitionScheme& scheme, const Grid3& grid,
                                          int threads = 0);

// Reference adaptive estimator: per-point kernels summed directly at every
// on-mask voxel, divided by a Riemann-sum edge correction whose bandwidth
// fields come from the pilot fields through the same square-root rule used
// for the points (same normaliser, same trim). Quadratic in grid size.
IntensityGrid estimate_adaptive_direct(const PointPattern& pattern, const AdaptiveBandwidths& bw,
                                       const PilotIntensities& pilots, const Grid3& grid,
                                       int threads = 0);

}  // namespace stkde
