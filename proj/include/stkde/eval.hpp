#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "stkde/geometry.hpp"
#include "stkde/intensity.hpp"
#include "stkde/simulate.hpp"

namespace stkde {

// Integrated squared error after rescaling both fields to a unit integral
// over the mask, midpoint Riemann sums throughout. Invariant under positive
// scaling of either argument and symmetric in them. Both estimates must
// share the grid and mask; a field with a non-positive integral is rejected.
double ise_density_scale(const IntensityGrid& fhat, const IntensityGrid& f);

// Fixed irregular heptagon inside the unit square, the observation window of
// the bins experiment; stands in for an irregular survey region.
Polygon benchmark_window();

struct BenchmarkRecord {
  int pattern_id = 0;
  std::size_t n = 0;
  std::array<int, 3> dims{1, 1, 1};
  double xi1 = 1, xi2 = 1;
  double ise = 0;               // partition estimate against the direct one
  double time_partition_s = 0;  // wall clock of the partition call
  double time_direct_s = 0;     // wall clock of the direct call
  std::uint64_t seed = 0;       // per-pattern simulation seed
};

// Simulates n_patterns log-Gaussian Cox patterns on the benchmark window
// over the unit time interval, fits the full adaptive pipeline to each, and
// times the direct estimate against the partition estimate at every
// quantile-step pair. One record per (pattern, pair), in pattern order;
// everything except the timings is reproducible bit for bit from the seed.
// Pipeline failures carry the offending pattern id in the message.
std::vector<BenchmarkRecord> run_bins_experiment(int n_patterns, const GneitingParams& params,
                                                 const std::vector<std::pair<double, double>>& xi_grid,
                                                 const std::array<int, 3>& dims, std::uint64_t seed);

// Median ISE per quantile-step pair must not increase when both steps
// shrink. Checks every comparable pair of settings; vacuously true when no
// two settings are comparable.
bool median_ise_monotone(const std::vector<BenchmarkRecord>& records);

// Header pattern_id,n,m1,m2,m3,xi1,xi2,ise,time_partition_s,time_direct_s,seed
// then one row per record; reals in shortest round-trip form.
void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);

}  // namespace stkde
