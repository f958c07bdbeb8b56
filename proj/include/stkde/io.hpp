#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "stkde/geometry.hpp"
#include "stkde/intensity.hpp"

namespace stkde {

// CSV with header x,y,t. Points outside the window or the interval are
// dropped and counted; under strict the first offender is an error instead.
// Malformed rows report the file line; an empty file is an empty pattern.
struct PatternReadResult {
  PointPattern pattern;
  std::size_t dropped = 0;
};
PatternReadResult read_pattern(const std::string& path, const Polygon& window,
                               const TimeInterval& interval, bool strict = false);

// CSV with header x,y,t, shortest round-trip reals.
void write_pattern(const std::string& path, const PointPattern& pattern);

// CSV of ordered vertices with header x,y.
Polygon read_polygon(const std::string& path);

// CSV with header lon,lat, degrees.
std::vector<Point2> read_lonlat(const std::string& path);

// Spherical Albers equal-area conic, forward, angles in degrees. Latitudes
// must lie in (-90, 90) and the standard parallels must not be opposite.
// Planar coordinates come out in the units of radius.
struct AlbersSpec {
  double phi1 = 0, phi2 = 0;     // standard parallels
  double phi0 = 0, lambda0 = 0;  // projection origin
  double radius = 6371.0;
};
std::vector<Point2> project_albers(const std::vector<Point2>& lonlat, const AlbersSpec& spec);

// Quantile-group counts from the sample size: round(n^(1/3)) spatial groups
// and round(n^(1/6)) temporal ones, clamped to [1, n].
std::pair<int, int> default_bin_counts(std::size_t n);

// FNV-1a of the spatial mask indicators in row-major order, fixed-width hex.
std::string mask_hash(const Grid3& grid);

// One JSON header line (dims, voxel steps, origin, estimator metadata, mask
// hash) followed by the intensity values as little-endian 64-bit floats with
// k fastest, then j, then i.
void write_grid(const IntensityGrid& g, const std::string& path);

struct GridFile {
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> step{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  EstimateInfo info;
  std::string mask_hash;
  GridArray values;
};
GridFile read_grid(const std::string& path);

// One CSV per time index named <base>_k<index>.csv, header x,y,value, one
// row per on-mask spatial centroid.
void write_csv_slices(const IntensityGrid& g, const std::string& base);

}  // namespace stkde
