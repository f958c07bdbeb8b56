#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stkde/array.hpp"

namespace stkde {

struct Point2 {
  double x = 0, y = 0;
};

struct Point3 {
  double x = 0, y = 0, t = 0;
};

struct BBox2 {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

// Simple closed polygon, vertices in order (either orientation), no
// self-intersections, nonzero area. The closing edge is implicit.
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return v_; }
  const BBox2& bbox() const { return box_; }
  double area() const { return area_; }
  bool contains(double x, double y) const;  // boundary counts as inside

 private:
  std::vector<Point2> v_;
  BBox2 box_;
  double area_ = 0;
};

struct TimeInterval {
  double t0 = 0, t1 = 1;
  TimeInterval() = default;
  TimeInterval(double a, double b);
  double length() const { return t1 - t0; }
  bool contains(double t) const { return t >= t0 && t <= t1; }
};

// Observed point pattern on W x T. Construction validates containment.
class PointPattern {
 public:
  PointPattern(std::vector<Point3> points, Polygon window, TimeInterval interval);

  const std::vector<Point3>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  const Polygon& window() const { return win_; }
  const TimeInterval& interval() const { return iv_; }

 private:
  std::vector<Point3> pts_;
  Polygon win_;
  TimeInterval iv_;
};

// Regular voxel grid over the window bounding box and the time interval.
// Voxel (i,j,k) spans [origin + step*idx, origin + step*(idx+1)] per axis;
// centroids sit at origin + step*(idx+0.5). The spatial mask marks voxels
// whose centroid lies inside the polygon.
class Grid3 {
 public:
  Grid3(const Polygon& window, const TimeInterval& interval, std::array<int, 3> dims);

  const std::array<int, 3>& dims() const { return dims_; }
  const std::array<double, 3>& step() const { return step_; }
  const std::array<double, 3>& origin() const { return origin_; }
  double voxel_volume() const { return step_[0] * step_[1] * step_[2]; }

  double cx(int i) const { return origin_[0] + step_[0] * (i + 0.5); }
  double cy(int j) const { return origin_[1] + step_[1] * (j + 0.5); }
  double ct(int k) const { return origin_[2] + step_[2] * (k + 0.5); }

  bool inside(int i, int j) const { return smask_[static_cast<std::size_t>(i) * dims_[1] + j] != 0; }
  std::size_t n_inside_spatial() const { return n_inside_; }
  std::size_t n_inside() const { return n_inside_ * dims_[2]; }

  // 0/1 indicator of the spatial mask replicated over time, for convolution.
  GridArray mask3() const;

 private:
  std::array<int, 3> dims_{};
  std::array<double, 3> step_{};
  std::array<double, 3> origin_{};
  std::vector<std::uint8_t> smask_;
  std::size_t n_inside_ = 0;
};

struct BinnedWeights {
  Grid3 grid;
  GridArray w;  // per-voxel counts, sums to n
};

// Simple binning: each point adds one full unit of mass to the voxel that
// contains it. A coordinate exactly on a voxel boundary goes to the lower
// index. Throws if any point falls outside the grid extent.
BinnedWeights bin_points(const PointPattern& pattern, const Grid3& grid);

// Voxel index along one axis for the rule above, before range checking.
int bin_index(double x, double origin, double step);

// Containing voxel of a point, with the upper domain boundary folded into
// the last voxel; false when the point lies beyond the grid extent.
bool voxel_of(const Grid3& grid, const Point3& p, std::array<int, 3>& idx);

}  // namespace stkde
