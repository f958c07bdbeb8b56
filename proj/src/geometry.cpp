#include "stkde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stkde {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  if (cross(a, b, p) != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

int sign(double x) { return (x > 0) - (x < 0); }

// Proper crossing or collinear overlap of more than a single point.
bool segments_conflict(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  int d1 = sign(cross(a, b, c));
  int d2 = sign(cross(a, b, d));
  int d3 = sign(cross(c, d, a));
  int d4 = sign(cross(c, d, b));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
    double lo1 = std::min(a.x, b.x), hi1 = std::max(a.x, b.x);
    double lo2 = std::min(c.x, d.x), hi2 = std::max(c.x, d.x);
    double lo1y = std::min(a.y, b.y), hi1y = std::max(a.y, b.y);
    double lo2y = std::min(c.y, d.y), hi2y = std::max(c.y, d.y);
    double ox = std::min(hi1, hi2) - std::max(lo1, lo2);
    double oy = std::min(hi1y, hi2y) - std::max(lo1y, lo2y);
    return ox > 0 || oy > 0;
  }
  return false;
}

}  // namespace

Polygon::Polygon(std::vector<Point2> vertices) : v_(std::move(vertices)) {
  const std::size_t n = v_.size();
  if (n < 3) throw std::invalid_argument("Polygon: need at least 3 vertices");

  double s = 0;
  box_.xmin = box_.ymin = std::numeric_limits<double>::infinity();
  box_.xmax = box_.ymax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = v_[i];
    const Point2& b = v_[(i + 1) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y))
      throw std::invalid_argument("Polygon: non-finite vertex");
    if (a.x == b.x && a.y == b.y)
      throw std::invalid_argument("Polygon: repeated consecutive vertex");
    s += a.x * b.y - b.x * a.y;
    box_.xmin = std::min(box_.xmin, a.x);
    box_.xmax = std::max(box_.xmax, a.x);
    box_.ymin = std::min(box_.ymin, a.y);
    box_.ymax = std::max(box_.ymax, a.y);
  }
  area_ = std::abs(s) / 2.0;
  if (area_ <= 0) throw std::invalid_argument("Polygon: zero area");

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_conflict(v_[i], v_[(i + 1) % n], v_[j], v_[(j + 1) % n]))
        throw std::invalid_argument("Polygon: self-intersecting boundary");
    }
  }
}

bool Polygon::contains(double x, double y) const {
  if (x < box_.xmin || x > box_.xmax || y < box_.ymin || y > box_.ymax) return false;
  const Point2 p{x, y};
  const std::size_t n = v_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, v_[i], v_[(i + 1) % n])) return true;
  }
  // Even-odd ray cast toward +x. The half-open test on y makes vertex
  // crossings count once.
  bool in = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = v_[i];
    const Point2& b = v_[(i + 1) % n];
    if ((a.y > y) != (b.y > y)) {
      double xint = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x < xint) in = !in;
    }
  }
  return in;
}

TimeInterval::TimeInterval(double a, double b) : t0(a), t1(b) {
  if (!(t1 > t0)) throw std::invalid_argument("TimeInterval: t1 must exceed t0");
}

PointPattern::PointPattern(std::vector<Point3> points, Polygon window, TimeInterval interval)
    : pts_(std::move(points)), win_(std::move(window)), iv_(interval) {
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const Point3& p = pts_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t))
      throw std::invalid_argument("PointPattern: non-finite coordinate at point " + std::to_string(i));
    if (!win_.contains(p.x, p.y))
      throw std::invalid_argument("PointPattern: point " + std::to_string(i) + " outside window");
    if (!iv_.contains(p.t))
      throw std::invalid_argument("PointPattern: point " + std::to_string(i) + " outside time interval");
  }
}

Grid3::Grid3(const Polygon& window, const TimeInterval& interval, std::array<int, 3> dims)
    : dims_(dims) {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] < 2) throw std::invalid_argument("Grid3: need at least 2 voxels per axis");
  }
  const BBox2& b = window.bbox();
  origin_ = {b.xmin, b.ymin, interval.t0};
  step_ = {(b.xmax - b.xmin) / dims_[0], (b.ymax - b.ymin) / dims_[1],
           (interval.t1 - interval.t0) / dims_[2]};
  for (int a = 0; a < 3; ++a) {
    if (!(step_[a] > 0)) throw std::invalid_argument("Grid3: degenerate extent");
  }
  smask_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1], 0);
  for (int i = 0; i < dims_[0]; ++i) {
    for (int j = 0; j < dims_[1]; ++j) {
      if (window.contains(cx(i), cy(j))) {
        smask_[static_cast<std::size_t>(i) * dims_[1] + j] = 1;
        ++n_inside_;
      }
    }
  }
  if (n_inside_ == 0) throw std::invalid_argument("Grid3: no voxel centroid falls inside the window");
}

GridArray Grid3::mask3() const {
  GridArray m(dims_, 3);
  for (int i = 0; i < dims_[0]; ++i) {
    for (int j = 0; j < dims_[1]; ++j) {
      if (!inside(i, j)) continue;
      for (int k = 0; k < dims_[2]; ++k) m.at(i, j, k) = 1.0;
    }
  }
  return m;
}

int bin_index(double x, double origin, double step) {
  int i = static_cast<int>(std::ceil((x - origin) / step)) - 1;
  return i < 0 ? 0 : i;
}

bool voxel_of(const Grid3& grid, const Point3& p, std::array<int, 3>& idx) {
  const auto& d = grid.dims();
  const auto& o = grid.origin();
  const auto& m = grid.step();
  const double c[3] = {p.x, p.y, p.t};
  for (int a = 0; a < 3; ++a) {
    idx[a] = bin_index(c[a], o[a], m[a]);
    if (idx[a] >= d[a]) {
      // Tolerate the upper boundary itself; anything beyond is an error.
      if (c[a] > o[a] + m[a] * d[a]) return false;
      idx[a] = d[a] - 1;
    }
  }
  return true;
}

BinnedWeights bin_points(const PointPattern& pattern, const Grid3& grid) {
  GridArray w(grid.dims(), 3);
  const auto& pts = pattern.points();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    std::array<int, 3> idx;
    if (!voxel_of(grid, pts[p], idx))
      throw std::invalid_argument("bin_points: point " + std::to_string(p) + " outside grid extent");
    w.at(idx[0], idx[1], idx[2]) += 1.0;
  }
  return {grid, std::move(w)};
}

}  // namespace stkde
