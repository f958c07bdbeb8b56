#pragma once

#include <random>
#include <vector>

#include "stkde/geometry.hpp"

namespace testutil {

inline stkde::Polygon unit_square() {
  return stkde::Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

// Unit square minus its top-right quadrant, area 3/4.
inline stkde::Polygon l_shape() {
  return stkde::Polygon({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});
}

inline std::vector<stkde::Point3> uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<stkde::Point3> pts(n);
  for (auto& p : pts) {
    p.x = u(g);
    p.y = u(g);
    p.t = u(g);
  }
  return pts;
}

// Same pattern with every point moved to the centroid of its voxel, so that
// direct evaluation sees exactly what the binned pipeline sees.
inline stkde::PointPattern binned_pattern(const stkde::PointPattern& pat, const stkde::Grid3& g) {
  std::vector<stkde::Point3> moved;
  moved.reserve(pat.size());
  for (const auto& p : pat.points()) {
    int i = std::min(stkde::bin_index(p.x, g.origin()[0], g.step()[0]), g.dims()[0] - 1);
    int j = std::min(stkde::bin_index(p.y, g.origin()[1], g.step()[1]), g.dims()[1] - 1);
    int k = std::min(stkde::bin_index(p.t, g.origin()[2], g.step()[2]), g.dims()[2] - 1);
    moved.push_back({g.cx(i), g.cy(j), g.ct(k)});
  }
  return stkde::PointPattern(std::move(moved), pat.window(), pat.interval());
}

inline double rel_sup_diff(const stkde::GridArray& a, const stkde::GridArray& b) {
  double scale = b.max_abs(), worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return scale > 0 ? worst / scale : worst;
}

}  // namespace testutil
