#include "stkde/geometry.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace stkde;

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 1}, {0, 1}}), std::invalid_argument);
  // bowtie
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), std::invalid_argument);
  CHECK(testutil::unit_square().area() == doctest::Approx(1.0));
  CHECK(testutil::l_shape().area() == doctest::Approx(0.75));
}

TEST_CASE("point in window basics") {
  Polygon sq = testutil::unit_square();
  CHECK(sq.contains(0.5, 0.5));
  CHECK_FALSE(sq.contains(2, 2));
  // boundary and vertices count as inside
  CHECK(sq.contains(0.5, 0.0));
  CHECK(sq.contains(0.0, 0.0));
  CHECK(sq.contains(1.0, 1.0));
  CHECK(sq.contains(1.0, 0.25));
  CHECK_FALSE(sq.contains(1.0 + 1e-12, 0.25));
}

TEST_CASE("point in convex polygon agrees with half-plane test") {
  std::vector<Point2> vs = {{0.1, 0.0}, {0.9, 0.1}, {1.0, 0.7}, {0.5, 1.0}, {0.0, 0.6}};
  Polygon poly(vs);
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  for (int r = 0; r < 1000; ++r) {
    double x = u(g), y = u(g);
    bool ref = true;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Point2& a = vs[i];
      const Point2& b = vs[(i + 1) % vs.size()];
      double c = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
      if (c < 0) {
        ref = false;
        break;
      }
    }
    CHECK(poly.contains(x, y) == ref);
  }
}

TEST_CASE("grid construction") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);

  Grid3 g2(sq, iv, {2, 2, 2});
  CHECK(g2.voxel_volume() == doctest::Approx(0.125));
  int inside = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) inside += g2.inside(i, j);
  CHECK(inside == 4);
  CHECK(g2.n_inside() == 8);

  Grid3 gf(sq, iv, {128, 128, 64});
  CHECK(gf.step()[0] == doctest::Approx(1.0 / 128));
  CHECK(gf.step()[1] == doctest::Approx(1.0 / 128));
  CHECK(gf.step()[2] == doctest::Approx(1.0 / 64));

  CHECK_THROWS_AS(Grid3(sq, iv, {1, 4, 4}), std::invalid_argument);
}

TEST_CASE("grid mask matches window area for an L shape") {
  Grid3 g(testutil::l_shape(), TimeInterval(0, 1), {64, 64, 32});
  double frac = static_cast<double>(g.n_inside_spatial()) / (64.0 * 64.0);
  // analytic area fraction 0.75, tolerance of one voxel layer along the notch
  CHECK(std::abs(frac - 0.75) <= 2.0 / 64.0);

  // mask equals point-in-window at centroids
  for (int i = 0; i < 64; i += 7) {
    for (int j = 0; j < 64; j += 7) {
      CHECK(g.inside(i, j) == g.mask3().at(i, j, 5) > 0);
      CHECK(g.inside(i, j) == testutil::l_shape().contains(g.cx(i), g.cy(j)));
    }
  }
  CHECK(g.mask3().sum() == doctest::Approx(static_cast<double>(g.n_inside())));
}

TEST_CASE("pattern validation") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  CHECK_THROWS_AS(PointPattern({{2, 0.5, 0.5}}, sq, iv), std::invalid_argument);
  CHECK_THROWS_AS(PointPattern({{0.5, 0.5, 1.5}}, sq, iv), std::invalid_argument);
  PointPattern ok({{0.5, 0.5, 0.5}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, sq, iv);
  CHECK(ok.size() == 3);
  CHECK_THROWS_AS(TimeInterval(1, 1), std::invalid_argument);
}

TEST_CASE("binning basics") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 g(sq, iv, {4, 4, 4});

  // single point at a voxel centroid
  PointPattern one({{g.cx(1), g.cy(2), g.ct(3)}}, sq, iv);
  GridArray w = bin_points(one, g).w;
  CHECK(w.at(1, 2, 3) == 1.0);
  CHECK(w.sum() == 1.0);

  // duplicates stack in one voxel
  std::vector<Point3> dup(5, {0.6, 0.6, 0.6});
  GridArray wd = bin_points(PointPattern(dup, sq, iv), g).w;
  CHECK(wd.at(2, 2, 2) == 5.0);
  CHECK(wd.sum() == 5.0);
}

TEST_CASE("binning boundary ties go to the lower voxel") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 g(sq, iv, {4, 4, 4});

  GridArray w = bin_points(PointPattern({{0.5, 0.25, 0.75}}, sq, iv), g).w;
  CHECK(w.at(1, 0, 2) == 1.0);

  // domain corners: origin lands in voxel 0, far corner in the last voxel
  GridArray w0 = bin_points(PointPattern({{0, 0, 0}}, sq, iv), g).w;
  CHECK(w0.at(0, 0, 0) == 1.0);
  GridArray w1 = bin_points(PointPattern({{1, 1, 1}}, sq, iv), g).w;
  CHECK(w1.at(3, 3, 3) == 1.0);
}

TEST_CASE("binning matches a brute-force scan on uniform points") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 g(sq, iv, {32, 32, 16});
  PointPattern pat(testutil::uniform_points(500, 11), sq, iv);
  GridArray w = bin_points(pat, g).w;
  CHECK(w.sum() == 500.0);

  GridArray ref(g.dims(), 3);
  for (const Point3& p : pat.points()) {
    const double c[3] = {p.x, p.y, p.t};
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      // voxel a covers (edge[a], edge[a+1]] except the first, which is closed
      int lo = 0, hi = g.dims()[a] - 1, ans = hi;
      for (int i = lo; i <= hi; ++i) {
        double upper = g.origin()[a] + g.step()[a] * (i + 1);
        if (c[a] <= upper) {
          ans = i;
          break;
        }
      }
      idx[a] = ans;
    }
    ref.at(idx[0], idx[1], idx[2]) += 1.0;
  }
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == ref[i]);
}

TEST_CASE("points outside the grid extent are rejected") {
  Polygon half({{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}});
  Grid3 g(half, TimeInterval(0, 1), {4, 4, 4});
  PointPattern pat({{0.9, 0.9, 0.5}}, testutil::unit_square(), TimeInterval(0, 1));
  CHECK_THROWS_WITH_AS(bin_points(pat, g), doctest::Contains("point 0"), std::invalid_argument);
}
