#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "stkde/bandwidths.hpp"
#include "stkde/kernels.hpp"
#include "stkde/stats.hpp"

using namespace stkde;

TEST_CASE("kernel closed forms") {
  CHECK_THROWS_AS(KernelSpec(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec(0.1, -1), std::invalid_argument);
  KernelSpec k(0.2, 0.3);
  double peak = 1.0 / (2 * std::numbers::pi * 0.04) / std::sqrt(2 * std::numbers::pi * 0.09);
  CHECK(kernel_peak(k) == doctest::Approx(peak).epsilon(1e-14));
  CHECK(kernel_spatial(0.1, -0.2, 0.2) ==
        doctest::Approx(gauss1d(0.1, 0.2) * gauss1d(-0.2, 0.2)).epsilon(1e-14));
}

namespace {

// 64 values at +-b and +-c (16 each) so that the sample sd is exactly 1 and
// the interquartile range is exactly 1.34.
std::vector<double> calibrated_axis() {
  double disc = 16.08 * 16.08 - 40.0 * (7.1824 - 63.0 / 32.0);
  double c = (16.08 - std::sqrt(disc)) / 20.0;
  double b = 2.68 - 3.0 * c;
  std::vector<double> v;
  for (int i = 0; i < 16; ++i) v.push_back(-b);
  for (int i = 0; i < 16; ++i) v.push_back(-c);
  for (int i = 0; i < 16; ++i) v.push_back(c);
  for (int i = 0; i < 16; ++i) v.push_back(b);
  return v;
}

PointPattern calibrated_pattern(double scale) {
  std::vector<double> ax = calibrated_axis();
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    pts.push_back({scale * ax[i], scale * ax[(i + 17) % ax.size()], 0.5});
  }
  double r = 3 * scale;
  Polygon win({{-r, -r}, {r, -r}, {r, r}, {-r, r}});
  return PointPattern(pts, win, TimeInterval(0, 1));
}

}  // namespace

TEST_CASE("oversmoothing bandwidth closed formula") {
  PointPattern pat = calibrated_pattern(1.0);
  std::vector<double> ax = calibrated_axis();
  CHECK(sample_sd(ax) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(interquartile_range(ax) == doctest::Approx(1.34).epsilon(1e-12));
  CHECK(oversmooth_bandwidth(pat) == doctest::Approx(0.5425).epsilon(1e-12));

  // scale equivariance
  PointPattern scaled = calibrated_pattern(3.7);
  CHECK(oversmooth_bandwidth(scaled) == doctest::Approx(3.7 * 0.5425).epsilon(1e-12));

  // degenerate inputs
  Polygon sq = testutil::unit_square();
  CHECK_THROWS_AS(oversmooth_bandwidth(PointPattern({{0.5, 0.5, 0.5}}, sq, TimeInterval(0, 1))),
                  std::invalid_argument);
  std::vector<Point3> same(10, {0.5, 0.5, 0.5});
  CHECK_THROWS_AS(oversmooth_bandwidth(PointPattern(same, sq, TimeInterval(0, 1))),
                  std::invalid_argument);
}

TEST_CASE("temporal plug-in bandwidth near the normal reference on Gaussian data") {
  std::mt19937_64 g(42);
  std::normal_distribution<double> nz(0.0, 1.0);
  std::vector<double> t(2000);
  for (double& x : t) x = nz(g);
  double sd = sample_sd(t);
  double sigma = std::min(sd, interquartile_range(t) / 1.34);
  double ref = 1.06 * sigma * std::pow(2000.0, -0.2);
  double got = temporal_plugin_bandwidth(t);
  CHECK(std::abs(got / ref - 1.0) <= 0.15);
}

TEST_CASE("temporal plug-in bandwidth equivariance and structure detection") {
  std::mt19937_64 g(7);
  std::normal_distribution<double> nz(0.0, 1.0);
  std::vector<double> t(800);
  for (double& x : t) x = nz(g) * 0.3 + 2.0;

  double base = temporal_plugin_bandwidth(t);
  std::vector<double> ts = t;
  for (double& x : ts) x *= 4.25;
  CHECK(temporal_plugin_bandwidth(ts) == doctest::Approx(4.25 * base).epsilon(1e-9));

  // two tight, widely separated clusters: far less smoothing than the
  // normal-reference rule applied to the same sample
  std::vector<double> cl(500);
  for (std::size_t i = 0; i < cl.size(); ++i)
    cl[i] = (i % 2 == 0 ? 0.0 : 10.0) + 0.05 * nz(g);
  double sigma = std::min(sample_sd(cl), interquartile_range(cl) / 1.34);
  double ns = 1.06 * sigma * std::pow(500.0, -0.2);
  CHECK(temporal_plugin_bandwidth(cl) < 0.5 * ns);

  CHECK_THROWS_AS(temporal_plugin_bandwidth({1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(temporal_plugin_bandwidth({1.0, 1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("spatial pilot: peak, mass and flatness") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {64, 64, 8});

  // single point at a voxel centroid
  PointPattern one({{grid.cx(31), grid.cy(31), 0.5}}, sq, iv);
  PilotField pf = pilot_spatial(one, 0.05, grid);
  double ks0 = kernel_spatial(0, 0, 0.05);
  CHECK(pf.at_points[0] == doctest::Approx(ks0).epsilon(0.02));
  CHECK(pf.at_points[0] > 0);

  // mass: integrates to n within 1 percent
  PointPattern pat(testutil::uniform_points(500, 3), sq, iv);
  PilotField pm = pilot_spatial(pat, 0.05, grid);
  double mass = pm.field.sum() * grid.step()[0] * grid.step()[1];
  CHECK(mass == doctest::Approx(500.0).epsilon(0.01));

  // near-uniform pattern with a large bandwidth: flat field in the interior
  PointPattern big(testutil::uniform_points(500, 4), sq, iv);
  PilotField pb = pilot_spatial(big, 0.2, grid);
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      if (grid.cx(i) < 0.3 || grid.cx(i) > 0.7 || grid.cy(j) < 0.3 || grid.cy(j) > 0.7) continue;
      CHECK(pb.field.at(i, j) == doctest::Approx(500.0).epsilon(0.10));
    }
  }
}

TEST_CASE("temporal pilot: peak location, mass and flatness") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {8, 8, 16});

  PointPattern one({{0.5, 0.5, 0.52}}, sq, iv);
  PilotField pf = pilot_temporal(one, 0.05, grid);
  int argmax = 0;
  for (int k = 1; k < 16; ++k)
    if (pf.field.at(k) > pf.field.at(argmax)) argmax = k;
  CHECK(argmax == 8);  // centroid 0.53125 is nearest to 0.52

  PointPattern pat(testutil::uniform_points(500, 5), sq, iv);
  PilotField pm = pilot_temporal(pat, 0.1, grid);
  CHECK(pm.field.sum() * grid.step()[2] == doctest::Approx(500.0).epsilon(0.01));
  PilotField pb = pilot_temporal(pat, 0.2, grid);
  for (int k = 0; k < 16; ++k) {
    if (grid.ct(k) < 0.3 || grid.ct(k) > 0.7) continue;
    CHECK(pb.field.at(k) == doctest::Approx(500.0).epsilon(0.10));
  }
}

namespace {

PilotIntensities make_pilots(const std::vector<double>& sp, const std::vector<double>& tp) {
  PilotIntensities p;
  p.spatial.at_points = sp;
  p.temporal.at_points = tp;
  return p;
}

}  // namespace

TEST_CASE("abramson bandwidths: collapse, invariance, monotonicity") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  PointPattern pat(testutil::uniform_points(50, 9), sq, iv);
  GlobalBandwidths gb{0.12, 0.07};

  std::vector<double> flat(50, 33.0);
  AdaptiveBandwidths collapsed = abramson_bandwidths(pat, gb, make_pilots(flat, flat));
  for (double e : collapsed.eps) CHECK(e == doctest::Approx(0.12).epsilon(1e-12));
  for (double d : collapsed.del) CHECK(d == doctest::Approx(0.07).epsilon(1e-12));

  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(4.0, 60.0);
  std::vector<double> sp(50), tp(50);
  for (auto& x : sp) x = u(g);
  for (auto& x : tp) x = u(g);
  AdaptiveBandwidths bw = abramson_bandwidths(pat, gb, make_pilots(sp, tp));

  // geometric-mean pivot (this pilot range triggers no trimming)
  for (double e : bw.eps) CHECK(e < bw.cap_s);
  for (double d : bw.del) CHECK(d < bw.cap_t);
  CHECK(geometric_mean(bw.eps) == doctest::Approx(0.12).epsilon(1e-9));
  CHECK(geometric_mean(bw.del) == doctest::Approx(0.07).epsilon(1e-9));

  // pilot-scale invariance
  std::vector<double> sp2 = sp, tp2 = tp;
  for (auto& x : sp2) x *= 7.5;
  for (auto& x : tp2) x *= 0.03;
  AdaptiveBandwidths bw2 = abramson_bandwidths(pat, gb, make_pilots(sp2, tp2));
  for (std::size_t i = 0; i < bw.eps.size(); ++i) {
    CHECK(bw2.eps[i] == doctest::Approx(bw.eps[i]).epsilon(1e-12));
    CHECK(bw2.del[i] == doctest::Approx(bw.del[i]).epsilon(1e-12));
  }

  // denser pilot means narrower kernel
  for (std::size_t i = 0; i < sp.size(); ++i) {
    for (std::size_t j = 0; j < sp.size(); ++j) {
      if (sp[i] > sp[j]) CHECK(bw.eps[i] < bw.eps[j]);
    }
  }
}

TEST_CASE("abramson bandwidths: hand-computed formula and trimming") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  PointPattern pat(testutil::uniform_points(10, 13), sq, iv);
  GlobalBandwidths gb{0.2, 0.1};
  std::vector<double> sp = {40, 35, 50, 45, 38, 2, 1.5, 60, 55, 42};
  std::vector<double> tp = {12, 9, 11, 10, 13, 8, 10.5, 9.5, 12.5, 11.5};
  AdaptiveBandwidths bw = abramson_bandwidths(pat, gb, make_pilots(sp, tp));

  double n = 10;
  std::vector<double> s(10);
  for (int i = 0; i < 10; ++i) s[i] = std::sqrt(n / sp[i]);
  double lg = 0;
  for (double x : s) lg += std::log(x);
  double gamma = std::exp(lg / 10);
  for (int i = 0; i < 10; ++i)
    CHECK(bw.eps[i] == doctest::Approx(std::min(0.2 * s[i] / gamma, bw.cap_s)).epsilon(1e-12));
  CHECK(bw.gamma_s == doctest::Approx(gamma).epsilon(1e-12));

  // one near-empty pilot forces the cap
  std::vector<double> sparse = sp;
  sparse[5] = 1e-9;
  AdaptiveBandwidths trimmed = abramson_bandwidths(pat, gb, make_pilots(sparse, tp));
  CHECK(trimmed.eps[5] == trimmed.cap_s);
  CHECK(trimmed.eps[5] < 0.2 * std::sqrt(n / 1e-9) / trimmed.gamma_s);
}

TEST_CASE("abramson field matches the per-point rule on grid values") {
  GridArray field({4, 4, 1}, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) field.at(i, j) = 5.0 + i + 10.0 * j;
  double gamma = 1.7, star = 0.15, cap = 0.6;
  std::vector<double> out = abramson_field(field, gamma, star, 120, cap);
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    double expect = std::min(star * std::sqrt(120.0 / field[idx]) / gamma, cap);
    CHECK(out[idx] == doctest::Approx(expect).epsilon(1e-12));
  }

  // zeros in the field are floored, then capped
  field.at(0, 0) = 0.0;
  std::vector<double> floored = abramson_field(field, gamma, star, 120, cap);
  CHECK(floored[0] == cap);
}
