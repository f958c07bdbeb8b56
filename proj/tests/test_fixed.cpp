#include "stkde/fixed_estimator.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "stkde/stats.hpp"

using namespace stkde;

TEST_CASE("empty pattern estimates to zero") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {8, 8, 4});
  PointPattern empty({}, sq, iv);
  KernelSpec k(0.1, 0.1);

  IntensityGrid fft = estimate_fixed_fft(bin_points(empty, grid), k);
  CHECK(fft.lambda.max_abs() == 0.0);
  IntensityGrid dir = estimate_fixed_direct(empty, k, grid);
  CHECK(dir.lambda.max_abs() == 0.0);
}

TEST_CASE("single centred point peaks at the kernel maximum") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {32, 32, 32});
  KernelSpec k(0.05, 0.05);
  PointPattern one({{grid.cx(15), grid.cy(15), grid.ct(15)}}, sq, iv);

  IntensityGrid fft = estimate_fixed_fft(bin_points(one, grid), k);
  CHECK(fft.lambda.at(15, 15, 15) == doctest::Approx(kernel_peak(k)).epsilon(1e-4));
  CHECK(fft.edge.at(15, 15, 15) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("direct estimate inherits the window's mirror symmetries") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  std::array<int, 3> d{16, 16, 8};
  Grid3 grid(sq, iv, d);
  PointPattern one({{0.5, 0.5, 0.5}}, sq, iv);
  IntensityGrid est = estimate_fixed_direct(one, KernelSpec(0.15, 0.2), grid);
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k) {
        double v = est.lambda.at(i, j, k);
        CHECK(v == doctest::Approx(est.lambda.at(d[0] - 1 - i, j, k)).epsilon(1e-10));
        CHECK(v == doctest::Approx(est.lambda.at(i, d[1] - 1 - j, k)).epsilon(1e-10));
        CHECK(v == doctest::Approx(est.lambda.at(i, j, d[2] - 1 - k)).epsilon(1e-10));
      }
}

TEST_CASE("fft path matches direct evaluation on binned locations") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {32, 32, 16});
  PointPattern pat(testutil::uniform_points(100, 31), sq, iv);
  KernelSpec k(0.08, 0.12);

  IntensityGrid fft = estimate_fixed_fft(bin_points(pat, grid), k);
  IntensityGrid dir = estimate_fixed_direct(testutil::binned_pattern(pat, grid), k, grid);
  CHECK(testutil::rel_sup_diff(fft.lambda, dir.lambda) <= 1e-8);
  CHECK(testutil::rel_sup_diff(fft.edge, dir.edge) <= 1e-8);
}

TEST_CASE("near-uniform pattern estimates a near-constant intensity") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {16, 16, 8});
  PointPattern pat(testutil::uniform_points(500, 77), sq, iv);
  IntensityGrid est = estimate_fixed_direct(pat, KernelSpec(0.12, 0.12), grid);
  std::vector<double> on;
  for (std::size_t i = 0; i < est.lambda.size(); ++i)
    if (est.edge[i] > 0) on.push_back(est.lambda[i]);
  CHECK(median(on) == doctest::Approx(500.0).epsilon(0.15));
}

TEST_CASE("numerator mass stays near n for interior patterns") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {32, 32, 16});
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.3, 0.7);
  std::vector<Point3> pts(120);
  for (auto& p : pts) p = {u(g), u(g), u(g)};
  PointPattern pat(pts, sq, iv);
  KernelSpec k(0.06, 0.06);

  IntensityGrid fft = estimate_fixed_fft(bin_points(pat, grid), k);
  CHECK(numerator_mass(fft) == doctest::Approx(120.0).epsilon(0.02));
  IntensityGrid dir = estimate_fixed_direct(pat, k, grid);
  CHECK(numerator_mass(dir) == doctest::Approx(120.0).epsilon(0.02));
}

TEST_CASE("bandwidths beyond the padded extent are rejected") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {8, 8, 4});
  PointPattern pat(testutil::uniform_points(10, 2), sq, iv);
  CHECK_THROWS_AS(estimate_fixed_fft(bin_points(pat, grid), KernelSpec(1.5, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_fixed_fft(bin_points(pat, grid), KernelSpec(0.1, 1.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_fixed_direct(pat, KernelSpec(1.5, 0.1), grid), std::invalid_argument);
}

TEST_CASE("estimates are nonnegative, zero off-mask, edge in (0,1]") {
  Polygon lw = testutil::l_shape();
  TimeInterval iv(0, 1);
  Grid3 grid(lw, iv, {24, 24, 8});
  std::vector<Point3> pts;
  for (const Point3& p : testutil::uniform_points(400, 12)) {
    if (lw.contains(p.x, p.y)) pts.push_back(p);
  }
  PointPattern pat(pts, lw, iv);
  IntensityGrid est = estimate_fixed_fft(bin_points(pat, grid), KernelSpec(0.07, 0.1));

  const auto& d = grid.dims();
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k) {
        double lam = est.lambda.at(i, j, k);
        CHECK(lam >= 0.0);
        if (!grid.inside(i, j)) {
          CHECK(lam == 0.0);
          CHECK(est.edge.at(i, j, k) == 0.0);
        } else {
          CHECK(est.edge.at(i, j, k) > 0.0);
          CHECK(est.edge.at(i, j, k) <= 1.0 + 1e-9);
        }
      }
}

TEST_CASE("fft estimation is bit-deterministic across calls") {
  Polygon sq = testutil::unit_square();
  TimeInterval iv(0, 1);
  Grid3 grid(sq, iv, {16, 16, 8});
  PointPattern pat(testutil::uniform_points(80, 10), sq, iv);
  KernelSpec k(0.1, 0.1);
  IntensityGrid a = estimate_fixed_fft(bin_points(pat, grid), k);
  IntensityGrid b = estimate_fixed_fft(bin_points(pat, grid), k);
  for (std::size_t i = 0; i < a.lambda.size(); ++i) CHECK(a.lambda[i] == b.lambda[i]);
}
