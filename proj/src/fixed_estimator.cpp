#include "stkde/fixed_estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stkde/parallel.hpp"

namespace stkde {

void check_aliasing_bound(const KernelSpec& kernel, const Grid3& grid) {
  const auto& d = grid.dims();
  const auto& m = grid.step();
  if (kernel.eps > d[0] * m[0] || kernel.eps > d[1] * m[1])
    throw std::invalid_argument("spatial bandwidth exceeds half the padded extent");
  if (kernel.delta > d[2] * m[2])
    throw std::invalid_argument("temporal bandwidth exceeds half the padded extent");
}

FixedFftContext make_fixed_fft_context(const Grid3& grid) {
  FixedFftContext ctx{grid, {}};
  PaddedArray pm = pad_to_double(grid.mask3());
  ctx.mask_spec = forward(pm.data, 3);
  return ctx;
}

FixedFields fixed_fft_fields(const FixedFftContext& ctx, const GridArray& weights,
                             const KernelSpec& kernel) {
  const Grid3& grid = ctx.grid;
  if (weights.dims() != grid.dims())
    throw std::invalid_argument("fixed_fft_fields: weight array does not match the grid");
  check_aliasing_bound(kernel, grid);

  AxisSpectra ks = gaussian_axis_spectra(grid.dims(), grid.step(), kernel);
  Spectrum ws = forward(pad_to_double(weights).data, 3);

  FixedFields out;
  out.num = inverse_product(ws, ks, grid.dims());
  for (std::size_t i = 0; i < out.num.size(); ++i)
    if (out.num[i] < 0) out.num[i] = 0;

  out.edge = inverse_product(ctx.mask_spec, ks, grid.dims());
  const double v = grid.voxel_volume();
  for (std::size_t i = 0; i < out.edge.size(); ++i) out.edge[i] *= v;
  return out;
}

IntensityGrid estimate_fixed_fft(const BinnedWeights& weights, const KernelSpec& kernel) {
  FixedFftContext ctx = make_fixed_fft_context(weights.grid);
  FixedFields f = fixed_fft_fields(ctx, weights.w, kernel);
  EstimateInfo info;
  info.method = "fixed-fft";
  info.n = static_cast<std::size_t>(weights.w.sum() + 0.5);
  info.eps = kernel.eps;
  info.delta = kernel.delta;
  return assemble_ratio(weights.grid, f.num, f.edge, std::move(info));
}

namespace {

// Kept out of the parallel_for lambda: inside the type-erased closure the
// compiler falls back to scalar exp instead of the vectorised one.
double gauss_sum(const double* X, const double* Y, const double* T, std::size_t n, double as,
                 double at, double tx, double ty, double tt) {
  double acc = 0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t p = 0; p < n; ++p) {
    double dx = tx - X[p], dy = ty - Y[p], dt = tt - T[p];
    acc += std::exp(as * (dx * dx + dy * dy) + at * dt * dt);
  }
  return acc;
}

}  // namespace

IntensityGrid estimate_fixed_direct(const PointPattern& pattern, const KernelSpec& kernel,
                                    const Grid3& grid, int threads) {
  check_aliasing_bound(kernel, grid);
  const auto& d = grid.dims();
  const double v = grid.voxel_volume();
  const double peak = kernel_peak(kernel);
  const double as = -1.0 / (2 * kernel.eps * kernel.eps);
  const double at = -1.0 / (2 * kernel.delta * kernel.delta);

  // flat lists keep the inner sums vectorisable
  const auto& pts = pattern.points();
  const std::size_t n = pts.size();
  std::vector<double> px(n), py(n), pt(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = pts[i].x;
    py[i] = pts[i].y;
    pt[i] = pts[i].t;
  }

  std::vector<double> sx, sy, st;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      for (int k = 0; k < d[2]; ++k) {
        sx.push_back(grid.cx(i));
        sy.push_back(grid.cy(j));
        st.push_back(grid.ct(k));
      }
    }
  const std::size_t ns = sx.size();

  std::vector<std::size_t> targets;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      for (int k = 0; k < d[2]; ++k)
        targets.push_back((static_cast<std::size_t>(i) * d[1] + j) * d[2] + k);
    }

  GridArray num(d, 3), edge(d, 3);
  const double* SX = sx.data();
  const double* SY = sy.data();
  const double* ST = st.data();
  const double* PX = px.data();
  const double* PY = py.data();
  const double* PT = pt.data();

  parallel_for(targets.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t ti = b; ti < e; ++ti) {
      std::size_t flat = targets[ti];
      int i = static_cast<int>(flat / (static_cast<std::size_t>(d[1]) * d[2]));
      int j = static_cast<int>((flat / d[2]) % d[1]);
      int k = static_cast<int>(flat % d[2]);
      const double tx = grid.cx(i), ty = grid.cy(j), tt = grid.ct(k);

      num[flat] = gauss_sum(PX, PY, PT, n, as, at, tx, ty, tt) * peak;
      edge[flat] = gauss_sum(SX, SY, ST, ns, as, at, tx, ty, tt) * peak * v;
    }
  });

  EstimateInfo info;
  info.method = "fixed-direct";
  info.n = n;
  info.eps = kernel.eps;
  info.delta = kernel.delta;
  return assemble_ratio(grid, num, edge, std::move(info));
}

}  // namespace stkde
