#include "stkde/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stkde {

KernelSpec::KernelSpec(double e, double d) : eps(e), delta(d) {
  if (!(eps > 0) || !std::isfinite(eps) || !(delta > 0) || !std::isfinite(delta))
    throw std::invalid_argument("KernelSpec: bandwidths must be positive and finite");
}

double gauss1d(double d, double sd) {
  return std::exp(-d * d / (2 * sd * sd)) / (sd * std::sqrt(2 * std::numbers::pi));
}

double kernel_spatial(double dx, double dy, double eps) {
  return std::exp(-(dx * dx + dy * dy) / (2 * eps * eps)) / (2 * std::numbers::pi * eps * eps);
}

double kernel_temporal(double dt, double delta) { return gauss1d(dt, delta); }

double kernel_peak(const KernelSpec& k) { return kernel_spatial(0, 0, k.eps) * kernel_temporal(0, k.delta); }

WrappedKernelArray wrapped_gaussian_3d(const std::array<int, 3>& dims,
                                       const std::array<double, 3>& step, const KernelSpec& k) {
  const double sd[3] = {k.eps, k.eps, k.delta};
  return wrap_kernel(dims, 3, step, [&](int ax, double lag) { return gauss1d(lag, sd[ax]); });
}

WrappedKernelArray wrapped_gaussian_2d(const std::array<int, 3>& dims,
                                       const std::array<double, 3>& step, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("wrapped_gaussian_2d: bandwidth must be positive");
  return wrap_kernel({dims[0], dims[1], 1}, 2, step, [&](int, double lag) { return gauss1d(lag, eps); });
}

WrappedKernelArray wrapped_gaussian_1d(int m, double step, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("wrapped_gaussian_1d: bandwidth must be positive");
  return wrap_kernel({m, 1, 1}, 1, {step, 1, 1}, [&](int, double lag) { return gauss1d(lag, delta); });
}

AxisSpectra gaussian_axis_spectra(const std::array<int, 3>& dims, const std::array<double, 3>& step,
                                  const KernelSpec& k) {
  const double sd[3] = {k.eps, k.eps, k.delta};
  AxisSpectra out;
  out.rank = 3;
  for (int ax = 0; ax < 3; ++ax) {
    const int p = 2 * dims[ax];
    out.pdims[ax] = p;
    std::vector<double> g(p);
    for (int i = 0; i < p; ++i) g[i] = gauss1d(wrap_lag(i, p) * step[ax], sd[ax]);
    const int nf = ax == 2 ? p / 2 + 1 : p;
    out.axis[ax].resize(nf);
    const double w = 2 * std::numbers::pi / p;
    for (int j = 0; j < nf; ++j) {
      double s = 0;
      for (int i = 0; i < p; ++i) s += g[i] * std::cos(w * ((static_cast<long long>(j) * i) % p));
      out.axis[ax][j] = s;
    }
  }
  return out;
}

}  // namespace stkde
