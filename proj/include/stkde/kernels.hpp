#pragma once

#include <array>

#include "stkde/fft.hpp"

namespace stkde {

// Product of an isotropic bivariate Gaussian in space (sd eps on each axis)
// and a univariate Gaussian in time (sd delta); both factors integrate to 1.
struct KernelSpec {
  double eps = 0;
  double delta = 0;
  KernelSpec(double e, double d);
};

double gauss1d(double d, double sd);
double kernel_spatial(double dx, double dy, double eps);
double kernel_temporal(double dt, double delta);
double kernel_peak(const KernelSpec& k);

// Wrapped (reflected-layout) kernel arrays for the convolution pipeline.
WrappedKernelArray wrapped_gaussian_3d(const std::array<int, 3>& dims,
                                       const std::array<double, 3>& step, const KernelSpec& k);
WrappedKernelArray wrapped_gaussian_2d(const std::array<int, 3>& dims,
                                       const std::array<double, 3>& step, double eps);
WrappedKernelArray wrapped_gaussian_1d(int m, double step, double delta);

// Per-axis real spectra of the padded separable Gaussian, by direct cosine
// sums over the wrapped axis profiles. Equivalent to transforming the full
// 3-d kernel array, without ever materialising it.
AxisSpectra gaussian_axis_spectra(const std::array<int, 3>& dims, const std::array<double, 3>& step,
                                  const KernelSpec& k);

}  // namespace stkde
