#pragma once

#include "stkde/fft.hpp"
#include "stkde/geometry.hpp"
#include "stkde/intensity.hpp"
#include "stkde/kernels.hpp"

namespace stkde {

// Shared state for repeated fixed-kernel FFT estimates on one grid: the
// padded mask spectrum is computed once and reused by every kernel.
struct FixedFftContext {
  Grid3 grid;
  Spectrum mask_spec;
};

FixedFftContext make_fixed_fft_context(const Grid3& grid);

struct FixedFields {
  GridArray num;   // kernel-smoothed weights, negatives clamped to zero
  GridArray edge;  // V * (mask convolved with kernel), unclamped, everywhere
};

FixedFields fixed_fft_fields(const FixedFftContext& ctx, const GridArray& weights,
                             const KernelSpec& kernel);

// Binned fixed-bandwidth estimate: numerator and edge correction through the
// padded FFT pipeline, ratio on-mask, zero off-mask.
IntensityGrid estimate_fixed_fft(const BinnedWeights& weights, const KernelSpec& kernel);

// Reference estimator evaluated from exact point locations by direct
// summation; the edge correction is a literal Riemann sum over on-mask
// voxels per evaluation voxel. Quadratic in grid size, oracle use only.
IntensityGrid estimate_fixed_direct(const PointPattern& pattern, const KernelSpec& kernel,
                                    const Grid3& grid, int threads = 0);

// Largest admissible bandwidths on a grid (half the padded extent per axis);
// larger values would alias through the circular convolution.
void check_aliasing_bound(const KernelSpec& kernel, const Grid3& grid);

}  // namespace stkde
