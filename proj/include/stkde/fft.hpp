#pragma once

#include <array>
#include <complex>
#include <functional>
#include <utility>

#include "stkde/array.hpp"

namespace stkde {

// Source array zero-padded to exactly twice its extent along each active
// axis. Doubling makes the circular convolution below agree with the linear
// one on the source block for every lag the kernel array carries.
struct PaddedArray {
  std::array<int, 3> src_dims{1, 1, 1};
  GridArray data;
};

// Kernel sampled at signed lags in wrap-around order: position p along an
// axis of padded length P = 2M holds lag p for p <= M-1 and lag p - P for
// p >= M, so index 0 is the kernel centre.
struct WrappedKernelArray {
  GridArray data;
};

// Half-complex spectrum of a real padded array (last active axis stores
// P/2 + 1 coefficients).
struct Spectrum {
  std::array<int, 3> pdims{1, 1, 1};
  int rank = 3;
  aligned_vector<std::complex<double>> f;
};

// Real per-axis spectra of a separable wrapped kernel. Each axis profile is
// even around index 0, so its transform is real, and the outer product over
// active axes equals the transform of the full kernel array. The last
// active axis stores pdims/2 + 1 values to match the half-complex layout.
struct AxisSpectra {
  std::array<int, 3> pdims{1, 1, 1};
  int rank = 3;
  std::array<std::vector<double>, 3> axis;
};

PaddedArray pad_to_double(const GridArray& a);

// lag_value(axis, lag * step[axis]) fills the per-axis factors; the kernel
// array is their outer product over active axes.
WrappedKernelArray wrap_kernel(const std::array<int, 3>& src_dims, int rank,
                               const std::array<double, 3>& step,
                               const std::function<double(int, double)>& lag_value);

int wrap_lag(int position, int padded_length);

Spectrum forward(const GridArray& padded, int rank);

// Pointwise product of two spectra, inverse transform, 1/N scaling, then
// extraction of the leading out_dims block.
GridArray inverse_product(const Spectrum& a, const Spectrum& b, const std::array<int, 3>& out_dims);
GridArray inverse_product(const Spectrum& a, const AxisSpectra& k, const std::array<int, 3>& out_dims);

GridArray convolve(const PaddedArray& a, const WrappedKernelArray& k);

// Same convolution through the full complex transform; second member is the
// largest absolute imaginary residue before the real part is taken.
std::pair<GridArray, double> convolve_c2c(const PaddedArray& a, const WrappedKernelArray& k);

// In-place unnormalised complex DFT, used by the field simulator.
void fft_c2c_inplace(std::complex<double>* data, const std::array<int, 3>& dims, int rank, bool forward);

}  // namespace stkde
