#include "stkde/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace stkde {

namespace {

// FFTW planning is not thread safe and FFTW_MEASURE would make plan choice
// (and so low-order output bits) depend on runtime timings, so plans are
// created once per shape under a lock with FFTW_ESTIMATE and then executed
// through the new-array interface on caller buffers.
struct PlanSet {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan c2c_fwd = nullptr;
  fftw_plan c2c_bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::array<int, 4>, PlanSet>& plan_table() {
  static std::map<std::array<int, 4>, PlanSet> t;
  return t;
}

std::array<int, 4> plan_key(const std::array<int, 3>& dims, int rank) {
  return {rank, dims[0], dims[1], dims[2]};
}

std::size_t total(const std::array<int, 3>& d) {
  return static_cast<std::size_t>(d[0]) * d[1] * d[2];
}

std::size_t complex_total(const std::array<int, 3>& dims, int rank) {
  std::array<int, 3> c = dims;
  c[rank - 1] = c[rank - 1] / 2 + 1;
  return total(c);
}

PlanSet& plans_for(const std::array<int, 3>& dims, int rank) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = plan_key(dims, rank);
  auto it = plan_table().find(key);
  if (it != plan_table().end()) return it->second;

  PlanSet ps;
  {
    aligned_vector<double> re(total(dims));
    aligned_vector<std::complex<double>> cx(complex_total(dims, rank));
    ps.r2c = fftw_plan_dft_r2c(rank, dims.data(), re.data(),
                               reinterpret_cast<fftw_complex*>(cx.data()), FFTW_ESTIMATE);
    ps.c2r = fftw_plan_dft_c2r(rank, dims.data(), reinterpret_cast<fftw_complex*>(cx.data()),
                               re.data(), FFTW_ESTIMATE);
  }
  {
    // scoped separately: planning scratch peaks at one array set at a time
    aligned_vector<std::complex<double>> full(total(dims));
    ps.c2c_fwd = fftw_plan_dft(rank, dims.data(), reinterpret_cast<fftw_complex*>(full.data()),
                               reinterpret_cast<fftw_complex*>(full.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    ps.c2c_bwd = fftw_plan_dft(rank, dims.data(), reinterpret_cast<fftw_complex*>(full.data()),
                               reinterpret_cast<fftw_complex*>(full.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!ps.r2c || !ps.c2r || !ps.c2c_fwd || !ps.c2c_bwd)
    throw std::runtime_error("fft: plan creation failed");
  return plan_table().emplace(key, ps).first->second;
}

void check_rank(int rank) {
  if (rank < 1 || rank > 3) throw std::invalid_argument("fft: rank must be 1, 2 or 3");
}

}  // namespace

int wrap_lag(int position, int padded_length) {
  int m = padded_length / 2;
  return position <= m - 1 ? position : position - padded_length;
}

PaddedArray pad_to_double(const GridArray& a) {
  std::array<int, 3> pd = a.dims();
  for (int ax = 0; ax < a.rank(); ++ax) pd[ax] *= 2;
  PaddedArray out;
  out.src_dims = a.dims();
  out.data = GridArray(pd, a.rank());
  const auto& d = a.dims();
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int k = 0; k < d[2]; ++k) out.data.at(i, j, k) = a.at(i, j, k);
    }
  }
  return out;
}

WrappedKernelArray wrap_kernel(const std::array<int, 3>& src_dims, int rank,
                               const std::array<double, 3>& step,
                               const std::function<double(int, double)>& lag_value) {
  check_rank(rank);
  std::array<int, 3> pd{1, 1, 1};
  for (int ax = 0; ax < rank; ++ax) pd[ax] = 2 * src_dims[ax];

  std::array<std::vector<double>, 3> axis_vals;
  for (int ax = 0; ax < 3; ++ax) {
    axis_vals[ax].assign(pd[ax], 1.0);
    if (ax >= rank) continue;
    for (int p = 0; p < pd[ax]; ++p) {
      axis_vals[ax][p] = lag_value(ax, wrap_lag(p, pd[ax]) * step[ax]);
    }
  }

  WrappedKernelArray out;
  out.data = GridArray(pd, rank);
  for (int i = 0; i < pd[0]; ++i) {
    for (int j = 0; j < pd[1]; ++j) {
      const double vij = axis_vals[0][i] * axis_vals[1][j];
      double* row = out.data.data() + out.data.index(i, j, 0);
      for (int k = 0; k < pd[2]; ++k) row[k] = vij * axis_vals[2][k];
    }
  }
  return out;
}

Spectrum forward(const GridArray& padded, int rank) {
  check_rank(rank);
  Spectrum s;
  s.pdims = padded.dims();
  s.rank = rank;
  s.f.resize(complex_total(s.pdims, rank));
  PlanSet& ps = plans_for(s.pdims, rank);
  fftw_execute_dft_r2c(ps.r2c, const_cast<double*>(padded.data()),
                       reinterpret_cast<fftw_complex*>(s.f.data()));
  return s;
}

namespace {

GridArray finish_inverse(aligned_vector<std::complex<double>>& prod, const std::array<int, 3>& pdims,
                         int rank, const std::array<int, 3>& out_dims) {
  for (int ax = 0; ax < 3; ++ax) {
    if (out_dims[ax] > pdims[ax]) throw std::invalid_argument("inverse_product: output exceeds padded block");
  }
  aligned_vector<double> re(total(pdims));
  PlanSet& ps = plans_for(pdims, rank);
  fftw_execute_dft_c2r(ps.c2r, reinterpret_cast<fftw_complex*>(prod.data()), re.data());

  const double scale = 1.0 / static_cast<double>(total(pdims));
  GridArray out(out_dims, rank);
  for (int i = 0; i < out_dims[0]; ++i) {
    for (int j = 0; j < out_dims[1]; ++j) {
      const double* src = re.data() + (static_cast<std::size_t>(i) * pdims[1] + j) * pdims[2];
      double* dst = out.data() + out.index(i, j, 0);
      for (int k = 0; k < out_dims[2]; ++k) dst[k] = src[k] * scale;
    }
  }
  return out;
}

}  // namespace

GridArray inverse_product(const Spectrum& a, const Spectrum& b, const std::array<int, 3>& out_dims) {
  if (a.pdims != b.pdims || a.rank != b.rank)
    throw std::invalid_argument("inverse_product: spectra shapes differ");
  aligned_vector<std::complex<double>> prod(a.f.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a.f[i] * b.f[i];
  return finish_inverse(prod, a.pdims, a.rank, out_dims);
}

GridArray inverse_product(const Spectrum& a, const AxisSpectra& k, const std::array<int, 3>& out_dims) {
  if (a.pdims != k.pdims || a.rank != k.rank)
    throw std::invalid_argument("inverse_product: spectra shapes differ");
  std::array<int, 3> cd = a.pdims;
  cd[a.rank - 1] = cd[a.rank - 1] / 2 + 1;
  for (int ax = 0; ax < 3; ++ax) {
    if (k.axis[ax].size() != static_cast<std::size_t>(cd[ax]))
      throw std::invalid_argument("inverse_product: axis spectrum length mismatch");
  }
  aligned_vector<std::complex<double>> prod(a.f.size());
  std::size_t idx = 0;
  for (int i = 0; i < cd[0]; ++i) {
    for (int j = 0; j < cd[1]; ++j) {
      const double vij = k.axis[0][i] * k.axis[1][j];
      for (int t = 0; t < cd[2]; ++t, ++idx) prod[idx] = a.f[idx] * (vij * k.axis[2][t]);
    }
  }
  return finish_inverse(prod, a.pdims, a.rank, out_dims);
}

GridArray convolve(const PaddedArray& a, const WrappedKernelArray& k) {
  if (!a.data.same_shape(k.data)) throw std::invalid_argument("convolve: padded shapes differ");
  Spectrum sa = forward(a.data, a.data.rank());
  Spectrum sk = forward(k.data, k.data.rank());
  return inverse_product(sa, sk, a.src_dims);
}

void fft_c2c_inplace(std::complex<double>* data, const std::array<int, 3>& dims, int rank, bool forward_dir) {
  check_rank(rank);
  PlanSet& ps = plans_for(dims, rank);
  fftw_plan p = forward_dir ? ps.c2c_fwd : ps.c2c_bwd;
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
}

std::pair<GridArray, double> convolve_c2c(const PaddedArray& a, const WrappedKernelArray& k) {
  if (!a.data.same_shape(k.data)) throw std::invalid_argument("convolve_c2c: padded shapes differ");
  const auto& pd = a.data.dims();
  const int rank = a.data.rank();
  const std::size_t n = total(pd);

  aligned_vector<std::complex<double>> fa(n), fk(n);
  for (std::size_t i = 0; i < n; ++i) fa[i] = a.data[i];
  for (std::size_t i = 0; i < n; ++i) fk[i] = k.data[i];
  fft_c2c_inplace(fa.data(), pd, rank, true);
  fft_c2c_inplace(fk.data(), pd, rank, true);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fk[i];
  fft_c2c_inplace(fa.data(), pd, rank, false);

  const double scale = 1.0 / static_cast<double>(n);
  double max_imag = 0;
  GridArray out(a.src_dims, rank);
  for (int i = 0; i < a.src_dims[0]; ++i) {
    for (int j = 0; j < a.src_dims[1]; ++j) {
      for (int kk = 0; kk < a.src_dims[2]; ++kk) {
        std::complex<double> z = fa[(static_cast<std::size_t>(i) * pd[1] + j) * pd[2] + kk];
        out.at(i, j, kk) = z.real() * scale;
        max_imag = std::max(max_imag, std::abs(z.imag()) * scale);
      }
    }
  }
  return {std::move(out), max_imag};
}

}  // namespace stkde
