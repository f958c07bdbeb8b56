#include "stkde/simulate.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <vector>

#include "stkde/fft.hpp"

namespace stkde {

namespace {

constexpr double kClipMassTol = 0.02;       // admissible negative-eigenvalue mass fraction
constexpr std::size_t kDenseLimit = 4096;   // largest grid for the dense fallback
constexpr std::size_t kEmbedLimit = std::size_t{1} << 27;  // embedding nodes memory guard

double u01(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53; }

// Box-Muller on the raw 53-bit stream; keeps draws identical across
// platforms, unlike std::normal_distribution.
std::pair<double, double> gauss_pair(std::mt19937_64& g) {
  const double r = std::sqrt(-2.0 * std::log(u01(g)));
  const double th = 2.0 * M_PI * u01(g);
  return {r * std::cos(th), r * std::sin(th)};
}

struct SpectralData {
  std::array<int, 3> edims{};
  aligned_vector<double> scale;  // sqrt(eigenvalue / N) after clip and rescale
};

struct DenseData {
  std::size_t n = 0;
  std::vector<double> chol;  // lower-triangular factor, row-major
};

struct FieldSampler {
  std::shared_ptr<const SpectralData> spectral;
  std::shared_ptr<const DenseData> dense;
};

struct SamplerKey {
  double sigma2, c, a, alpha, beta, q;
  std::array<int, 3> dims;
  std::array<double, 3> step;
  int max_factor;
  bool operator==(const SamplerKey&) const = default;
};

std::mutex g_sampler_mutex;
SamplerKey g_sampler_key;
FieldSampler g_sampler;
bool g_sampler_valid = false;

// Torus covariance of the embedding, eigenvalues via one unnormalised DFT.
// Returns the per-mode noise scale when the clipped mass is admissible.
bool try_embedding(const GneitingParams& p, const std::array<int, 3>& edims,
                   const std::array<double, 3>& step, aligned_vector<double>& scale) {
  const std::size_t n =
      static_cast<std::size_t>(edims[0]) * edims[1] * edims[2];
  aligned_vector<std::complex<double>> cov(n);
  for (int i = 0; i < edims[0]; ++i) {
    const double dx = std::min(i, edims[0] - i) * step[0];
    for (int j = 0; j < edims[1]; ++j) {
      const double dy = std::min(j, edims[1] - j) * step[1];
      std::complex<double>* row = cov.data() + (static_cast<std::size_t>(i) * edims[1] + j) * edims[2];
      for (int k = 0; k < edims[2]; ++k) {
        const double dt = std::min(k, edims[2] - k) * step[2];
        row[k] = gneiting_cov(p, dx, dy, dt);
      }
    }
  }
  fft_c2c_inplace(cov.data(), edims, 3, true);

  double pos_sum = 0, neg_sum = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const double lam = cov[v].real();
    (lam >= 0 ? pos_sum : neg_sum) += lam;
  }
  const double tot = pos_sum + neg_sum;
  if (tot > 0 && -neg_sum > kClipMassTol * tot) return false;

  const double rescale = pos_sum > 0 ? tot / pos_sum : 0.0;
  scale.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const double lam = cov[v].real();
    if (lam > 0) scale[v] = std::sqrt(lam * rescale / static_cast<double>(n));
  }
  return true;
}

std::shared_ptr<const DenseData> dense_factorisation(const GneitingParams& p, const Grid3& grid) {
  const auto& d = grid.dims();
  const std::size_t n = static_cast<std::size_t>(d[0]) * d[1] * d[2];
  std::vector<double> cx(n), cy(n), ct(n);
  std::size_t v = 0;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k, ++v) {
        cx[v] = grid.cx(i);
        cy[v] = grid.cy(j);
        ct[v] = grid.ct(k);
      }

  auto data = std::make_shared<DenseData>();
  data->n = n;
  for (double ridge = p.sigma2 * 1e-12;; ridge *= 100) {
    std::vector<double>& A = data->chol;
    A.assign(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s <= r; ++s)
        A[r * n + s] = gneiting_cov(p, cx[r] - cx[s], cy[r] - cy[s], ct[r] - ct[s]) +
                       (r == s ? ridge : 0.0);
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      double diag = A[j * n + j];
      for (std::size_t k = 0; k < j; ++k) diag -= A[j * n + k] * A[j * n + k];
      if (diag <= 0) {
        ok = false;
        break;
      }
      const double dj = std::sqrt(diag);
      A[j * n + j] = dj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = A[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
        A[i * n + j] = s / dj;
      }
    }
    if (ok) return data;
    if (ridge > p.sigma2 * 1e-4)
      throw std::runtime_error("simulate: dense covariance factorisation failed");
  }
}

FieldSampler sampler_for(const GneitingParams& p, const Grid3& grid, int max_factor) {
  SamplerKey key{p.sigma2, p.c,         p.a,  p.alpha, p.beta,
                 p.psi_exponent, grid.dims(), grid.step(), max_factor};
  std::lock_guard<std::mutex> lock(g_sampler_mutex);
  if (g_sampler_valid && key == g_sampler_key) return g_sampler;

  FieldSampler made;
  const auto& d = grid.dims();
  for (int f = 2; f <= max_factor; f *= 2) {
    std::array<int, 3> edims{d[0] * f, d[1] * f, d[2] * f};
    const std::size_t nodes =
        static_cast<std::size_t>(edims[0]) * edims[1] * edims[2];
    if (nodes > kEmbedLimit) break;
    auto spec = std::make_shared<SpectralData>();
    spec->edims = edims;
    if (try_embedding(p, edims, grid.step(), spec->scale)) {
      made.spectral = std::move(spec);
      break;
    }
  }
  if (!made.spectral) {
    const std::size_t nodes = static_cast<std::size_t>(d[0]) * d[1] * d[2];
    if (nodes > kDenseLimit)
      throw std::runtime_error(
          "simulate: circulant embedding is not nonnegative-definite at any admissible factor "
          "and the grid is too large for dense factorisation; choose different covariance "
          "parameters or a coarser simulation grid");
    made.dense = dense_factorisation(p, grid);
  }
  g_sampler_key = key;
  g_sampler = made;
  g_sampler_valid = true;
  return made;
}

GridArray sample_field(const SimConfig& cfg, const Grid3& grid, int max_factor,
                       std::mt19937_64& g) {
  const FieldSampler sampler = sampler_for(cfg.params, grid, max_factor);
  const auto& d = grid.dims();
  const double mu_z = std::log(cfg.params.mu / (cfg.window.area() * cfg.interval.length())) -
                      0.5 * cfg.params.sigma2;
  GridArray z(d, 3);

  if (sampler.spectral) {
    const SpectralData& sp = *sampler.spectral;
    const std::size_t n = sp.scale.size();
    aligned_vector<std::complex<double>> w(n);
    for (std::size_t v = 0; v < n; ++v) {
      const auto [re, im] = gauss_pair(g);
      w[v] = sp.scale[v] * std::complex<double>(re, im);
    }
    fft_c2c_inplace(w.data(), sp.edims, 3, true);
    for (int i = 0; i < d[0]; ++i)
      for (int j = 0; j < d[1]; ++j) {
        const std::complex<double>* row =
            w.data() + (static_cast<std::size_t>(i) * sp.edims[1] + j) * sp.edims[2];
        for (int k = 0; k < d[2]; ++k) z.at(i, j, k) = row[k].real() + mu_z;
      }
  } else {
    const DenseData& dd = *sampler.dense;
    std::vector<double> gs(dd.n);
    for (double& x : gs) x = gauss_pair(g).first;
    std::size_t v = 0;
    for (int i = 0; i < d[0]; ++i)
      for (int j = 0; j < d[1]; ++j)
        for (int k = 0; k < d[2]; ++k, ++v) {
          const double* row = dd.chol.data() + v * dd.n;
          double s = 0;
          for (std::size_t u = 0; u <= v; ++u) s += row[u] * gs[u];
          z.at(i, j, k) = s + mu_z;
        }
  }
  return z;
}

std::uint64_t sample_poisson(double lam, std::mt19937_64& g) {
  if (!(lam > 0)) return 0;
  if (lam > 30.0) return sample_poisson(0.5 * lam, g) + sample_poisson(0.5 * lam, g);
  const double thresh = std::exp(-lam);
  std::uint64_t k = 0;
  double prod = u01(g);
  while (prod > thresh) {
    ++k;
    prod *= u01(g);
  }
  return k;
}

}  // namespace

void GneitingParams::validate() const {
  const bool ranges = sigma2 >= 0 && c >= 0 && a >= 0 && alpha > 0 && alpha <= 1 && beta > 0 &&
                      beta <= 1 && mu > 0 && psi_exponent > 0;
  const bool finite = std::isfinite(sigma2) && std::isfinite(c) && std::isfinite(a) &&
                      std::isfinite(mu) && std::isfinite(psi_exponent);
  if (!ranges || !finite) throw std::invalid_argument("gneiting: parameters out of range");
}

double gneiting_cov(const GneitingParams& p, double dux, double duy, double dv) {
  const double psi = std::pow(1.0 + p.a * std::pow(dv * dv, p.alpha), p.beta);
  const double r = (dux * dux + duy * duy) / psi;
  return std::pow(psi, -p.psi_exponent) * p.sigma2 * std::exp(-p.c * r);
}

GridArray simulate_grf(const SimConfig& cfg, int max_embedding_factor) {
  cfg.params.validate();
  Grid3 grid(cfg.window, cfg.interval, cfg.dims);
  std::mt19937_64 g(cfg.seed);
  return sample_field(cfg, grid, max_embedding_factor, g);
}

LgcpRealisation simulate_lgcp(const SimConfig& cfg) {
  cfg.params.validate();
  Grid3 grid(cfg.window, cfg.interval, cfg.dims);
  std::mt19937_64 g(cfg.seed);
  const GridArray z = sample_field(cfg, grid, 8, g);

  const auto& d = grid.dims();
  const auto& o = grid.origin();
  const auto& m = grid.step();
  const double vol = grid.voxel_volume();
  GridArray lambda(d, 3), edge(d, 3);
  std::vector<Point3> pts;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      for (int k = 0; k < d[2]; ++k) {
        const double lam = std::exp(z.at(i, j, k));
        lambda.at(i, j, k) = lam;
        edge.at(i, j, k) = 1.0;
        const std::uint64_t cnt = sample_poisson(lam * vol, g);
        for (std::uint64_t c = 0; c < cnt; ++c) {
          const double x = o[0] + m[0] * (i + u01(g));
          const double y = o[1] + m[1] * (j + u01(g));
          const double t = o[2] + m[2] * (k + u01(g));
          if (cfg.window.contains(x, y)) pts.push_back({x, y, t});
        }
      }
    }

  PointPattern pattern(std::move(pts), cfg.window, cfg.interval);
  EstimateInfo info;
  info.method = "lgcp-truth";
  info.n = pattern.size();
  IntensityGrid truth{grid, std::move(lambda), std::move(edge), std::move(info)};
  return {std::move(pattern), std::move(truth)};
}

}  // namespace stkde
