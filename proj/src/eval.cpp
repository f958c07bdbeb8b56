#include "stkde/eval.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "stkde/adaptive_estimator.hpp"
#include "stkde/bandwidths.hpp"

namespace stkde {

namespace {

void require_same_grid(const Grid3& a, const Grid3& b) {
  if (a.dims() != b.dims() || a.origin() != b.origin() || a.step() != b.step())
    throw std::invalid_argument("intensity grids differ");
  for (int i = 0; i < a.dims()[0]; ++i)
    for (int j = 0; j < a.dims()[1]; ++j)
      if (a.inside(i, j) != b.inside(i, j)) throw std::invalid_argument("grid masks differ");
}

double mask_integral(const IntensityGrid& g) {
  const auto& d = g.grid.dims();
  double s = 0;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!g.grid.inside(i, j)) continue;
      const std::size_t base = (static_cast<std::size_t>(i) * d[1] + j) * d[2];
      for (int k = 0; k < d[2]; ++k) s += g.lambda[base + k];
    }
  return s * g.grid.voxel_volume();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double elapsed(std::chrono::steady_clock::time_point tic) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
}

void append_real(std::string& line, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  line.append(buf, res.ptr);
}

}  // namespace

double ise_density_scale(const IntensityGrid& fhat, const IntensityGrid& f) {
  require_same_grid(fhat.grid, f.grid);
  const double ia = mask_integral(fhat);
  const double ib = mask_integral(f);
  if (!(ia > 0) || !(ib > 0))
    throw std::invalid_argument("field does not integrate to a positive value");
  const auto& d = fhat.grid.dims();
  double s = 0;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!fhat.grid.inside(i, j)) continue;
      const std::size_t base = (static_cast<std::size_t>(i) * d[1] + j) * d[2];
      for (int k = 0; k < d[2]; ++k) {
        const double diff = fhat.lambda[base + k] / ia - f.lambda[base + k] / ib;
        s += diff * diff;
      }
    }
  return s * fhat.grid.voxel_volume();
}

Polygon benchmark_window() {
  return Polygon(
      {{0.05, 0.15}, {0.45, 0.02}, {0.95, 0.12}, {0.98, 0.62}, {0.72, 0.97}, {0.25, 0.9}, {0.02, 0.55}});
}

std::vector<BenchmarkRecord> run_bins_experiment(int n_patterns, const GneitingParams& params,
                                                 const std::vector<std::pair<double, double>>& xi_grid,
                                                 const std::array<int, 3>& dims, std::uint64_t seed) {
  if (n_patterns <= 0) throw std::invalid_argument("n_patterns must be positive");
  if (xi_grid.empty()) throw std::invalid_argument("xi_grid must not be empty");

  SimConfig cfg{params, benchmark_window(), TimeInterval(0, 1), dims, seed};

  std::vector<BenchmarkRecord> out;
  out.reserve(static_cast<std::size_t>(n_patterns) * xi_grid.size());
  for (int id = 0; id < n_patterns; ++id) {
    try {
      cfg.seed = seed + static_cast<std::uint64_t>(id);
      const LgcpRealisation real = simulate_lgcp(cfg);
      const PointPattern& pat = real.pattern;
      const Grid3& grid = real.truth.grid;

      std::vector<double> times;
      times.reserve(pat.size());
      for (const auto& p : pat.points()) times.push_back(p.t);
      const GlobalBandwidths global{oversmooth_bandwidth(pat), temporal_plugin_bandwidth(times)};
      const PilotIntensities pilots = pilot_intensities(pat, global, grid);
      const AdaptiveBandwidths bw = abramson_bandwidths(pat, global, pilots);

      auto tic = std::chrono::steady_clock::now();
      const IntensityGrid direct = estimate_adaptive_direct(pat, bw, pilots, grid);
      const double t_direct = elapsed(tic);

      for (const auto& [xi1, xi2] : xi_grid) {
        tic = std::chrono::steady_clock::now();
        const PartitionScheme scheme = build_partition(bw, xi1, xi2);
        const IntensityGrid part = estimate_adaptive_partition(pat, bw, scheme, grid);
        const double t_part = elapsed(tic);

        BenchmarkRecord r;
        r.pattern_id = id;
        r.n = pat.size();
        r.dims = dims;
        r.xi1 = xi1;
        r.xi2 = xi2;
        r.ise = ise_density_scale(part, direct);
        r.time_partition_s = t_part;
        r.time_direct_s = t_direct;
        r.seed = cfg.seed;
        out.push_back(r);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("pattern " + std::to_string(id) + ": " + e.what());
    }
  }
  return out;
}

bool median_ise_monotone(const std::vector<BenchmarkRecord>& records) {
  std::map<std::pair<double, double>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.xi1, r.xi2}].push_back(r.ise);
  std::vector<std::pair<std::pair<double, double>, double>> med;
  med.reserve(groups.size());
  for (auto& [xi, v] : groups) med.emplace_back(xi, median(std::move(v)));
  for (const auto& fine : med)
    for (const auto& coarse : med) {
      if (fine.first == coarse.first) continue;
      if (fine.first.first <= coarse.first.first && fine.first.second <= coarse.first.second &&
          fine.second > coarse.second)
        return false;
    }
  return true;
}

void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << "pattern_id,n,m1,m2,m3,xi1,xi2,ise,time_partition_s,time_direct_s,seed\n";
  for (const auto& r : records) {
    std::string line;
    line += std::to_string(r.pattern_id);
    line += ',';
    line += std::to_string(r.n);
    for (int m : r.dims) {
      line += ',';
      line += std::to_string(m);
    }
    line += ',';
    append_real(line, r.xi1);
    line += ',';
    append_real(line, r.xi2);
    line += ',';
    append_real(line, r.ise);
    line += ',';
    append_real(line, r.time_partition_s);
    line += ',';
    append_real(line, r.time_direct_s);
    line += ',';
    line += std::to_string(r.seed);
    line += '\n';
    out << line;
  }
}

}  // namespace stkde
