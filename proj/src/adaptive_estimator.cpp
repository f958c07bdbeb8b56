#include "stkde/adaptive_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stkde/fixed_estimator.hpp"
#include "stkde/kernels.hpp"
#include "stkde/parallel.hpp"
#include "stkde/stats.hpp"

namespace stkde {

namespace {

// Fixed number of accumulation lanes; bin q goes to lane q mod kSlots and
// lanes are reduced in order, so totals are identical for any thread count.
constexpr int kSlots = 16;

int quantile_bin_count(double xi) {
  if (!(xi > 0) || xi > 1) throw std::invalid_argument("quantile step must lie in (0, 1]");
  int c = static_cast<int>(std::lround(1.0 / xi));
  if (c < 1 || std::abs(c * xi - 1.0) > 1e-9)
    throw std::invalid_argument("1/xi must be an integer");
  return c;
}

std::vector<double> quantile_edges(const std::vector<double>& values, double xi, int c) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges(static_cast<std::size_t>(c) + 1);
  for (int j = 0; j <= c; ++j) edges[j] = quantile_sorted(sorted, j == c ? 1.0 : j * xi);
  return edges;
}

std::vector<int> assign_bins(const std::vector<double>& values, const std::vector<double>& edges) {
  const auto last = static_cast<std::ptrdiff_t>(edges.size()) - 2;
  std::vector<int> bin(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto it = std::lower_bound(edges.begin() + 1, edges.end(), values[i]);
    bin[i] = static_cast<int>(std::min(it - (edges.begin() + 1), last));
  }
  return bin;
}

std::vector<std::size_t> on_mask_voxels(const Grid3& grid) {
  const auto& d = grid.dims();
  std::vector<std::size_t> on;
  on.reserve(grid.n_inside());
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      for (int k = 0; k < d[2]; ++k)
        on.push_back((static_cast<std::size_t>(i) * d[1] + j) * d[2] + k);
    }
  return on;
}

// Kept out of the parallel_for lambda: inside the type-erased closure the
// compiler falls back to scalar exp instead of the vectorised one.
double gauss_sum(const double* X, const double* Y, const double* T, const double* AS,
                 const double* AT, const double* PK, std::size_t n, double tx, double ty,
                 double tt) {
  double acc = 0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t p = 0; p < n; ++p) {
    double dx = tx - X[p], dy = ty - Y[p], dt = tt - T[p];
    acc += PK[p] * std::exp(AS[p] * (dx * dx + dy * dy) + AT[p] * dt * dt);
  }
  return acc;
}

}  // namespace

PartitionScheme build_partition(const AdaptiveBandwidths& bw, double xi1, double xi2) {
  if (bw.eps.empty() || bw.eps.size() != bw.del.size())
    throw std::invalid_argument("build_partition: needs matching nonempty bandwidth vectors");
  const int c1 = quantile_bin_count(xi1), c2 = quantile_bin_count(xi2);
  PartitionScheme s;
  s.xi1 = xi1;
  s.xi2 = xi2;
  s.eps_edges = quantile_edges(bw.eps, xi1, c1);
  s.del_edges = quantile_edges(bw.del, xi2, c2);
  s.bin_s = assign_bins(bw.eps, s.eps_edges);
  s.bin_t = assign_bins(bw.del, s.del_edges);
  s.eps_mid.resize(c1);
  for (int a = 0; a < c1; ++a) s.eps_mid[a] = 0.5 * (s.eps_edges[a] + s.eps_edges[a + 1]);
  s.del_mid.resize(c2);
  for (int b = 0; b < c2; ++b) s.del_mid[b] = 0.5 * (s.del_edges[b] + s.del_edges[b + 1]);
  return s;
}

IntensityGrid estimate_adaptive_partition(const PointPattern& pattern, const AdaptiveBandwidths& bw,
                                          const PartitionScheme& scheme, const Grid3& grid,
                                          int threads) {
  const std::size_t n = pattern.size();
  if (bw.eps.size() != n || scheme.bin_s.size() != n || scheme.bin_t.size() != n)
    throw std::invalid_argument("estimate_adaptive_partition: scheme does not match the pattern");

  const int c2 = scheme.c2();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(scheme.c1()) * c2);
  for (std::size_t i = 0; i < n; ++i)
    members[static_cast<std::size_t>(scheme.bin_s[i]) * c2 + scheme.bin_t[i]].push_back(i);

  std::vector<std::size_t> used;
  std::size_t assigned = 0;
  for (std::size_t q = 0; q < members.size(); ++q) {
    if (members[q].empty()) continue;
    used.push_back(q);
    assigned += members[q].size();
    check_aliasing_bound(
        KernelSpec(scheme.eps_mid[q / c2], scheme.del_mid[q % c2]), grid);
  }
  if (assigned != n)
    throw std::logic_error("estimate_adaptive_partition: partition does not cover the pattern");

  EstimateInfo info;
  info.method = "adaptive-partition";
  info.n = n;
  info.eps_star = bw.eps_star;
  info.delta_star = bw.delta_star;
  info.xi1 = scheme.xi1;
  info.xi2 = scheme.xi2;

  const auto& d = grid.dims();
  IntensityGrid out{grid, GridArray(d, 3), GridArray(d, 3), std::move(info)};
  if (used.empty()) {
    for (std::size_t v : on_mask_voxels(grid)) out.edge[v] = 1.0;
    return out;
  }

  const FixedFftContext ctx = make_fixed_fft_context(grid);
  const std::vector<std::size_t> on = on_mask_voxels(grid);
  const auto& pts = pattern.points();

  const std::size_t nslots = std::min<std::size_t>(kSlots, used.size());
  std::vector<GridArray> slot_num, slot_lam;
  for (std::size_t s = 0; s < nslots; ++s) {
    slot_num.emplace_back(d, 3);
    slot_lam.emplace_back(d, 3);
  }

  parallel_for(nslots, threads, [&](std::size_t sb, std::size_t se) {
    for (std::size_t s = sb; s < se; ++s) {
      GridArray& sn = slot_num[s];
      GridArray& sl = slot_lam[s];
      for (std::size_t u = s; u < used.size(); u += kSlots) {
        const std::size_t q = used[u];
        GridArray w(d, 3);
        for (std::size_t i : members[q]) {
          std::array<int, 3> idx;
          if (!voxel_of(grid, pts[i], idx))
            throw std::invalid_argument("estimate_adaptive_partition: point outside grid extent");
          w.at(idx[0], idx[1], idx[2]) += 1.0;
        }
        KernelSpec kern(scheme.eps_mid[q / c2], scheme.del_mid[q % c2]);
        FixedFields f = fixed_fft_fields(ctx, w, kern);
        for (std::size_t v : on) {
          sn[v] += f.num[v];
          sl[v] += f.num[v] / std::max(f.edge[v], kEdgeFloor);
        }
      }
    }
  });

  GridArray num(d, 3);
  for (std::size_t s = 0; s < nslots; ++s)
    for (std::size_t v : on) {
      num[v] += slot_num[s][v];
      out.lambda[v] += slot_lam[s][v];
    }
  for (std::size_t v : on) out.edge[v] = out.lambda[v] > 0 ? num[v] / out.lambda[v] : 1.0;
  return out;
}

IntensityGrid estimate_adaptive_direct(const PointPattern& pattern, const AdaptiveBandwidths& bw,
                                       const PilotIntensities& pilots, const Grid3& grid,
                                       int threads) {
  const std::size_t n = pattern.size();
  if (bw.eps.size() != n || bw.del.size() != n)
    throw std::invalid_argument("estimate_adaptive_direct: bandwidths do not match the pattern");
  const auto& d = grid.dims();
  if (pilots.spatial.field.dims()[0] != d[0] || pilots.spatial.field.dims()[1] != d[1] ||
      pilots.temporal.field.dims()[0] != d[2])
    throw std::invalid_argument("estimate_adaptive_direct: pilot fields do not match the grid");

  EstimateInfo info;
  info.method = "adaptive-direct";
  info.n = n;
  info.eps_star = bw.eps_star;
  info.delta_star = bw.delta_star;

  if (n == 0) {
    IntensityGrid out{grid, GridArray(d, 3), GridArray(d, 3), std::move(info)};
    for (std::size_t v : on_mask_voxels(grid)) out.edge[v] = 1.0;
    return out;
  }

  const std::vector<double> ef =
      abramson_field(pilots.spatial.field, bw.gamma_s, bw.eps_star, n, bw.cap_s);
  const std::vector<double> df =
      abramson_field(pilots.temporal.field, bw.gamma_t, bw.delta_star, n, bw.cap_t);

  const auto& pts = pattern.points();
  std::vector<double> px(n), py(n), pt(n), pas(n), pat(n), ppk(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = pts[i].x;
    py[i] = pts[i].y;
    pt[i] = pts[i].t;
    pas[i] = -1.0 / (2 * bw.eps[i] * bw.eps[i]);
    pat[i] = -1.0 / (2 * bw.del[i] * bw.del[i]);
    ppk[i] = kernel_peak(KernelSpec(bw.eps[i], bw.del[i]));
  }

  std::vector<double> sx, sy, st, sas, sat, spk;
  double eps_max = *std::max_element(bw.eps.begin(), bw.eps.end());
  double del_max = *std::max_element(bw.del.begin(), bw.del.end());
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      const double e = ef[static_cast<std::size_t>(i) * d[1] + j];
      eps_max = std::max(eps_max, e);
      for (int k = 0; k < d[2]; ++k) {
        const double dl = df[k];
        del_max = std::max(del_max, dl);
        sx.push_back(grid.cx(i));
        sy.push_back(grid.cy(j));
        st.push_back(grid.ct(k));
        sas.push_back(-1.0 / (2 * e * e));
        sat.push_back(-1.0 / (2 * dl * dl));
        spk.push_back(kernel_peak(KernelSpec(e, dl)));
      }
    }
  check_aliasing_bound(KernelSpec(eps_max, del_max), grid);

  const std::vector<std::size_t> targets = on_mask_voxels(grid);
  const std::size_t ns = sx.size();
  const double v = grid.voxel_volume();
  GridArray num(d, 3), edge(d, 3);
  const double* PX = px.data();
  const double* PY = py.data();
  const double* PT = pt.data();
  const double* PAS = pas.data();
  const double* PAT = pat.data();
  const double* PPK = ppk.data();
  const double* SX = sx.data();
  const double* SY = sy.data();
  const double* ST = st.data();
  const double* SAS = sas.data();
  const double* SAT = sat.data();
  const double* SPK = spk.data();

  parallel_for(targets.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t ti = b; ti < e; ++ti) {
      std::size_t flat = targets[ti];
      int i = static_cast<int>(flat / (static_cast<std::size_t>(d[1]) * d[2]));
      int j = static_cast<int>((flat / d[2]) % d[1]);
      int k = static_cast<int>(flat % d[2]);
      const double tx = grid.cx(i), ty = grid.cy(j), tt = grid.ct(k);

      num[flat] = gauss_sum(PX, PY, PT, PAS, PAT, PPK, n, tx, ty, tt);
      edge[flat] = gauss_sum(SX, SY, ST, SAS, SAT, SPK, ns, tx, ty, tt) * v;
    }
  });

  return assemble_ratio(grid, num, edge, std::move(info));
}

}  // namespace stkde
