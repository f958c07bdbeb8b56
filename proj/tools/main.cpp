#include <array>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stkde/adaptive_estimator.hpp"
#include "stkde/bandwidths.hpp"
#include "stkde/eval.hpp"
#include "stkde/fixed_estimator.hpp"
#include "stkde/geometry.hpp"
#include "stkde/io.hpp"
#include "stkde/simulate.hpp"

namespace {

using nlohmann::json;
using namespace stkde;

// flat JSON object whose keys are long option names without the dashes; the
// config option lives on the top-level app (subcommand configs are never
// processed), so keys are rescoped to whichever subcommand is being parsed
class JsonConfig : public CLI::Config {
 public:
  std::string scope;

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::FileError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::FileError("config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, val] : j.items()) {
      CLI::ConfigItem item;
      if (!scope.empty()) item.parents.push_back(scope);
      item.name = key;
      if (val.is_array()) {
        for (const auto& v : val) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else {
        item.inputs.push_back(val.is_string() ? val.get<std::string>() : val.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

Polygon load_window(const std::string& path) {
  if (path.empty()) return Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  return read_polygon(path);
}

PointPattern load_pattern(const std::string& path, const Polygon& window, const TimeInterval& interval,
                          bool strict) {
  PatternReadResult res = read_pattern(path, window, interval, strict);
  if (res.dropped > 0)
    std::cerr << json{{"warning", "points outside the observation window were dropped"},
                      {"count", res.dropped}}
                     .dump()
              << "\n";
  return std::move(res.pattern);
}

std::vector<double> time_coords(const PointPattern& pattern) {
  std::vector<double> times;
  times.reserve(pattern.size());
  for (const auto& p : pattern.points()) times.push_back(p.t);
  return times;
}

GlobalBandwidths global_bandwidths(const PointPattern& pattern, double eps_star, double delta_star) {
  return {eps_star > 0 ? eps_star : oversmooth_bandwidth(pattern),
          delta_star > 0 ? delta_star : temporal_plugin_bandwidth(time_coords(pattern))};
}

std::vector<double> parse_step_list(const std::string& text) {
  std::vector<double> steps;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string tok = text.substr(start, comma - start);
    double x = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw std::invalid_argument("bad quantile step '" + tok + "'");
    steps.push_back(x);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (steps.empty()) throw std::invalid_argument("no quantile steps given");
  return steps;
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive space-time intensity estimation"};
  app.require_subcommand(1);
  const auto formatter = std::make_shared<JsonConfig>();
  app.config_formatter(formatter);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "JSON file with long option names as keys");

  const auto add_config = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->preparse_callback([formatter, name = sub->get_name()](std::size_t) { formatter->scope = name; });
  };

  // simulate
  struct {
    GneitingParams params;
    int m1 = 0, m2 = 0, m3 = 0;
    std::uint64_t seed = 0;
    double t0 = 0, t1 = 1;
    std::string window, out, truth_out;
  } sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "draw a log-Gaussian Cox pattern");
  c_sim->add_option("--mu", sim.params.mu, "expected point count")->required();
  c_sim->add_option("--sigma2", sim.params.sigma2, "field variance");
  c_sim->add_option("--c", sim.params.c, "spatial scale");
  c_sim->add_option("--a", sim.params.a, "temporal scale");
  c_sim->add_option("--alpha", sim.params.alpha, "temporal smoothness");
  c_sim->add_option("--beta", sim.params.beta, "interaction strength");
  c_sim->add_option("--psi-exponent", sim.params.psi_exponent, "separability exponent");
  c_sim->add_option("--m1", sim.m1, "grid cells, first spatial axis")->required();
  c_sim->add_option("--m2", sim.m2, "grid cells, second spatial axis")->required();
  c_sim->add_option("--m3", sim.m3, "grid cells, temporal axis")->required();
  c_sim->add_option("--seed", sim.seed, "simulation seed");
  c_sim->add_option("--t0", sim.t0, "interval start");
  c_sim->add_option("--t1", sim.t1, "interval end");
  c_sim->add_option("--window", sim.window, "polygon CSV (default unit square)");
  c_sim->add_option("--out", sim.out, "pattern CSV to write")->required();
  c_sim->add_option("--truth-out", sim.truth_out, "grid file for the intensity surface");
  add_config(c_sim);
  c_sim->callback([&] {
    const SimConfig cfg{sim.params, load_window(sim.window), TimeInterval(sim.t0, sim.t1),
                        {sim.m1, sim.m2, sim.m3}, sim.seed};
    const LgcpRealisation real = simulate_lgcp(cfg);
    write_pattern(sim.out, real.pattern);
    if (!sim.truth_out.empty()) write_grid(real.truth, sim.truth_out);
    emit({{"n", real.pattern.size()}, {"out", sim.out}});
  });

  // bandwidths
  struct {
    std::string points, window;
    double t0 = 0, t1 = 1;
    int c1 = 0, c2 = 0;
    bool strict = false;
  } bwc;
  CLI::App* c_bw = app.add_subcommand("bandwidths", "global bandwidths and group counts");
  c_bw->add_option("--points", bwc.points, "pattern CSV")->required();
  c_bw->add_option("--window", bwc.window, "polygon CSV")->required();
  c_bw->add_option("--t0", bwc.t0, "interval start");
  c_bw->add_option("--t1", bwc.t1, "interval end");
  c_bw->add_option("--c1", bwc.c1, "override spatial group count");
  c_bw->add_option("--c2", bwc.c2, "override temporal group count");
  c_bw->add_flag("--strict", bwc.strict, "error on points outside the window");
  add_config(c_bw);
  c_bw->callback([&] {
    const Polygon window = load_window(bwc.window);
    const PointPattern pat = load_pattern(bwc.points, window, TimeInterval(bwc.t0, bwc.t1), bwc.strict);
    const GlobalBandwidths global = global_bandwidths(pat, 0, 0);
    auto [c1, c2] = default_bin_counts(pat.size());
    if (bwc.c1 > 0) c1 = bwc.c1;
    if (bwc.c2 > 0) c2 = bwc.c2;
    emit({{"n", pat.size()},
          {"eps_star", global.eps_star},
          {"delta_star", global.delta_star},
          {"c1", c1},
          {"c2", c2},
          {"xi1", 1.0 / c1},
          {"xi2", 1.0 / c2}});
  });

  // estimate
  struct {
    std::string points, window, method, out, slices;
    double t0 = 0, t1 = 1;
    int m1 = 0, m2 = 0, m3 = 0, threads = 0;
    double xi1 = 0, xi2 = 0, eps_star = 0, delta_star = 0;
    bool strict = false;
  } est;
  CLI::App* c_est = app.add_subcommand("estimate", "estimate the intensity on a grid");
  c_est->add_option("--points", est.points, "pattern CSV")->required();
  c_est->add_option("--window", est.window, "polygon CSV")->required();
  c_est->add_option("--t0", est.t0, "interval start");
  c_est->add_option("--t1", est.t1, "interval end");
  c_est->add_option("--m1", est.m1, "grid cells, first spatial axis")->required();
  c_est->add_option("--m2", est.m2, "grid cells, second spatial axis")->required();
  c_est->add_option("--m3", est.m3, "grid cells, temporal axis")->required();
  c_est->add_option("--method", est.method, "fixed | adaptive-direct | adaptive-partition")
      ->required()
      ->check(CLI::IsMember({"fixed", "adaptive-direct", "adaptive-partition"}));
  c_est->add_option("--xi1", est.xi1, "spatial quantile step (default from the group rule)");
  c_est->add_option("--xi2", est.xi2, "temporal quantile step (default from the group rule)");
  c_est->add_option("--eps-star", est.eps_star, "override the spatial global bandwidth");
  c_est->add_option("--delta-star", est.delta_star, "override the temporal global bandwidth");
  c_est->add_option("--threads", est.threads, "worker threads (0 = hardware)");
  c_est->add_flag("--strict", est.strict, "error on points outside the window");
  c_est->add_option("--out", est.out, "grid file to write")->required();
  c_est->add_option("--csv-slices", est.slices, "also write per-time-slice CSVs at this base path");
  add_config(c_est);
  c_est->callback([&] {
    const Polygon window = load_window(est.window);
    const TimeInterval interval(est.t0, est.t1);
    const PointPattern pat = load_pattern(est.points, window, interval, est.strict);
    const Grid3 grid(window, interval, {est.m1, est.m2, est.m3});
    IntensityGrid result{grid, GridArray(grid.dims(), 3), GridArray(grid.dims(), 3), {}};
    if (est.method == "fixed") {
      const GlobalBandwidths global = global_bandwidths(pat, est.eps_star, est.delta_star);
      result = estimate_fixed_fft(bin_points(pat, grid), KernelSpec(global.eps_star, global.delta_star));
    } else {
      const GlobalBandwidths global = global_bandwidths(pat, est.eps_star, est.delta_star);
      const PilotIntensities pilots = pilot_intensities(pat, global, grid);
      const AdaptiveBandwidths bw = abramson_bandwidths(pat, global, pilots);
      if (est.method == "adaptive-direct") {
        result = estimate_adaptive_direct(pat, bw, pilots, grid, est.threads);
      } else {
        double xi1 = est.xi1, xi2 = est.xi2;
        if (xi1 <= 0 || xi2 <= 0) {
          const auto [c1, c2] = default_bin_counts(pat.size());
          if (xi1 <= 0) xi1 = 1.0 / c1;
          if (xi2 <= 0) xi2 = 1.0 / c2;
        }
        const PartitionScheme scheme = build_partition(bw, xi1, xi2);
        result = estimate_adaptive_partition(pat, bw, scheme, grid, est.threads);
      }
    }
    write_grid(result, est.out);
    if (!est.slices.empty()) write_csv_slices(result, est.slices);
    emit({{"method", result.info.method}, {"n", result.info.n}, {"out", est.out}});
  });

  // bench-bins
  struct {
    GneitingParams params;
    int patterns = 1, m1 = 0, m2 = 0, m3 = 0;
    std::uint64_t seed = 0;
    std::string xi_steps, out;
    bool diagonal = false;
  } bb;
  CLI::App* c_bb = app.add_subcommand("bench-bins", "partition-vs-direct benchmark records");
  c_bb->add_option("--mu", bb.params.mu, "expected point count")->required();
  c_bb->add_option("--sigma2", bb.params.sigma2, "field variance");
  c_bb->add_option("--c", bb.params.c, "spatial scale");
  c_bb->add_option("--a", bb.params.a, "temporal scale");
  c_bb->add_option("--alpha", bb.params.alpha, "temporal smoothness");
  c_bb->add_option("--beta", bb.params.beta, "interaction strength");
  c_bb->add_option("--psi-exponent", bb.params.psi_exponent, "separability exponent");
  c_bb->add_option("--patterns", bb.patterns, "number of replications");
  c_bb->add_option("--m1", bb.m1, "grid cells, first spatial axis")->required();
  c_bb->add_option("--m2", bb.m2, "grid cells, second spatial axis")->required();
  c_bb->add_option("--m3", bb.m3, "grid cells, temporal axis")->required();
  c_bb->add_option("--xi-steps", bb.xi_steps, "comma-separated quantile steps")->required();
  c_bb->add_flag("--diagonal", bb.diagonal, "equal steps only instead of all combinations");
  c_bb->add_option("--seed", bb.seed, "base seed, advanced per pattern");
  c_bb->add_option("--out", bb.out, "records CSV to write")->required();
  add_config(c_bb);
  c_bb->callback([&] {
    const std::vector<double> steps = parse_step_list(bb.xi_steps);
    std::vector<std::pair<double, double>> xi_grid;
    if (bb.diagonal) {
      for (double s : steps) xi_grid.emplace_back(s, s);
    } else {
      for (double s1 : steps)
        for (double s2 : steps) xi_grid.emplace_back(s1, s2);
    }
    const auto records =
        run_bins_experiment(bb.patterns, bb.params, xi_grid, {bb.m1, bb.m2, bb.m3}, bb.seed);
    std::ofstream out(bb.out);
    if (!out) throw std::runtime_error("cannot write " + bb.out);
    write_records_csv(out, records);
    if (!out) throw std::runtime_error("cannot write " + bb.out);
    emit({{"records", records.size()},
          {"median_ise_monotone", median_ise_monotone(records)},
          {"out", bb.out}});
  });

  // project
  struct {
    std::string points, out;
    AlbersSpec spec;
  } prj;
  CLI::App* c_prj = app.add_subcommand("project", "Albers equal-area projection of lon/lat points");
  c_prj->add_option("--points", prj.points, "CSV with header lon,lat")->required();
  c_prj->add_option("--phi1", prj.spec.phi1, "first standard parallel")->required();
  c_prj->add_option("--phi2", prj.spec.phi2, "second standard parallel")->required();
  c_prj->add_option("--phi0", prj.spec.phi0, "origin latitude");
  c_prj->add_option("--lambda0", prj.spec.lambda0, "origin longitude");
  c_prj->add_option("--radius", prj.spec.radius, "sphere radius (sets output units)");
  c_prj->add_option("--out", prj.out, "planar CSV to write")->required();
  add_config(c_prj);
  c_prj->callback([&] {
    const std::vector<Point2> planar = project_albers(read_lonlat(prj.points), prj.spec);
    std::ofstream out(prj.out);
    if (!out) throw std::runtime_error("cannot write " + prj.out);
    out << "x,y\n";
    for (const auto& p : planar) {
      char buf[70];
      char* ptr = buf;
      ptr = std::to_chars(ptr, buf + sizeof buf, p.x).ptr;
      *ptr++ = ',';
      ptr = std::to_chars(ptr, buf + sizeof buf, p.y).ptr;
      *ptr++ = '\n';
      out.write(buf, ptr - buf);
    }
    if (!out) throw std::runtime_error("cannot write " + prj.out);
    emit({{"n", planar.size()}, {"out", prj.out}});
  });

  // ise
  struct {
    std::string a, b, window;
  } cmp;
  CLI::App* c_ise = app.add_subcommand("ise", "density-scale ISE between two grid files");
  c_ise->add_option("--a", cmp.a, "first grid file")->required();
  c_ise->add_option("--b", cmp.b, "second grid file")->required();
  c_ise->add_option("--window", cmp.window, "polygon CSV the grids were built on")->required();
  add_config(c_ise);
  c_ise->callback([&] {
    const GridFile fa = read_grid(cmp.a);
    const GridFile fb = read_grid(cmp.b);
    if (fa.dims != fb.dims || fa.step != fb.step || fa.origin != fb.origin ||
        fa.mask_hash != fb.mask_hash)
      throw std::invalid_argument("grid files do not share a grid");
    const Polygon window = read_polygon(cmp.window);
    const TimeInterval interval(fa.origin[2], fa.origin[2] + fa.step[2] * fa.dims[2]);
    const Grid3 grid(window, interval, fa.dims);
    for (int axis = 0; axis < 3; ++axis) {
      const double tol = 1e-9 * std::max(1.0, std::abs(fa.step[axis]));
      if (std::abs(grid.step()[axis] - fa.step[axis]) > tol ||
          std::abs(grid.origin()[axis] - fa.origin[axis]) > tol)
        throw std::invalid_argument("window does not match the grid files");
    }
    if (mask_hash(grid) != fa.mask_hash)
      throw std::invalid_argument("window does not match the grid files");
    const IntensityGrid ga{grid, fa.values, GridArray(fa.dims, 3), fa.info};
    const IntensityGrid gb{grid, fb.values, GridArray(fb.dims, 3), fb.info};
    emit({{"ise", ise_density_scale(ga, gb)}});
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
