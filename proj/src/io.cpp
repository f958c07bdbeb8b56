#include "stkde/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace stkde {

static_assert(std::endian::native == std::endian::little, "grid payload is little-endian");

namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trimmed(line.substr(start, comma - start)));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

double parse_real(const std::string& tok, std::size_t line_no) {
  double x = 0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("line " + std::to_string(line_no) + ": bad value '" + tok + "'");
  return x;
}

// header-checked CSV of real-valued rows; unused trailing fields stay zero
std::vector<std::array<double, 3>> read_csv_rows(const std::string& path, const std::string& header,
                                                 int nfields) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::array<double, 3>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (line_no == 1) {
      std::string compact;
      for (char c : t)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != header)
        throw std::invalid_argument("line 1: expected header " + header);
      continue;
    }
    if (t.empty()) continue;
    const auto fields = split_fields(t);
    if (static_cast<int>(fields.size()) != nfields)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(nfields) + " fields");
    std::array<double, 3> row{0, 0, 0};
    for (int f = 0; f < nfields; ++f) row[f] = parse_real(fields[f], line_no);
    rows.push_back(row);
  }
  return rows;
}

void append_real(std::string& line, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  line.append(buf, res.ptr);
}

constexpr double kRad = std::numbers::pi / 180.0;

void check_latitude(double deg, const char* what) {
  if (!(deg > -90.0 && deg < 90.0))
    throw std::invalid_argument(std::string(what) + " must lie in (-90, 90) degrees");
}

}  // namespace

PatternReadResult read_pattern(const std::string& path, const Polygon& window,
                               const TimeInterval& interval, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<Point3> pts;
  std::size_t dropped = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (line_no == 1) {
      std::string compact;
      for (char c : t)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != "x,y,t") throw std::invalid_argument("line 1: expected header x,y,t");
      continue;
    }
    if (t.empty()) continue;
    const auto fields = split_fields(t);
    if (fields.size() != 3)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 3 fields");
    const Point3 p{parse_real(fields[0], line_no), parse_real(fields[1], line_no),
                   parse_real(fields[2], line_no)};
    if (!window.contains(p.x, p.y) || !interval.contains(p.t)) {
      if (strict)
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": point outside the observation window");
      ++dropped;
      continue;
    }
    pts.push_back(p);
  }
  return {PointPattern(std::move(pts), window, interval), dropped};
}

void write_pattern(const std::string& path, const PointPattern& pattern) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,t\n";
  for (const auto& p : pattern.points()) {
    std::string line;
    append_real(line, p.x);
    line += ',';
    append_real(line, p.y);
    line += ',';
    append_real(line, p.t);
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("cannot write " + path);
}

Polygon read_polygon(const std::string& path) {
  std::vector<Point2> v;
  for (const auto& row : read_csv_rows(path, "x,y", 2)) v.push_back({row[0], row[1]});
  return Polygon(std::move(v));
}

std::vector<Point2> read_lonlat(const std::string& path) {
  std::vector<Point2> v;
  for (const auto& row : read_csv_rows(path, "lon,lat", 2)) v.push_back({row[0], row[1]});
  return v;
}

std::vector<Point2> project_albers(const std::vector<Point2>& lonlat, const AlbersSpec& spec) {
  check_latitude(spec.phi1, "standard parallel");
  check_latitude(spec.phi2, "standard parallel");
  check_latitude(spec.phi0, "origin latitude");
  if (!(spec.radius > 0)) throw std::invalid_argument("sphere radius must be positive");
  const double n = 0.5 * (std::sin(spec.phi1 * kRad) + std::sin(spec.phi2 * kRad));
  if (spec.phi1 == -spec.phi2 || n == 0)
    throw std::invalid_argument("standard parallels must not be opposite");
  const double c = std::cos(spec.phi1 * kRad) * std::cos(spec.phi1 * kRad) +
                   2 * n * std::sin(spec.phi1 * kRad);
  const auto rho = [&](double lat_deg) {
    return spec.radius * std::sqrt(std::max(0.0, c - 2 * n * std::sin(lat_deg * kRad))) / n;
  };
  const double rho0 = rho(spec.phi0);

  std::vector<Point2> out;
  out.reserve(lonlat.size());
  for (const auto& p : lonlat) {
    check_latitude(p.y, "point latitude");
    const double theta = n * ((p.x - spec.lambda0) * kRad);
    const double r = rho(p.y);
    out.push_back({r * std::sin(theta), rho0 - r * std::cos(theta)});
  }
  return out;
}

std::pair<int, int> default_bin_counts(std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty pattern has no bin counts");
  const double nd = static_cast<double>(n);
  const auto rounded = [&](double r) {
    long c = std::lround(r);
    if (c < 1) c = 1;
    if (nd < static_cast<double>(c)) c = static_cast<long>(n);
    return static_cast<int>(c);
  };
  return {rounded(std::cbrt(nd)), rounded(std::pow(nd, 1.0 / 6.0))};
}

std::string mask_hash(const Grid3& grid) {
  std::uint64_t h = 1469598103934665603ull;
  const auto& d = grid.dims();
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j) {
      h ^= grid.inside(i, j) ? 1u : 0u;
      h *= 1099511628211ull;
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_grid(const IntensityGrid& g, const std::string& path) {
  nlohmann::json h;
  const auto& d = g.grid.dims();
  h["dims"] = {d[0], d[1], d[2]};
  h["step"] = {g.grid.step()[0], g.grid.step()[1], g.grid.step()[2]};
  h["origin"] = {g.grid.origin()[0], g.grid.origin()[1], g.grid.origin()[2]};
  h["estimator"] = g.info.method;
  h["n"] = g.info.n;
  h["eps"] = g.info.eps;
  h["delta"] = g.info.delta;
  h["eps_star"] = g.info.eps_star;
  h["delta_star"] = g.info.delta_star;
  h["xi1"] = g.info.xi1;
  h["xi2"] = g.info.xi2;
  h["mask_hash"] = mask_hash(g.grid);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << h.dump() << '\n';
  out.write(reinterpret_cast<const char*>(g.lambda.data()),
            static_cast<std::streamsize>(g.lambda.size() * sizeof(double)));
  if (!out) throw std::runtime_error("cannot write " + path);
}

GridFile read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("missing grid header");

  GridFile g;
  try {
    const nlohmann::json h = nlohmann::json::parse(header);
    for (int a = 0; a < 3; ++a) {
      g.dims[a] = h.at("dims").at(a).get<int>();
      g.step[a] = h.at("step").at(a).get<double>();
      g.origin[a] = h.at("origin").at(a).get<double>();
    }
    g.info.method = h.at("estimator").get<std::string>();
    g.info.n = h.at("n").get<std::size_t>();
    g.info.eps = h.at("eps").get<double>();
    g.info.delta = h.at("delta").get<double>();
    g.info.eps_star = h.at("eps_star").get<double>();
    g.info.delta_star = h.at("delta_star").get<double>();
    g.info.xi1 = h.at("xi1").get<double>();
    g.info.xi2 = h.at("xi2").get<double>();
    g.mask_hash = h.at("mask_hash").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("malformed grid header");
  }
  if (g.dims[0] < 1 || g.dims[1] < 1 || g.dims[2] < 1)
    throw std::invalid_argument("malformed grid header");

  g.values = GridArray(g.dims, 3);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != g.values.size() * sizeof(double) ||
      in.peek() != std::ifstream::traits_type::eof())
    throw std::invalid_argument("grid payload does not match the header dims");
  return g;
}

void write_csv_slices(const IntensityGrid& g, const std::string& base) {
  const auto& d = g.grid.dims();
  for (int k = 0; k < d[2]; ++k) {
    const std::string path = base + "_k" + std::to_string(k) + ".csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "x,y,value\n";
    for (int i = 0; i < d[0]; ++i)
      for (int j = 0; j < d[1]; ++j) {
        if (!g.grid.inside(i, j)) continue;
        std::string line;
        append_real(line, g.grid.cx(i));
        line += ',';
        append_real(line, g.grid.cy(j));
        line += ',';
        append_real(line, g.lambda.at(i, j, k));
        line += '\n';
        out << line;
      }
    if (!out) throw std::runtime_error("cannot write " + path);
  }
}

}  // namespace stkde
