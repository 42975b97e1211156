#include "abreuflow/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "abreuflow/error.hpp"

namespace abreuflow {

namespace {

[[noreturn]] void fail(int line, int col, const std::string& msg) {
  throw Error(Errc::kConfigParse, "config line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

double to_double(const std::string& s, int line, int col) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) fail(line, col, "expected a real number, got '" + s + "'");
  return v;
}

long long to_int(const std::string& s, int line, int col) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(line, col, "expected an integer, got '" + s + "'");
  return v;
}

std::string resolve(const std::string& base, const std::string& p) {
  if (base.empty() || p.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, int(first) + 1, "expected 'key = value'");
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    if (vstart == std::string::npos) fail(lineno, int(eq) + 2, "missing value for '" + key + "'");
    std::string value = line.substr(vstart);
    value.erase(value.find_last_not_of(" \t\r") + 1);
    const int kc = int(first) + 1, vc = int(vstart) + 1;
    if (!seen.insert(key).second) fail(lineno, kc, "duplicate key '" + key + "'");

    if (key == "polygon") c.polygon = resolve(base_dir, value);
    else if (key == "h") c.h = to_double(value, lineno, vc);
    else if (key == "collar_width") c.collar_width = int(to_int(value, lineno, vc));
    else if (key == "epsilon0") c.epsilon0 = to_double(value, lineno, vc);
    else if (key == "t_end") c.t_end = to_double(value, lineno, vc);
    else if (key == "dt_initial") c.dt_initial = to_double(value, lineno, vc);
    else if (key == "c_cfl") c.c_cfl = to_double(value, lineno, vc);
    else if (key == "perturbation") {
      if (value != "none" && value != "sine" && value != "quadratic" && value != "random")
        fail(lineno, vc, "unknown perturbation '" + value + "' (none, sine, quadratic, random)");
      c.perturbation = value;
    } else if (key == "amplitude") c.amplitude = to_double(value, lineno, vc);
    else if (key == "seed") {
      const long long s = to_int(value, lineno, vc);
      if (s < 0) fail(lineno, vc, "seed must be non-negative");
      c.seed = std::uint64_t(s);
    } else if (key == "output_dir") c.output_dir = resolve(base_dir, value);
    else if (key == "diagnostics_cadence") c.diagnostics_cadence = int(to_int(value, lineno, vc));
    else if (key == "snapshot_cadence") c.snapshot_cadence = int(to_int(value, lineno, vc));
    else if (key == "geodesic_radius") c.geodesic_radius = int(to_int(value, lineno, vc));
    else if (key == "m_radius") c.m_radius = to_double(value, lineno, vc);
    else if (key == "m_directions") c.m_directions = int(to_int(value, lineno, vc));
    else if (key == "anchor_stride") c.anchor_stride = int(to_int(value, lineno, vc));
    else if (key == "threads") c.threads = int(to_int(value, lineno, vc));
    else if (key == "energy_tolerance") c.energy_tolerance = to_double(value, lineno, vc);
    else if (key == "reference") {
      if (value != "guillemin" && value != "none") fail(lineno, vc, "unknown reference '" + value + "'");
      c.reference = reference_from_string(value);
    } else fail(lineno, kc, "unknown key '" + key + "'");
  }
  for (const char* k : {"polygon", "h", "epsilon0", "t_end", "output_dir"})
    if (!seen.count(k)) fail(lineno + 1, 1, std::string("missing mandatory key '") + k + "'");
  auto positive = [&](const char* name, double v) {
    if (!(v > 0)) throw Error(Errc::kConfigParse, std::string("config: ") + name + " must be positive");
  };
  positive("h", c.h);
  positive("epsilon0", c.epsilon0);
  positive("t_end", c.t_end);
  positive("c_cfl", c.c_cfl);
  positive("m_radius", c.m_radius);
  positive("energy_tolerance", c.energy_tolerance);
  positive("diagnostics_cadence", c.diagnostics_cadence);
  positive("m_directions", c.m_directions);
  positive("anchor_stride", c.anchor_stride);
  positive("threads", c.threads);
  if (c.dt_initial < 0) throw Error(Errc::kConfigParse, "config: dt_initial must be non-negative");
  if (c.snapshot_cadence < 0) throw Error(Errc::kConfigParse, "config: snapshot_cadence must be non-negative");
  if (c.collar_width < 2) throw Error(Errc::kConfigParse, "config: collar_width must be at least 2");
  if (c.geodesic_radius != 1 && c.geodesic_radius != 2) throw Error(Errc::kConfigParse, "config: geodesic_radius must be 1 or 2");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::kIo, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_config(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["polygon"] = c.polygon;
  kv["h"] = fmt(c.h);
  kv["collar_width"] = std::to_string(c.collar_width);
  kv["epsilon0"] = fmt(c.epsilon0);
  kv["t_end"] = fmt(c.t_end);
  kv["dt_initial"] = fmt(c.dt_initial);
  kv["c_cfl"] = fmt(c.c_cfl);
  kv["perturbation"] = c.perturbation;
  kv["amplitude"] = fmt(c.amplitude);
  kv["seed"] = std::to_string(c.seed);
  kv["output_dir"] = c.output_dir;
  kv["diagnostics_cadence"] = std::to_string(c.diagnostics_cadence);
  kv["snapshot_cadence"] = std::to_string(c.snapshot_cadence);
  kv["geodesic_radius"] = std::to_string(c.geodesic_radius);
  kv["m_radius"] = fmt(c.m_radius);
  kv["m_directions"] = std::to_string(c.m_directions);
  kv["anchor_stride"] = std::to_string(c.anchor_stride);
  kv["threads"] = std::to_string(c.threads);
  kv["energy_tolerance"] = fmt(c.energy_tolerance);
  kv["reference"] = to_string(c.reference);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

void validate_config(const RunConfig& c, const DelzantPolygon& polygon) {
  if (!(c.epsilon0 < 0.5 * polygon.inradius()))
    throw Error(Errc::kEpsilonTooLarge, "epsilon too large: epsilon0 must be below half the inradius");
}

namespace {

double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void apply_perturbation(PotentialField& f, const std::string& family, double amplitude, std::uint64_t seed) {
  const Grid& g = *f.grid;
  const DelzantPolygon& p = *f.polygon;
  Vec2 lo = p.vertices[0], hi = p.vertices[0];
  for (const auto& v : p.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const Vec2 c = p.centroid();
  constexpr double kPi = 3.14159265358979323846;
  double coef[3][3] = {}, phase[3][3] = {};
  if (family == "random") {
    std::mt19937_64 rng(seed);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        coef[a][b] = (2.0 * uniform(rng) - 1.0) / double((a + 1) * (a + 1) + (b + 1) * (b + 1));
        phase[a][b] = 2.0 * kPi * uniform(rng);
      }
  } else if (family != "none" && family != "sine" && family != "quadratic") {
    throw Error(Errc::kConfigParse, "unknown perturbation family '" + family + "'");
  }
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!g.in_polygon(idx)) continue;
    const Vec2 x = g.position(idx);
    const double s = (x.x - lo.x) / (hi.x - lo.x), t = (x.y - lo.y) / (hi.y - lo.y);
    double v = 0.0;
    if (family == "sine") {
      v = std::sin(2 * kPi * s) * std::sin(2 * kPi * t);
    } else if (family == "quadratic") {
      const Vec2 d = x - c;
      v = 0.5 * dot(d, d);
    } else if (family == "random") {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) v += coef[a][b] * std::sin((a + 1) * kPi * s + phase[a][b]) * std::sin((b + 1) * kPi * t);
    }
    f.v[idx] += amplitude * v;
  }
}

}  // namespace abreuflow
