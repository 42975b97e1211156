#include "abreuflow/snapshot_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "abreuflow/error.hpp"

namespace abreuflow {

namespace {

const char* kMagic = "ABREUFLOW-SNAP";

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::kSnapshotMalformed, "snapshot malformed: " + what);
}

template <class T>
T read_value(std::istream& in, const std::string& what) {
  T x{};
  if (!(in >> x)) malformed("expected " + what);
  return x;
}

void expect_word(std::istream& in, const std::string& word) {
  std::string w;
  if (!(in >> w) || w != word) malformed("expected '" + word + "'");
}

double read_real(std::istream& in, const std::string& what) {
  std::string tok;
  if (!(in >> tok)) malformed("expected " + what);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || !std::isfinite(v)) malformed("bad number for " + what);
  return v;
}

}  // namespace

std::string format_snapshot(const PotentialField& f, double t, double integrated_dissipation) {
  const Grid& g = *f.grid;
  const DelzantPolygon& p = *f.polygon;
  std::string s = std::string(kMagic) + " v1\n";
  s += "polygon " + p.hash() + " " + std::to_string(p.edges.size()) + "\n";
  for (const auto& e : p.edges) s += std::to_string(e.nx) + " " + std::to_string(e.ny) + " " + fmt(e.c) + "\n";
  s += "reference " + to_string(f.reference) + "\n";
  s += "time " + fmt(t) + "\n";
  s += "integrated_dissipation " + fmt(integrated_dissipation) + "\n";
  s += "origin " + fmt(g.origin.x) + " " + fmt(g.origin.y) + "\n";
  s += "h " + fmt(g.h) + "\n";
  s += "dims " + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n";
  s += "collar_width " + std::to_string(g.collar_width) + "\n";
  s += "values\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) s += ' ';
      s += fmt(g.in_polygon(i, j) ? f.v[g.index(i, j)] : 0.0);
    }
    s += '\n';
  }
  s += "end\n";
  return s;
}

void write_snapshot(const std::string& path, const PotentialField& f, double t, double integrated_dissipation) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(Errc::kIo, "cannot write snapshot " + path);
    out << format_snapshot(f, t, integrated_dissipation);
    if (!out) throw Error(Errc::kIo, "write failed for snapshot " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(Errc::kIo, "cannot rename snapshot onto " + path);
}

StoredState parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string magic, version;
  if (!(in >> magic >> version) || magic != kMagic) malformed("missing header");
  if (version != "v1") throw Error(Errc::kSnapshotVersion, "snapshot version mismatch: " + version + " (expected v1)");
  expect_word(in, "polygon");
  const std::string hash = read_value<std::string>(in, "polygon hash");
  const int n = read_value<int>(in, "edge count");
  if (n < 3 || n > 1000) malformed("edge count");
  std::vector<Edge> edges(n);
  for (auto& e : edges) {
    e.nx = read_value<int>(in, "normal");
    e.ny = read_value<int>(in, "normal");
    e.c = read_real(in, "offset");
  }
  std::shared_ptr<const DelzantPolygon> poly;
  try {
    poly = std::make_shared<const DelzantPolygon>(make_polygon(edges));
  } catch (const Error& e) {
    malformed(e.what());
  }
  if (poly->hash() != hash) malformed("polygon hash does not match its edges");
  expect_word(in, "reference");
  const std::string ref_name = read_value<std::string>(in, "reference");
  if (ref_name != to_string(Reference::kGuillemin) && ref_name != to_string(Reference::kNone)) malformed("reference");
  const Reference ref = reference_from_string(ref_name);
  StoredState st;
  expect_word(in, "time");
  st.t = read_real(in, "time");
  expect_word(in, "integrated_dissipation");
  st.integrated_dissipation = read_real(in, "integrated dissipation");
  expect_word(in, "origin");
  Vec2 origin;
  origin.x = read_real(in, "origin");
  origin.y = read_real(in, "origin");
  expect_word(in, "h");
  const double h = read_real(in, "h");
  expect_word(in, "dims");
  const int nx = read_value<int>(in, "nx"), ny = read_value<int>(in, "ny");
  if (nx < 1 || ny < 1 || double(nx) * ny > 1e8) malformed("dims");
  expect_word(in, "collar_width");
  const int collar = read_value<int>(in, "collar width");
  expect_word(in, "values");
  std::shared_ptr<const Grid> grid;
  try {
    grid = std::make_shared<const Grid>(make_grid(*poly, origin, h, nx, ny, collar));
  } catch (const Error& e) {
    malformed(e.what());
  }
  st.field = make_field(poly, grid, ref);
  for (int idx = 0; idx < grid->size(); ++idx) st.field.v[idx] = read_real(in, "node value");
  expect_word(in, "end");
  return st;
}

StoredState read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::kIo, "cannot read snapshot " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_snapshot(ss.str());
}

}  // namespace abreuflow
