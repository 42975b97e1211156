#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "json.hpp"

#include "abreuflow/commands.hpp"
#include "abreuflow/error.hpp"
#include "abreuflow/snapshot_io.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace abreuflow;
using namespace testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kConfigParse);
    return e.what();
  }
  return "";
}

const char* kMinimal = "polygon = square.poly\nh = 0.03125\nepsilon0 = 0.2\nt_end = 1e-6\noutput_dir = out\n";

std::string config_text(const fs::path& out, const std::string& extra) {
  return "polygon = " + data_path("square.poly") + "\nh = 0.03125\nepsilon0 = 0.2\noutput_dir = " + out.string() +
         "\n" + extra;
}

std::string data_lines(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  int seen = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && seen++ > 0) out += line + "\n";
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ABREUFLOW_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(std::string("# comment\n") + kMinimal + "threads = 2  # trailing\nreference = none\n",
                                   "/base");
  CHECK(c.polygon == "/base/square.poly");
  CHECK(c.output_dir == "/base/out");
  CHECK(c.h == 0.03125);
  CHECK(c.threads == 2);
  CHECK(c.reference == Reference::kNone);
  CHECK(c.c_cfl == 0.15);
  CHECK(c.diagnostics_cadence == 100);

  CHECK(parse_error(std::string(kMinimal) + "bogus = 1\n").find("line 6, column 1") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "bogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "h = 0.5\n").find("duplicate key 'h'") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "  c_cfl = abc\n").find("line 6, column 11") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "threads\n").find("expected 'key = value'") != std::string::npos);
  CHECK(parse_error("h = 0.1\n").find("missing mandatory key") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "perturbation = cosine\n").find("unknown perturbation") != std::string::npos);
  CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "c_cfl = -1\n"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), Error);
}

TEST_CASE("config round trip through the canonical form") {
  const RunConfig c = parse_config(std::string(kMinimal) + "amplitude = 0.1\nseed = 42\nperturbation = random\n", "/b");
  const std::string canon = serialize_config(c);
  const RunConfig d = parse_config(canon);
  CHECK(d == c);
  CHECK(serialize_config(d) == canon);
  CHECK(canon.find("amplitude = 0.10000000000000001\n") != std::string::npos);
}

TEST_CASE("snapshot round trip and corruption") {
  const PotentialField p = sampled_field(square_edges(), 1.0 / 16, Reference::kGuillemin, [](Vec2 x) {
    return 0.01 * std::sin(2 * kPi * x.x) * std::cos(kPi * x.y) + 1.0 / 3.0;
  });
  const std::string text = format_snapshot(p, 0.125, 1.0 / 7.0);
  const StoredState s = parse_snapshot(text);
  CHECK(s.t == 0.125);
  CHECK(s.integrated_dissipation == 1.0 / 7.0);
  CHECK(s.field.v == p.v);
  CHECK(s.field.reference == p.reference);
  CHECK(s.field.polygon->hash() == p.polygon->hash());
  CHECK(s.field.grid->nx == p.grid->nx);
  CHECK(format_snapshot(s.field, s.t, s.integrated_dissipation) == text);

  std::string v2 = text;
  v2.replace(v2.find(" v1\n"), 4, " v2\n");
  try {
    parse_snapshot(v2);
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kSnapshotVersion);
  }
  for (std::size_t cut : {std::size_t(10), text.size() / 3, text.size() - 8}) {
    try {
      parse_snapshot(text.substr(0, cut));
      FAIL("expected a malformed snapshot");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kSnapshotMalformed);
      CHECK(std::string(e.what()).find("snapshot malformed") != std::string::npos);
    }
  }
  std::string bad_hash = text;
  bad_hash.replace(bad_hash.find("polygon ") + 8, 4, "zzzz");
  CHECK_THROWS_AS(parse_snapshot(bad_hash), Error);
}

TEST_CASE("validate command exit codes") {
  std::ostringstream out, err;
  CHECK(cmd_validate(data_path("square.poly"), out, err) == kExitOk);
  CHECK(out.str().find("valid Delzant polygon") != std::string::npos);
  CHECK(cmd_validate(data_path("simplex.poly"), out, err) == kExitOk);
  std::ostringstream bad;
  CHECK(cmd_validate(data_path("bad_det.poly"), bad, err) == kExitFailure);
  CHECK(bad.str().find("vertex determinant 2") != std::string::npos);
  CHECK(cmd_validate("/nonexistent/polygon.poly", out, err) == kExitUsage);
}

TEST_CASE("run command exit codes") {
  const fs::path dir = scratch_dir("cli_run");
  std::ostringstream out, err;
  spill(dir / "bad.cfg", "polygon = x\nh = 1\nh = 2\n");
  CHECK(cmd_run((dir / "bad.cfg").string(), out, err) == kExitUsage);
  CHECK(err.str().find("line 3, column 1") != std::string::npos);

  spill(dir / "degenerate.cfg", config_text(dir / "deg", "t_end = 1e-6\nperturbation = sine\namplitude = 10\n"));
  std::ostringstream derr;
  CHECK(cmd_run((dir / "degenerate.cfg").string(), out, derr) == kExitDegenerate);
  CHECK(derr.str().find("initial metric degenerate") != std::string::npos);

  spill(dir / "eps.cfg", "polygon = " + data_path("square.poly") + "\nh = 0.03125\nepsilon0 = 0.3\noutput_dir = " +
                             (dir / "eps").string() + "\nt_end = 1e-6\n");
  CHECK(cmd_run((dir / "eps.cfg").string(), out, err) == kExitUsage);

  spill(dir / "ok.cfg", config_text(dir / "ok", "t_end = 2e-6\nperturbation = sine\namplitude = 0.01\n"
                                                 "diagnostics_cadence = 5\nsnapshot_cadence = 5\n"));
  CHECK(cmd_run((dir / "ok.cfg").string(), out, err) == kExitOk);
  CHECK(fs::exists(dir / "ok" / "ledger.csv"));
  CHECK(fs::exists(dir / "ok" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "ok" / "snapshots" / "step_00000000.snap"));
  CHECK(fs::exists(dir / "ok" / "snapshots" / "step_00000005.snap"));
  CHECK(fs::exists(dir / "ok" / "snapshots" / "final.snap"));
  for (const auto& e : fs::recursive_directory_iterator(dir / "ok")) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("diag reproduces the first diagnostics row of a run") {
  const fs::path dir = scratch_dir("cli_diag");
  spill(dir / "run.cfg", config_text(dir / "run", "t_end = 1e-6\ndiagnostics_cadence = 3\n"));
  std::ostringstream out, err;
  REQUIRE(cmd_run((dir / "run.cfg").string(), out, err) == kExitOk);
  const std::string run_rows = data_lines(slurp(dir / "run" / "diagnostics.csv"));
  const std::string first = run_rows.substr(0, run_rows.find('\n') + 1);

  DiagRequest req;
  req.snapshot = (dir / "run" / "snapshots" / "step_00000000.snap").string();
  req.epsilon0 = 0.2;
  req.config = (dir / "run.cfg").string();
  req.out_dir = (dir / "diag").string();
  std::ostringstream dout;
  REQUIRE(cmd_diag(req, dout, err) == kExitOk);
  CHECK(dout.str() == first);
  CHECK(data_lines(slurp(dir / "diag" / "diagnostics.csv")) == first);
  CHECK(fs::exists(dir / "diag" / "geometry.csv"));

  DiagRequest big = req;
  big.epsilon0 = 0.5;
  std::ostringstream berr;
  CHECK(cmd_diag(big, dout, berr) == kExitUsage);
  CHECK(berr.str().find("epsilon too large") != std::string::npos);

  const std::string snap = slurp(req.snapshot);
  spill(dir / "cut.snap", snap.substr(0, snap.size() / 2));
  DiagRequest cut = req;
  cut.snapshot = (dir / "cut.snap").string();
  std::ostringstream cerr_;
  CHECK(cmd_diag(cut, dout, cerr_) == kExitUsage);
  CHECK(cerr_.str().find("snapshot malformed") != std::string::npos);

  std::string v9 = snap;
  v9.replace(v9.find(" v1\n"), 4, " v9\n");
  spill(dir / "v9.snap", v9);
  DiagRequest ver = req;
  ver.snapshot = (dir / "v9.snap").string();
  CHECK(cmd_diag(ver, dout, err) == kExitUsage);
}

TEST_CASE("oracle command writes a passing report") {
  const fs::path dir = scratch_dir("cli_oracle");
  spill(dir / "o.cfg", config_text(dir / "o", "t_end = 1e-6\n"));
  std::ostringstream out, err;
  CHECK(cmd_oracle((dir / "o.cfg").string(), out, err) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "oracle.json"));
  CHECK(j["all_passed"].get<bool>());
  CHECK(j["oracles"].size() >= 8);
  for (const auto& o : j["oracles"]) {
    CHECK(o.contains("name"));
    CHECK(o.contains("measured"));
    CHECK(o.contains("tolerance"));
  }
  CHECK(nlohmann::json::parse(out.str()) == j);
}

TEST_CASE("runs are byte-identical across thread counts") {
  const fs::path dir = scratch_dir("cli_threads");
  std::string csv[2][2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out_dir = dir / ("t" + std::to_string(k));
    spill(dir / "c.cfg", config_text(out_dir, "t_end = 2e-6\nperturbation = random\namplitude = 0.005\nseed = 3\n"
                                              "diagnostics_cadence = 4\nthreads = " + std::to_string(k + 1) + "\n"));
    std::ostringstream out, err;
    REQUIRE(cmd_run((dir / "c.cfg").string(), out, err) == kExitOk);
    csv[k][0] = slurp(out_dir / "ledger.csv");
    csv[k][1] = slurp(out_dir / "diagnostics.csv");
  }
  CHECK(csv[0][0] == csv[1][0]);
  CHECK(csv[0][1] == csv[1][1]);
  CHECK(csv[0][0].size() > 100);
}

TEST_CASE("command line binary") {
  CHECK(run_cli("validate " + data_path("square.poly")) == 0);
  CHECK(run_cli("validate " + data_path("bad_det.poly")) == 1);
  CHECK(run_cli("validate /nonexistent.poly") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("diag") == 2);
  CHECK(run_cli("--help") == 0);
}
