#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "semispec/cli.hpp"
#include "semispec/config.hpp"
#include "semispec/error.hpp"

using namespace semispec;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("semispec_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

const char* kSmallConfig =
    "# small Morse instance\n"
    "potential = x^2\n"
    "regime = auto\n"
    "[domain]\n"
    "x = -1, 2\n"
    "[sweep]\n"
    "hs = [0.08, 0.06, 0.04]\n"
    "[spectrum]\n"
    "h = 0.05\n";

struct Run {
  int code = -1;
  std::string err;
};

Run run_cli(const std::string& args, const fs::path& dir) {
  const char* exe = std::getenv("SEMISPEC_CLI");
  REQUIRE(exe != nullptr);
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(exe) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(err)};
}

}  // namespace

TEST_CASE("config parsing", "[cli]") {
  const auto cfg = parse_config(kSmallConfig);
  REQUIRE(cfg.potential);
  CHECK(*cfg.potential == "x^2");
  CHECK(cfg.dim() == 1);
  const auto& iv = std::get<Interval>(cfg.require_domain());
  CHECK(iv.lo == -1.0);
  CHECK(iv.hi == 2.0);
  REQUIRE(cfg.hs);
  CHECK(*cfg.hs == std::vector<double>{0.08, 0.06, 0.04});
  CHECK(cfg.spectrum_h == 0.05);
  CHECK(cfg.hash == sha256_hex(kSmallConfig));
  CHECK(cfg.hash.size() == 64);

  const auto rect = parse_config("potential = x + y\n[domain]\nx = 0, 1\ny = -1, 1\n[solver]\nmethod = shift-invert\nshifts = 0, 0.5i\n");
  CHECK(rect.dim() == 2);
  CHECK(rect.solver.method == SolverMethod::ShiftInvert);
  CHECK(rect.solver.shifts_override == std::vector<Complex>{Complex(0, 0), Complex(0, 0.5)});

  CHECK_THAT(std::string(parse_config("").hash), ContainsSubstring("e3b0c442"));
  CHECK_THROWS_AS(parse_config("[sweep]\nhs = []\n"), ConfigError);
  try {
    parse_config("[sweep]\nhs = []\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "hs empty");
  }
  CHECK_THROWS_AS(parse_config("[sweep]\nhs = 0.01, -0.02\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nx = 2, 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("regime = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\nlevels = two\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("potential = x^\n[domain]\nx = 0, 1\n").profile(), ParseError);

  CHECK(parse_complex("1.5") == Complex(1.5, 0));
  CHECK(parse_complex("2i") == Complex(0, 2));
  CHECK(parse_complex("1-0.5j") == Complex(1, -0.5));
  CHECK_THROWS_AS(parse_complex("abc"), ConfigError);
}

TEST_CASE("run_command writes reproducible, hash-named outputs", "[cli]") {
  const fs::path dir = scratch("repro");
  write_file(dir / "small.ini", kSmallConfig);
  const std::string hash16 = sha256_hex(kSmallConfig).substr(0, 16);

  std::string first_spectrum, first_sweep;
  for (int pass = 0; pass < 2; ++pass) {
    CliRequest req;
    req.config_path = (dir / "small.ini").string();
    req.out_dir = (dir / "out").string();
    req.threads = 1;
    std::ostringstream out, err;
    req.command = "spectrum";
    REQUIRE(run_command(req, out, err) == 0);
    req.command = "sweep";
    REQUIRE(run_command(req, out, err) == 0);
    CHECK(err.str().empty());
    const std::string spectrum = read_file(dir / "out" / ("spectrum_" + hash16 + ".json"));
    const std::string sweep = read_file(dir / "out" / ("sweep_" + hash16 + ".csv"));
    REQUIRE_FALSE(spectrum.empty());
    REQUIRE_FALSE(sweep.empty());
    if (pass == 0) {
      first_spectrum = spectrum;
      first_sweep = sweep;
    } else {
      CHECK(spectrum == first_spectrum);
      CHECK(sweep == first_sweep);
    }
  }

  const auto fit = nlohmann::json::parse(read_file(dir / "out" / ("fit_" + hash16 + ".json")));
  CHECK(fit["config_hash"] == sha256_hex(kSmallConfig));
  CHECK(fit["verdict"]["pass"] == true);
  CHECK(fs::exists(dir / "out" / ("run_sweep_" + hash16 + ".meta.json")));
  CHECK(fs::exists(dir / "out" / ("run_spectrum_" + hash16 + ".meta.json")));
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    CHECK_THAT(entry.path().filename().string(), ContainsSubstring(hash16));
  }
}

TEST_CASE("run_command error reporting", "[cli]") {
  const fs::path dir = scratch("errors");
  CliRequest req;
  req.command = "spectrum";
  std::ostringstream out, err;
  CHECK(run_command(req, out, err) == 1);
  CHECK_THAT(err.str(), ContainsSubstring("\"error\":\"config\""));

  write_file(dir / "regime.ini", "potential = x^2\n[domain]\nx = -1, 2\n[output]\ndir = " + (dir / "o").string() + "\n");
  req.command = "gl";
  req.config_path = (dir / "regime.ini").string();
  std::ostringstream err2;
  CHECK(run_command(req, out, err2) == 2);
  const auto j = nlohmann::json::parse(err2.str());
  CHECK(j["error"] == "regime");
}

TEST_CASE("command-line binary", "[cli]") {
  const fs::path dir = scratch("binary");
  write_file(dir / "empty_hs.ini", "potential = x\n[domain]\nx = 0, 1\n[sweep]\nhs = []\n");
  const Run r = run_cli("sweep --config " + (dir / "empty_hs.ini").string() + " --out " + (dir / "o").string(), dir);
  CHECK(r.code == 1);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"] == "config");
  CHECK(j["message"] == "hs empty");

  CHECK(run_cli("nonsense", dir).code == 1);
  CHECK(run_cli("sweep --config " + (dir / "missing.ini").string(), dir).code == 1);

  write_file(dir / "ok.ini", kSmallConfig);
  CHECK(run_cli("spectrum --threads 1 --config " + (dir / "ok.ini").string() + " --out " + (dir / "o").string(), dir).code == 0);
}
