#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtrans/cli.hpp"
#include "gtrans/io.hpp"
#include "gtrans/pma.hpp"

using namespace gtrans;
namespace fs = std::filesystem;
using nlohmann::json;
using doctest::Approx;

namespace {

const fs::path kConfigs = fs::path(GTRANS_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gtrans_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "gtrans");
  args.push_back("--quiet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cfg(const std::string& cmd, const std::string& cfg, const fs::path& out, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{cmd, "--config", (kConfigs / cfg).string(), "--out", out.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args);
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("gtrans_cli_cfg_" + name + ".json");
  write_text(p.string(), text);
  return p;
}

json load_json(const fs::path& p) { return json::parse(read_text(p.string())); }

}  // namespace

TEST_CASE("solve writes the identity field") {
  const fs::path out = scratch("identity");
  REQUIRE(run_cfg("solve", "identity.json", out) == kExitOk);
  const SupportField f = read_hfield_csv((out / "hfield.csv").string());
  double err = 0.0;
  for (int k = 0; k <= f.n_r; ++k) {
    for (int j = 0; j < f.n_theta; ++j) err = std::max(err, std::abs(f.at(k, j) - f.r(k)));
  }
  CHECK(err <= 1e-10);
  const json log = load_json(out / "solve_log.json");
  CHECK(log["clamp_count"] == 0);
  CHECK(log["substeps"].get<long>() > 0);
  CHECK(log.contains("min_radius"));

  SUBCASE("verify passes") { CHECK(run_cfg("verify", "identity.json", out) == kExitOk); }
  SUBCASE("level set at r = 0.5 is the circle of radius 0.5") {
    REQUIRE(run_cfg("levelsets", "identity.json", out) == kExitOk);
    const json ls = load_json(out / "levelsets.json");
    const auto pts = read_points_csv((out / "levelset_2.csv").string());
    CHECK(ls["levels"][2]["r"] == 0.5);
    double dev = 0.0;
    for (Vec2 p : pts) dev = std::max(dev, std::abs(norm(p) - 0.5));
    CHECK(dev <= 1e-8);
    CHECK(norm(pts.front() - pts.back()) == 0.0);
  }
  SUBCASE("identity prelimit stays at the sampling floor") {
    const fs::path cfg = write_config("prelimit_id", R"({
      "rho0": {"domain": {"kind": "ball", "radius": 1}, "density": {"kind": "uniform"}},
      "rho1": {"domain": {"kind": "ball", "radius": 1}, "density": {"kind": "uniform"}},
      "prelimit": {"n": 256, "t_list": [1, 3, 10, 30], "seeds": [1, 2]}})");
    REQUIRE(run({"prelimit", "--config", cfg.string(), "--out", out.string()}) == kExitOk);
    const json s = load_json(out / "prelimit.json");
    for (const auto& seed : s["seeds"]) {
      for (const auto& m : seed["mean_disp"]) CHECK(m.get<double>() <= 2.0 * seed["floor"].get<double>());
    }
    CHECK(read_text((out / "prelimit.csv").string()).rfind("t,mean_disp,median_disp,max_disp,n,seed\n", 0) == 0);
  }
}

TEST_CASE("doubling solve, verify and level sets") {
  const fs::path out = scratch("doubling");
  REQUIRE(run_cfg("solve", "doubling.json", out) == kExitOk);
  const SupportField f = read_hfield_csv((out / "hfield.csv").string());
  double err = 0.0;
  for (int k = 0; k <= f.n_r; ++k) {
    for (int j = 0; j < f.n_theta; ++j) err = std::max(err, std::abs(f.at(k, j) - 0.5 * f.r(k)));
  }
  CHECK(err <= 1e-8);
  CHECK(run_cfg("verify", "doubling.json", out) == kExitOk);
  REQUIRE(run_cfg("levelsets", "doubling.json", out) == kExitOk);
  const auto pts = read_points_csv((out / "levelset_1.csv").string());
  for (Vec2 p : pts) CHECK(norm(p) == Approx(0.5).epsilon(1e-8));
}

TEST_CASE("corrupted H-field fails verification") {
  const fs::path out = scratch("corrupt");
  REQUIRE(run_cfg("solve", "identity.json", out) == kExitOk);
  SupportField f = read_hfield_csv((out / "hfield.csv").string());
  for (int j = 0; j < f.n_theta; ++j) f.H[static_cast<std::size_t>(128) * f.n_theta + j] *= 1.01;
  write_hfield_csv((out / "hfield.csv").string(), f);
  CHECK(run_cfg("verify", "identity.json", out, {"--which", "cov"}) == kExitVerifyFailed);
  const json r = load_json(out / "verify_report.json");
  CHECK(r["checks"]["cov"]["pass"] == false);
  CHECK(r["pass"] == false);
}

TEST_CASE("ellipse level sets round off towards r_stop") {
  const fs::path out = scratch("ellipse");
  REQUIRE(run_cfg("solve", "ellipse.json", out) == kExitOk);
  const json log = load_json(out / "solve_log.json");
  CHECK(log["clamp_fraction"].get<double>() <= 0.01);
  REQUIRE(run_cfg("levelsets", "ellipse.json", out) == kExitOk);
  const json ls = load_json(out / "levelsets.json");
  const auto& lv = ls["levels"];
  CHECK(lv[lv.size() - 1]["roundness"].get<double>() < lv[0]["roundness"].get<double>());
  CHECK(run_cfg("levelsets", "ellipse.json", out, {"--quiet"}) == kExitOk);
}

TEST_CASE("operational errors exit with 2") {
  const fs::path out = scratch("errors");
  CHECK(run({"solve"}) == kExitError);
  CHECK(run({"bogus"}) == kExitError);
  CHECK(run({"solve", "--config", "/nonexistent.json"}) == kExitError);

  const fs::path big = write_config("big", R"({
    "rho0": {"domain": {"kind": "ball"}, "density": {"kind": "uniform"}},
    "rho1": {"domain": {"kind": "ball"}, "density": {"kind": "uniform"}},
    "prelimit": {"n": 2000}})");
  CHECK(run({"prelimit", "--config", big.string(), "--out", out.string()}) == kExitError);
  CHECK(run_cfg("analyze", "identity.json", out, {"--which", "sobolev"}) == kExitError);
  CHECK(run_cfg("verify", "identity.json", out, {"--which", "nope"}) == kExitError);

  const fs::path lv = write_config("levels", R"({
    "rho0": {"domain": {"kind": "ball"}, "density": {"kind": "uniform"}},
    "rho1": {"domain": {"kind": "ball"}, "density": {"kind": "uniform"}},
    "levelsets": {"r": [1.5]}})");
  CHECK(run({"levelsets", "--config", lv.string(), "--out", out.string()}) == kExitError);
}

TEST_CASE("solver abort is logged and exits with 2") {
  const fs::path out = scratch("abort");
  const fs::path cfg = write_config("abort", R"({
    "rho0": {"domain": {"kind": "ball"}, "density": {"kind": "angular_cosine", "amplitude": 0.99, "frequency": 6}},
    "rho1": {"domain": {"kind": "ball"}, "density": {"kind": "uniform"}},
    "grid": {"n_r": 128, "n_theta": 128}})");
  CHECK(run({"solve", "--config", cfg.string(), "--out", out.string()}) == kExitError);
  const json log = load_json(out / "solve_log.json");
  CHECK(log["status"] == "error");
  CHECK(log["error"]["kind"] == "domain-escape");
}

TEST_CASE("analyze on the disk") {
  const fs::path out = scratch("analyze");
  const fs::path cfg = write_config("analyze", R"({
    "body": {"kind": "disk", "radius": 1},
    "rho0": {"domain": {"kind": "body"}, "density": {"kind": "uniform"}},
    "rho1": {"domain": {"kind": "ball"}, "density": {"kind": "uniform"}},
    "analysis": {"maxprin": {"v": "radial_power", "power": 2, "levels": 64, "grid": 301},
                 "sector": {"n_r": 120, "n_theta": 120},
                 "iso": {"n_r": 128, "samples": 50}}})");
  REQUIRE(run({"analyze", "--config", cfg.string(), "--out", out.string()}) == kExitOk);
  const json r = load_json(out / "analyze_report.json");
  CHECK(r["maxprin"]["ratio"].get<double>() >= 0.98);
  CHECK(r["iso"]["ratio"].get<double>() == Approx(1.0).epsilon(0.01));
  CHECK(r["sector"]["pass"] == true);
  CHECK_FALSE(r.contains("sobolev"));
  CHECK(fs::exists(out / "contact_points.csv"));
  CHECK(fs::exists(out / "gamma_f.csv"));
}

TEST_CASE("outputs are byte-identical across runs") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  for (const fs::path& out : {a, b}) {
    REQUIRE(run_cfg("solve", "sobolev.json", out) == kExitOk);
    REQUIRE(run_cfg("verify", "sobolev.json", out, {"--which", "pushforward,roundtrip"}) == kExitOk);
    REQUIRE(run_cfg("analyze", "sobolev.json", out, {"--which", "sobolev"}) == kExitOk);
    REQUIRE(run_cfg("levelsets", "sobolev.json", out) == kExitOk);
  }
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    CAPTURE(name.string());
    CHECK(read_text(entry.path().string()) == read_text((b / name).string()));
  }
}
