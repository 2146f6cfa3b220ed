#include "support/cli_harness.hpp"
#include "twistdyn/cli/runner.hpp"

#include <catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>

using namespace twistdyn::testing;
using json = nlohmann::json;

namespace {

struct ScratchRoot {
  fs::path path = fs::temp_directory_path() / ("twistdyn_cli_test_" + std::to_string(::getpid()));
  ScratchRoot() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchRoot() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const fs::path& test_root() {
  static const ScratchRoot root;
  return root.path;
}

fs::path log_path() { return test_root() / "cli.log"; }

int cli(const std::vector<std::string>& args) { return run_cli(args, log_path()); }

json load_json(const fs::path& p) { return json::parse(read_file(p)); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

}  // namespace

TEST_CASE("invalid input exits with 2", "[cli]") {
  const auto out = (test_root() / "bad").string();
  CHECK(cli({"--command", "map", "--map", "bogus", "--out", out}) == 2);
  CHECK(cli({"--command", "tube", "--r_min", "0", "--out", out}) == 2);
  CHECK(cli({"--command", "tube", "--r_min", "-1e-3", "--out", out}) == 2);
  CHECK(cli({"--command", "filament", "--eta", "", "--out", out}) == 2);
  CHECK(cli({"--command", "filament", "--K0", "0", "--out", out}) == 2);
  CHECK(cli({"--command", "filament", "--eta", "0.1,-0.2", "--out", out}) == 2);
  CHECK(cli({"--command", "frenet", "--step", "0", "--out", out}) == 2);
  CHECK(cli({"--command", "frenet", "--step", "-1e-3", "--out", out}) == 2);
  CHECK(cli({"--command", "map", "--steps", "ten", "--out", out}) == 2);
  CHECK(cli({"--command", "nope", "--out", out}) == 2);
  CHECK(cli({"--command", "map", "--format", "pdf", "--out", out}) == 2);
  CHECK(cli({"--command", "map"}) == 2);
  CHECK(cli({"--out", out}) == 2);
  CHECK(cli({"--command", "map", "--r_min", "1e-3", "--out", out}) == 2);  // key of another command
  CHECK(cli({"--command", "map", "--no-such-flag", "1", "--out", out}) == 2);
  CHECK(cli({"--command", "map", "--map", "tube-twist", "--K0", "0", "--out", out}) == 2);

  const auto cfg = test_root() / "unknown.cfg";
  write_text(cfg, "steps = 5\nmystery = 1\n");
  CHECK(cli({"--command", "map", "--config", cfg.string(), "--out", out}) == 2);
  CHECK(cli({"--command", "map", "--config", (test_root() / "missing.cfg").string(), "--out", out}) == 2);
  CHECK(cli({"--from-manifest", (test_root() / "missing.json").string(), "--out", out}) == 2);
}

TEST_CASE("unwritable output exits with 3", "[cli]") {
  const auto blocker = test_root() / "blocker";
  write_text(blocker, "not a directory");
  CHECK(cli({"--command", "map", "--out", (blocker / "sub").string()}) == 3);
  CHECK(cli({"--command", "frenet", "--s_end", "1", "--out", blocker.string()}) == 3);
}

TEST_CASE("map report", "[cli]") {
  const auto out = scratch_dir(test_root(), "map");
  REQUIRE(cli({"--command", "map", "--out", out.string()}) == 0);
  for (const char* f : {"map_growth.csv", "map_orbit.csv", "map_growth.svg", "map_report.json", "manifest.json"})
    CHECK(fs::exists(out / f));

  const json rep = load_json(out / "map_report.json");
  const json& r = rep.at("results");
  CHECK(r.at("classification") == "hyperbolic");
  CHECK(std::abs(r.at("eigenvalues")[0].at("re").get<double>() - 2.618033988749895) < 1e-12);
  CHECK(std::abs(r.at("eigenvalues")[1].at("re").get<double>() - 0.3819660112501051) < 1e-12);
  CHECK(std::abs(r.at("growth").at("step_log_growth_final").get<double>() - 0.9624236501192069) < 1e-6);
  CHECK(r.at("determinant") == 1.0);

  const std::string csv = read_file(out / "map_growth.csv");
  CHECK(csv.rfind("n,mean_log_growth,step_log_growth,ln_abs_lambda1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);

  const json man = load_json(out / "manifest.json");
  CHECK(man.at("toolkit") == "twistdyn");
  CHECK(man.at("version") == "1.0.0");
  CHECK(man.at("command") == "map");
  CHECK(man.at("parameters").at("steps") == "50");
  CHECK(man.at("parameters").size() == twistdyn::cli::parameter_defaults().at("map").size());
  CHECK(man == rep.at("manifest"));
}

TEST_CASE("twist map is parabolic with detail", "[cli]") {
  const auto out = scratch_dir(test_root(), "twist");
  REQUIRE(cli({"--command", "map", "--map", "twist", "--steps", "1000", "--format", "json", "--out", out.string()}) ==
          0);
  const json r = load_json(out / "map_report.json").at("results");
  CHECK(r.at("classification") == "parabolic");
  CHECK(r.at("classification_detail") == "elliptic-or-parabolic boundary: parabolic");
  CHECK(r.at("growth").at("mean_log_growth_final").get<double>() < 0.01);
  CHECK_FALSE(fs::exists(out / "map_growth.csv"));
  CHECK_FALSE(fs::exists(out / "map_growth.svg"));
}

TEST_CASE("tube report carries both quadratics and the flagged discrepancies", "[cli]") {
  const auto out = scratch_dir(test_root(), "tube");
  REQUIRE(cli({"--command", "tube", "--r_min", "1e-3", "--out", out.string()}) == 0);
  const json r = load_json(out / "tube_report.json").at("results");

  const json& eq = r.at("eigenproblems");
  REQUIRE(eq.size() == 2);
  std::map<std::string, json> by_tag;
  for (const auto& e : eq) by_tag[e.at("provenance")] = e;
  REQUIRE(by_tag.count("paper-stated"));
  REQUIRE(by_tag.count("derived-elimination"));
  CHECK(by_tag["derived-elimination"].at("coefficients") == json::array({1.0, -1.0, -2.0}));
  CHECK(by_tag["paper-stated"].at("coefficients") == json::array({1.0, -1.0, -1.0}));
  CHECK(by_tag["derived-elimination"].at("roots")[0].at("re") == 2.0);

  std::map<std::string, bool> flags;
  for (const auto& d : r.at("discrepancies")) flags[d.at("id")] = d.at("flagged");
  CHECK(flags.at("eliminated-vs-stated-quadratic"));
  CHECK(flags.at("alpha-prefactor"));
  CHECK(flags.at("pressure-balance"));

  CHECK(r.at("blowup").at("verdict") == "divergent");
  CHECK(r.at("alpha_scaling").at("kappa0_doubling_ratio") == 4.0);
  CHECK(r.at("alpha_scaling").at("alpha_at_m_equal_1") == 0.0);
  CHECK(r.at("checks").at("velocity_profile_max_defect").get<double>() < 1e-6);
  CHECK(r.at("checks").at("log_radial_defect_sin_ln_r").get<double>() < 1e-6);
  CHECK(r.at("checks").at("incompressibility_defect").get<double>() < 1e-10);

  const std::string csv = read_file(out / "tube_profile.csv");
  CHECK(csv.rfind("r,v_s,v_theta,p,alpha,residual_poloidal,residual_toroidal\n", 0) == 0);

  const auto flat = scratch_dir(test_root(), "tube_flat");
  REQUIRE(cli({"--command", "tube", "--kappa0", "0", "--format", "json", "--out", flat.string()}) == 0);
  CHECK(load_json(flat / "tube_report.json").at("results").at("blowup").at("verdict") == "bounded");
}

TEST_CASE("filament sweeps", "[cli]") {
  const auto out = scratch_dir(test_root(), "filament");
  REQUIRE(cli({"--command", "filament", "--A", "1", "--B", "1", "--C", "-1", "--out", out.string()}) == 0);
  const json r = load_json(out / "filament_report.json").at("results");
  CHECK(r.at("verdict") == "slow");
  CHECK(std::abs(r.at("fit").at("intercept").get<double>()) < 1e-10);
  CHECK(std::abs(r.at("fit").at("slope").get<double>() - 2.0 / (1.0 + std::sqrt(5.0))) < 1e-9);
  CHECK(r.at("max_relative_condition_residual").get<double>() < 1e-10);
  const std::string csv = read_file(out / "filament_sweep.csv");
  CHECK(csv.rfind("eta,re_gamma_1,im_gamma_1,re_gamma_2,im_gamma_2,regime\n", 0) == 0);

  const auto planar = scratch_dir(test_root(), "planar");
  REQUIRE(cli({"--command", "filament", "--tau", "0", "--out", planar.string()}) == 0);
  CHECK(load_json(planar / "filament_report.json").at("results").at("verdict") == "non-dynamo-planar");
  CHECK(load_json(planar / "filament_report.json").at("results").at("matrix_at_first_eta").at("m33") == 0.0);

  const auto zero = scratch_dir(test_root(), "eta0");
  REQUIRE(cli({"--command", "filament", "--eta", "0", "--format", "json", "--out", zero.string()}) == 0);
  const json z = load_json(zero / "filament_report.json").at("results");
  CHECK(z.at("sweep")[0].at("gamma")[0].at("re") == 0.0);
  CHECK(z.at("sweep")[0].at("regime") == "slow");
}

TEST_CASE("frenet report", "[cli]") {
  const auto out = scratch_dir(test_root(), "frenet");
  REQUIRE(cli({"--command", "frenet", "--stride", "100", "--out", out.string()}) == 0);
  const json r = load_json(out / "frenet_report.json").at("results");
  CHECK(r.at("max_defect").get<double>() < 1e-8);
  CHECK(r.at("reorthonormalization_events").empty());
  CHECK(std::abs(r.at("accumulated_rotation_angle").get<double>() - 10.0 * std::sqrt(2.0)) < 1e-7);
  const std::string csv = read_file(out / "frenet_trajectory.csv");
  CHECK(csv.rfind("s,t1,t2,t3,n1,n2,n3,b1,b2,b3,defect\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);

  const auto circle = scratch_dir(test_root(), "circle");
  REQUIRE(cli({"--command", "frenet", "--tau", "0", "--s_end", "6.283185307179586", "--format", "json", "--out",
               circle.string()}) == 0);
  CHECK(load_json(circle / "frenet_report.json").at("results").at("closure_error").get<double>() < 1e-8);
}

TEST_CASE("config layering", "[cli]") {
  const auto cfg = test_root() / "map.cfg";
  write_text(cfg, "# shear family\nmap = cat-shear\nK = 2\nsteps = 12\n");
  const auto out = scratch_dir(test_root(), "layered");
  REQUIRE(cli({"--command", "map", "--config", cfg.string(), "--steps", "7", "--out", out.string()}) == 0);
  const json man = load_json(out / "manifest.json");
  CHECK(man.at("parameters").at("map") == "cat-shear");
  CHECK(man.at("parameters").at("K") == "2");
  CHECK(man.at("parameters").at("steps") == "7");
}

TEST_CASE("runs are byte-identical and reproducible from the manifest", "[cli]") {
  const std::vector<std::vector<std::string>> suite{
      {"--command", "map"},
      {"--command", "tube", "--r_min", "1e-3"},
      {"--command", "filament"},
      {"--command", "frenet", "--stride", "50"},
  };
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto a = scratch_dir(test_root(), "det_a" + std::to_string(i));
    const auto b = scratch_dir(test_root(), "det_b" + std::to_string(i));
    const auto c = scratch_dir(test_root(), "det_c" + std::to_string(i));
    auto args_a = suite[i];
    args_a.insert(args_a.end(), {"--out", a.string()});
    auto args_b = suite[i];
    args_b.insert(args_b.end(), {"--out", b.string()});
    REQUIRE(cli(args_a) == 0);
    REQUIRE(cli(args_b) == 0);
    REQUIRE(cli({"--from-manifest", (a / "manifest.json").string(), "--out", c.string()}) == 0);
    const auto sa = snapshot(a);
    CAPTURE(suite[i][1]);
    CHECK(sa.size() >= 3);
    CHECK(sa == snapshot(b));
    CHECK(sa == snapshot(c));
  }
}

TEST_CASE("manifest re-run honours recorded formats and rejects a conflicting command", "[cli]") {
  const auto a = scratch_dir(test_root(), "fmt_a");
  REQUIRE(cli({"--command", "map", "--format", "csv", "--out", a.string()}) == 0);
  CHECK_FALSE(fs::exists(a / "map_report.json"));
  const auto b = scratch_dir(test_root(), "fmt_b");
  REQUIRE(cli({"--from-manifest", (a / "manifest.json").string(), "--out", b.string()}) == 0);
  CHECK(snapshot(a) == snapshot(b));
  CHECK(cli({"--from-manifest", (a / "manifest.json").string(), "--command", "tube", "--out", b.string()}) == 2);
  CHECK(cli({"--from-manifest", (a / "manifest.json").string(), "--config", "x.cfg", "--out", b.string()}) == 2);
}
