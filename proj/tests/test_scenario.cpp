#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "scenario.hpp"

using namespace nhqm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string small(const std::string& scenario, const std::string& dir) {
  return "scenario = " + scenario +
         "\n"
         "grid_n = 256\ngrid_l = 50\n"
         "herm_grid_n = 1024\nherm_grid_l = 200\n"
         "dt = 0.01\nt_max = 20\nn_samples = 21\n"
         "out_dir = " + dir + "\n";
}

}  // namespace

TEST_CASE("scenario names") {
  for (auto n : {ScenarioName::eigenfunctions, ScenarioName::wide_norm, ScenarioName::narrow_norm,
                 ScenarioName::mean_position, ScenarioName::phase_reality})
    CHECK(scenario_from_string(to_string(n)) == n);
  CHECK_THROWS_AS(scenario_from_string("wide"), InvalidArgument);
}

TEST_CASE("per-scenario defaults") {
  const ScenarioConfig w = parse_config("scenario = wide_norm");
  CHECK(w.wavepacket.sigma == 3.87);
  CHECK(w.wavepacket.k0 == 0.0);
  CHECK(w.t_max == 240.0);
  CHECK(w.n_samples == 241);
  CHECK(w.theta == 0.3);
  CHECK(w.grid_n == 1024);
  CHECK(w.grid_l == 100.0);
  CHECK(w.dt == 5e-4);
  CHECK_FALSE(w.region_a.has_value());
  CHECK(w.out_dir == "nhqm_out/wide_norm");
  CHECK(w.needs_propagation());

  const ScenarioConfig n = parse_config("scenario = narrow_norm");
  CHECK(n.wavepacket.sigma == 0.71);
  CHECK(n.t_max == 45.0);

  const ScenarioConfig m = parse_config("scenario = mean_position");
  CHECK(m.wavepacket.k0 == 1.0);

  const ScenarioConfig p = parse_config("scenario = phase_reality");
  CHECK(p.t_min == 300.0);
  CHECK(p.t_max == 350.0);
  REQUIRE(p.theta_alt.has_value());
  CHECK(*p.theta_alt == 0.35);
  CHECK_FALSE(p.needs_propagation());
  const auto t = p.sample_times();
  REQUIRE(t.size() == 501);
  CHECK(t.front() == 300.0);
  CHECK(t.back() == 350.0);
  CHECK(t[1] == doctest::Approx(300.1));

  const ScenarioConfig e = parse_config("scenario = eigenfunctions");
  CHECK(e.sample_times().empty());
}

TEST_CASE("overrides, comments and special values") {
  const ScenarioConfig c = parse_config(
      "# comment\n"
      "scenario = phase_reality   # trailing\n"
      "\n"
      "theta_alt = none\n"
      "region_a = 8\n"
      "sigma = 2.5\n"
      "strict = true\n"
      "quad_coef = 0.6\n");
  CHECK_FALSE(c.theta_alt.has_value());
  REQUIRE(c.region_a.has_value());
  CHECK(*c.region_a == 8.0);
  CHECK(c.wavepacket.sigma == 2.5);
  CHECK(c.strict);
  CHECK(c.params.quad_coef == 0.6);
  CHECK_FALSE(parse_config("scenario = wide_norm\nregion_a = auto\n").region_a.has_value());
}

TEST_CASE("config errors name the line") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "cfg");
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("scenario = wide_norm\nsigmaa = 1\n").find("cfg:2: unknown key 'sigmaa'") != std::string::npos);
  CHECK(message("scenario = wide_norm\nsigma = 1\nsigma = 2\n").find("cfg:3") != std::string::npos);
  CHECK(message("scenario = wide_norm\nsigma = abc\n").find("cfg:2") != std::string::npos);
  CHECK(message("scenario = wide_norm\ngrid_n = 1.5\n").find("integer") != std::string::npos);
  CHECK(message("scenario = wide_norm\nstrict = maybe\n").find("true or false") != std::string::npos);
  CHECK(message("scenario = wide_norm\njunk\n").find("cfg:2") != std::string::npos);
  CHECK(message("scenario = wide_norm\nsigma =\n").find("no value") != std::string::npos);
  CHECK(message("sigma = 1\n").find("missing required key 'scenario'") != std::string::npos);
  CHECK(message("scenario = nope\n").find("cfg:1") != std::string::npos);
}

TEST_CASE("semantic validation") {
  CHECK_NOTHROW(parse_config("scenario = wide_norm"));
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\ntheta = 0.9\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\ngrid_n = 1023\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nsigma = 0.2\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nn_samples = 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nn_samples = 250\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nt_max = 1000\nn_samples = 1001\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nregion_a = 150\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\ndt = 0.1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nt_min = 0.5\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("scenario = eigenfunctions\ngrid_l = 20\nstrict = true\n"), InvalidArgument);
  CHECK_NOTHROW(parse_config("scenario = eigenfunctions\ngrid_l = 20\n"));
  CHECK_THROWS_AS(parse_config("scenario = wide_norm\nmass = 0\n"), InvalidArgument);
  CHECK_THROWS_AS(load_config("does/not/exist.conf"), IoError);
}

TEST_CASE("transient cutoff") {
  // Spread velocity 1/(sqrt 2 sigma) carries the packet from x0 to the barrier top.
  CHECK(transient_cutoff(WavepacketSpec{3.87, 0.0, 0.0}, 3.4059, 1.0) == doctest::Approx(3.4059 * std::sqrt(2.0) * 3.87));
  CHECK(transient_cutoff(WavepacketSpec{3.87, 0.0, 5.0}, 3.4059, 1.0) == 0.0);
  CHECK_THROWS_AS(transient_cutoff(WavepacketSpec{3.87, 0.0, 0.0}, 3.4, 0.0), InvalidArgument);
}

TEST_CASE("small end-to-end runs write their outputs") {
  const std::string root = "scenario_runs";
  fs::remove_all(root);
  struct Case {
    const char* name;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases{
      {"eigenfunctions",
       {"spectrum.csv", "state_bound.csv", "state_isolated_resonance.csv", "state_continuum.csv",
        "state_broad_resonance.csv", "report.json"}},
      {"wide_norm", {"norm_fp.csv", "norm_qm.csv", "norm_np.csv", "report.json"}},
      {"narrow_norm", {"norm_fp.csv", "norm_qm.csv", "report.json"}},
      {"mean_position", {"mean_x_fp.csv", "mean_x_qm.csv", "mean_x_diff.csv", "report.json"}},
      {"phase_reality",
       {"mean_x_fp.csv", "mean_p_fp.csv", "mean_x_fp_theta_alt.csv", "mean_p_fp_theta_alt.csv", "report.json"}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const std::string dir = root + "/" + c.name;
    std::string text = small(c.name, dir);
    if (std::string(c.name) == "narrow_norm") text += "sigma = 0.71\n";
    if (std::string(c.name) == "phase_reality") text += "t_min = 10\n";
    const ScenarioResult r = run_scenario(parse_config(text));
    for (const std::string& f : c.files) CHECK(fs::exists(dir + "/" + f));
    const auto j = nlohmann::json::parse(slurp(dir + "/report.json"));
    CHECK(j["scenario"] == c.name);
    CHECK(j["passed"].get<bool>() == r.passed);
    CHECK(j["checks"].is_array());
    CHECK(j["checks"].size() >= 1);
    bool all = true;
    for (const auto& ch : j["checks"]) all = all && ch["passed"].get<bool>();
    CHECK(all == r.passed);
  }
  const std::string csv = slurp(root + "/wide_norm/norm_qm.csv");
  CHECK(csv.rfind("t,value\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 21);
}

TEST_CASE("runs are deterministic") {
  const ScenarioResult a = run_scenario(parse_config(small("wide_norm", "det_a")));
  const ScenarioResult b = run_scenario(parse_config(small("wide_norm", "det_b")));
  for (const char* f : {"norm_fp.csv", "norm_qm.csv", "norm_np.csv"})
    CHECK(slurp(std::string("det_a/") + f) == slurp(std::string("det_b/") + f));
  CHECK(a.passed == b.passed);
}

TEST_CASE("comparison report json") {
  ComparisonReport r;
  r.t_star = 2.0;
  r.threshold = 0.05;
  r.max_deviation = 0.01;
  r.passed = true;
  r.a_label = "N_FP";
  r.b_label = "N_QM";
  const auto j = to_json(r);
  CHECK(j["t_star"] == 2.0);
  CHECK(j["passed"] == true);
  CHECK(j["max_deviation"] == 0.01);
}
