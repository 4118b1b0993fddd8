#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nhqm/nhqm.h"

namespace {

nhqm_config* parse(const std::string& text) {
  nhqm_config* c = nullptr;
  REQUIRE(nhqm_config_parse(text.c_str(), &c) == NHQM_OK);
  return c;
}

}  // namespace

TEST_CASE("version and empty error") {
  CHECK(std::string(nhqm_version()) == "0.1.0");
  CHECK(nhqm_last_error() != nullptr);
}

TEST_CASE("config parsing status codes") {
  nhqm_config* c = nullptr;
  CHECK(nhqm_config_parse("scenario = wide_norm\nbogus = 1\n", &c) == NHQM_PARSE_ERROR);
  CHECK(c == nullptr);
  CHECK(std::string(nhqm_last_error()).find("bogus") != std::string::npos);
  CHECK(nhqm_config_parse("scenario = wide_norm\n", nullptr) == NHQM_INVALID_ARGUMENT);
  CHECK(nhqm_config_parse(nullptr, &c) == NHQM_INVALID_ARGUMENT);
  CHECK(nhqm_config_load("missing/file.conf", &c) == NHQM_IO_ERROR);

  c = parse("scenario = narrow_norm\n");
  CHECK(std::string(nhqm_config_scenario(c)) == "narrow_norm");
  CHECK(nhqm_config_set_out_dir(c, "capi_out") == NHQM_OK);
  CHECK(nhqm_config_set_out_dir(c, "") == NHQM_INVALID_ARGUMENT);
  nhqm_config_free(c);
  nhqm_config_free(nullptr);

  std::ofstream("capi.conf") << "scenario = mean_position\n";
  CHECK(nhqm_config_load("capi.conf", &c) == NHQM_OK);
  CHECK(std::string(nhqm_config_scenario(c)) == "mean_position");
  nhqm_config_free(c);
}

TEST_CASE("spectrum and wavepacket through the C interface") {
  nhqm_config* c = parse("scenario = wide_norm\n");
  nhqm_spectrum* s = nullptr;
  CHECK(nhqm_spectrum_compute(c, 7, 50.0, 0.3, &s) == NHQM_INVALID_ARGUMENT);
  CHECK(nhqm_spectrum_compute(c, 256, 50.0, 0.9, &s) == NHQM_INVALID_ARGUMENT);
  REQUIRE(nhqm_spectrum_compute(c, 256, 50.0, 0.3, &s) == NHQM_OK);
  CHECK(nhqm_spectrum_size(s) == 256);
  int bound = 0;
  for (size_t i = 0; i < nhqm_spectrum_size(s); ++i) {
    nhqm_state_class cls;
    REQUIRE(nhqm_spectrum_class(s, i, &cls) == NHQM_OK);
    if (cls == NHQM_BOUND) {
      ++bound;
      double re = 0, im = 0;
      CHECK(nhqm_spectrum_energy(s, i, &re, &im) == NHQM_OK);
      CHECK(re < 0.0);
      CHECK(std::abs(im) < 1e-6);
    }
  }
  CHECK(bound == 1);
  double re = 0, im = 0;
  CHECK(nhqm_spectrum_energy(s, 9999, &re, &im) == NHQM_INVALID_ARGUMENT);
  CHECK(nhqm_spectrum_write_csv(s, "capi_spectrum.csv") == NHQM_OK);
  CHECK(nhqm_spectrum_write_csv(s, "no/such/dir/s.csv") == NHQM_IO_ERROR);

  nhqm_wavepacket* wp = nullptr;
  CHECK(nhqm_wavepacket_create(s, 0.05, 0.0, 0.0, &wp) == NHQM_INVALID_ARGUMENT);
  REQUIRE(nhqm_wavepacket_create(s, 3.87, 1.0, 0.0, &wp) == NHQM_OK);
  CHECK(nhqm_fp_norm(wp, 0.0, &re, &im) == NHQM_OK);
  CHECK(std::abs(re - 1.0) < 1e-6);
  CHECK(std::abs(im) < 1e-6);
  CHECK(nhqm_fp_norm(wp, -1.0, &re, &im) == NHQM_INVALID_ARGUMENT);
  double phase = 0;
  CHECK(nhqm_fp_expectation(wp, NHQM_MOMENTUM, 0.0, &re, &im, &phase) == NHQM_OK);
  CHECK(std::abs(re - 1.0) < 1e-6);
  CHECK(nhqm_fp_decay_rate(wp, 10.0, &re, &im) == NHQM_OK);
  double np = 0;
  CHECK(nhqm_np_norm(wp, 0.0, &np) == NHQM_OK);
  CHECK(np > 0.0);
  nhqm_wavepacket_free(wp);
  nhqm_spectrum_free(s);
  nhqm_config_free(c);
}

TEST_CASE("scenario run and report") {
  nhqm_config* c = parse(
      "scenario = eigenfunctions\ngrid_n = 256\ngrid_l = 50\nout_dir = capi_eig\n");
  nhqm_report* r = nullptr;
  REQUIRE(nhqm_run_scenario(c, &r) == NHQM_OK);
  const auto j = nlohmann::json::parse(nhqm_report_json(r));
  CHECK(j["scenario"] == "eigenfunctions");
  CHECK((nhqm_report_passed(r) != 0) == j["passed"].get<bool>());
  nhqm_report_free(r);
  CHECK(nhqm_run_scenario(nullptr, &r) == NHQM_INVALID_ARGUMENT);
  nhqm_config_free(c);
}

TEST_CASE("csv comparison") {
  std::ofstream("capi_a.csv") << "t,value\n0,1\n1,0.5\n2,0.25\n";
  std::ofstream("capi_b.csv") << "t,value\n0,1\n1,0.51\n2,0.255\n";
  int passed = -1;
  char* report = nullptr;
  REQUIRE(nhqm_compare_csv("capi_a.csv", "capi_b.csv", 0.0, 0.05, 0, &passed, &report) == NHQM_OK);
  CHECK(passed == 1);
  REQUIRE(report != nullptr);
  const auto j = nlohmann::json::parse(report);
  CHECK(j["max_deviation"].get<double>() == doctest::Approx(0.01 / 0.51));
  nhqm_string_free(report);
  CHECK(nhqm_compare_csv("capi_a.csv", "capi_b.csv", 0.0, 0.01, 0, &passed, nullptr) == NHQM_OK);
  CHECK(passed == 0);
  CHECK(nhqm_compare_csv("capi_a.csv", "nope.csv", 0.0, 0.05, 0, &passed, nullptr) == NHQM_IO_ERROR);
}

TEST_CASE("last error is per thread") {
  nhqm_config* c = nullptr;
  CHECK(nhqm_config_parse("scenario = x\n", &c) == NHQM_PARSE_ERROR);
  const std::string main_err = nhqm_last_error();
  std::string other;
  std::thread([&] { other = nhqm_last_error(); }).join();
  CHECK_FALSE(main_err.empty());
  CHECK(other.empty());
}
