#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhqm/nhqm.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

int thread_cap(std::size_t jobs) {
  int n = 0;
  if (const char* env = std::getenv("NHQM_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min<int>(n, static_cast<int>(jobs)));
}

struct RunOutcome {
  int code = kExitPass;
  std::string text;
};

RunOutcome run_one(const std::string& path, const std::string& out_dir) {
  RunOutcome r;
  nhqm_config* cfg = nullptr;
  if (nhqm_config_load(path.c_str(), &cfg) != NHQM_OK) {
    r.code = kExitInput;
    r.text = path + ": error: " + nhqm_last_error() + "\n";
    return r;
  }
  if (!out_dir.empty()) nhqm_config_set_out_dir(cfg, out_dir.c_str());
  const std::string scenario = nhqm_config_scenario(cfg);
  nhqm_report* rep = nullptr;
  const nhqm_status st = nhqm_run_scenario(cfg, &rep);
  nhqm_config_free(cfg);
  if (st != NHQM_OK) {
    r.code = kExitInput;
    r.text = path + ": " + scenario + ": error: " + nhqm_last_error() + "\n";
    return r;
  }
  const bool passed = nhqm_report_passed(rep) != 0;
  const auto j = nlohmann::json::parse(nhqm_report_json(rep));
  nhqm_report_free(rep);
  r.code = passed ? kExitPass : kExitFail;
  r.text = path + ": " + scenario + ": " + (passed ? "PASS" : "FAIL") + "\n";
  for (const auto& c : j["checks"]) {
    r.text += std::string("  ") + (c["passed"].get<bool>() ? "ok   " : "FAIL ") + c["name"].get<std::string>();
    for (const char* key : {"max_deviation", "ratio", "imag_ratio", "count", "jumps", "error"})
      if (c.contains(key)) r.text += std::string(" ") + key + "=" + c[key].dump();
    r.text += "\n";
  }
  return r;
}

int cmd_run(const std::vector<std::string>& configs, const std::string& out_dir) {
  if (!out_dir.empty() && configs.size() > 1) {
    std::cerr << "error: --out-dir needs a single config\n";
    return kExitInput;
  }
  std::vector<RunOutcome> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) results[i] = run_one(configs[i], out_dir);
  };
  std::vector<std::thread> pool;
  const int n = thread_cap(configs.size());
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitPass;
  for (const auto& r : results) {
    std::cout << r.text;
    code = std::max(code, r.code);
  }
  return code;
}

const char* class_name(nhqm_state_class c) {
  switch (c) {
    case NHQM_BOUND: return "bound";
    case NHQM_RESONANCE: return "resonance";
    case NHQM_ROTATED_CONTINUUM: return "rotated_continuum";
  }
  return "?";
}

int cmd_spectrum(const std::string& path, const std::string& output) {
  nhqm_config* cfg = nullptr;
  if (nhqm_config_load(path.c_str(), &cfg) != NHQM_OK) {
    std::cerr << path << ": error: " << nhqm_last_error() << "\n";
    return kExitInput;
  }
  nhqm_spectrum* s = nullptr;
  const nhqm_status st = nhqm_spectrum_from_config(cfg, &s);
  nhqm_config_free(cfg);
  if (st != NHQM_OK) {
    std::cerr << path << ": error: " << nhqm_last_error() << "\n";
    return kExitInput;
  }
  int code = kExitPass;
  if (nhqm_spectrum_write_csv(s, output.c_str()) != NHQM_OK) {
    std::cerr << "error: " << nhqm_last_error() << "\n";
    code = kExitInput;
  } else {
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < nhqm_spectrum_size(s); ++i) {
      nhqm_state_class c;
      double re = 0.0;
      double im = 0.0;
      nhqm_spectrum_class(s, i, &c);
      nhqm_spectrum_energy(s, i, &re, &im);
      ++counts[c];
      if (c != NHQM_ROTATED_CONTINUUM) std::printf("%-10s %.12f %+.6e i\n", class_name(c), re, im);
    }
    std::printf("states=%zu bound=%zu resonance=%zu rotated_continuum=%zu -> %s\n", nhqm_spectrum_size(s), counts[0],
                counts[1], counts[2], output.c_str());
  }
  nhqm_spectrum_free(s);
  return code;
}

int cmd_compare(const std::string& a, const std::string& b, double tstar, double threshold, bool scaled) {
  int passed = 0;
  char* json = nullptr;
  if (nhqm_compare_csv(a.c_str(), b.c_str(), tstar, threshold, scaled ? 1 : 0, &passed, &json) != NHQM_OK) {
    std::cerr << "error: " << nhqm_last_error() << "\n";
    return kExitInput;
  }
  std::cout << json << "\n";
  nhqm_string_free(json);
  return passed ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex-scaled wavepacket dynamics: F-product vs Hermitian reference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nhqm_version()));

  std::vector<std::string> configs;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run scenario configs (exit 0 pass, 1 check failure, 2 input error)");
  run->add_option("config", configs, "Config files")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Override out_dir (single config only)");

  std::string spec_config;
  std::string spec_out = "spectrum.csv";
  auto* spectrum = app.add_subcommand("spectrum", "Diagonalize H(theta) from a config and write the spectrum CSV");
  spectrum->add_option("config", spec_config, "Config file")->required()->check(CLI::ExistingFile);
  spectrum->add_option("-o,--output", spec_out, "Output CSV path");

  std::string csv_a;
  std::string csv_b;
  double tstar = 0.0;
  double threshold = 0.05;
  bool scaled = false;
  auto* compare = app.add_subcommand("compare", "Compare two CSV series beyond t*");
  compare->add_option("a", csv_a, "Series under test")->required()->check(CLI::ExistingFile);
  compare->add_option("b", csv_b, "Reference series")->required()->check(CLI::ExistingFile);
  compare->add_option("--tstar", tstar, "Transient cutoff");
  compare->add_option("--threshold", threshold, "Maximum allowed relative deviation");
  compare->add_flag("--scaled", scaled, "Deviation relative to max |b| instead of pointwise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitInput;
  }

  if (*run) return cmd_run(configs, out_dir);
  if (*spectrum) return cmd_spectrum(spec_config, spec_out);
  return cmd_compare(csv_a, csv_b, tstar, threshold, scaled);
}
