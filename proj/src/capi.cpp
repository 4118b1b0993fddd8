#include "nhqm/nhqm.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "error.hpp"
#include "fp_dynamics.hpp"
#include "scenario.hpp"
#include "spectrum.hpp"
#include "time_series.hpp"

struct nhqm_config {
  nhqm::ScenarioConfig cfg;
};

struct nhqm_report {
  bool passed = false;
  std::string json;
};

struct nhqm_spectrum {
  std::shared_ptr<const nhqm::Spectrum> spectrum;
};

struct nhqm_wavepacket {
  std::unique_ptr<nhqm::FPWavepacket> wp;
};

namespace {

thread_local std::string g_last_error;

template <class F>
nhqm_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return NHQM_OK;
  } catch (const nhqm::InvalidArgument& e) {
    g_last_error = e.what();
    return NHQM_INVALID_ARGUMENT;
  } catch (const nhqm::NumericalError& e) {
    g_last_error = e.what();
    return NHQM_NUMERICAL_ERROR;
  } catch (const nhqm::IoError& e) {
    g_last_error = e.what();
    return NHQM_IO_ERROR;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NHQM_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NHQM_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return NHQM_INTERNAL_ERROR;
  }
}

nhqm_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return NHQM_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* nhqm_last_error(void) { return g_last_error.c_str(); }
const char* nhqm_version(void) { return "0.1.0"; }

nhqm_status nhqm_config_parse(const char* text, nhqm_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  const nhqm_status st = guarded([&] { *out = new nhqm_config{nhqm::parse_config(text)}; });
  return st == NHQM_INVALID_ARGUMENT ? NHQM_PARSE_ERROR : st;
}

nhqm_status nhqm_config_load(const char* path, nhqm_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  const nhqm_status st = guarded([&] { *out = new nhqm_config{nhqm::load_config(path)}; });
  return st == NHQM_INVALID_ARGUMENT ? NHQM_PARSE_ERROR : st;
}

nhqm_status nhqm_config_set_out_dir(nhqm_config* cfg, const char* dir) {
  if (!cfg) return null_arg("cfg");
  if (!dir || !*dir) return null_arg("dir");
  cfg->cfg.out_dir = dir;
  return NHQM_OK;
}

const char* nhqm_config_scenario(const nhqm_config* cfg) { return cfg ? nhqm::to_string(cfg->cfg.scenario) : ""; }

void nhqm_config_free(nhqm_config* cfg) { delete cfg; }

nhqm_status nhqm_run_scenario(const nhqm_config* cfg, nhqm_report** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const nhqm::ScenarioResult r = nhqm::run_scenario(cfg->cfg);
    *out = new nhqm_report{r.passed, r.report.dump(2)};
  });
}

int nhqm_report_passed(const nhqm_report* r) { return r && r->passed ? 1 : 0; }
const char* nhqm_report_json(const nhqm_report* r) { return r ? r->json.c_str() : ""; }
void nhqm_report_free(nhqm_report* r) { delete r; }

nhqm_status nhqm_spectrum_compute(const nhqm_config* cfg, int n, double l, double theta, nhqm_spectrum** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto& c = cfg->cfg;
    const nhqm::GridPtr g = nhqm::make_grid(n, l);
    const nhqm::ScaledHamiltonian h = nhqm::build_hamiltonian(g, nhqm::ScalingAngle(theta), c.params, c.strict);
    auto s = std::make_shared<const nhqm::Spectrum>(
        nhqm::classify_states(nhqm::eigendecompose(h), nhqm::barrier_tops(c.params).height));
    *out = new nhqm_spectrum{std::move(s)};
  });
}

nhqm_status nhqm_spectrum_from_config(const nhqm_config* cfg, nhqm_spectrum** out) {
  if (!cfg) return null_arg("cfg");
  return nhqm_spectrum_compute(cfg, cfg->cfg.grid_n, cfg->cfg.grid_l, cfg->cfg.theta, out);
}

size_t nhqm_spectrum_size(const nhqm_spectrum* s) { return s ? s->spectrum->size() : 0; }

nhqm_status nhqm_spectrum_energy(const nhqm_spectrum* s, size_t index, double* re, double* im) {
  if (!s) return null_arg("spectrum");
  if (!re || !im) return null_arg("re/im");
  if (index >= s->spectrum->size()) {
    g_last_error = "state index out of range";
    return NHQM_INVALID_ARGUMENT;
  }
  const auto e = s->spectrum->pairs[index].energy;
  *re = e.real();
  *im = e.imag();
  return NHQM_OK;
}

nhqm_status nhqm_spectrum_class(const nhqm_spectrum* s, size_t index, nhqm_state_class* cls) {
  if (!s) return null_arg("spectrum");
  if (!cls) return null_arg("cls");
  if (index >= s->spectrum->size()) {
    g_last_error = "state index out of range";
    return NHQM_INVALID_ARGUMENT;
  }
  switch (s->spectrum->pairs[index].cls) {
    case nhqm::StateClass::bound: *cls = NHQM_BOUND; break;
    case nhqm::StateClass::resonance: *cls = NHQM_RESONANCE; break;
    case nhqm::StateClass::rotated_continuum: *cls = NHQM_ROTATED_CONTINUUM; break;
  }
  return NHQM_OK;
}

nhqm_status nhqm_spectrum_write_csv(const nhqm_spectrum* s, const char* path) {
  if (!s) return null_arg("spectrum");
  if (!path) return null_arg("path");
  return guarded([&] { nhqm::write_spectrum_csv(path, *s->spectrum); });
}

void nhqm_spectrum_free(nhqm_spectrum* s) { delete s; }

nhqm_status nhqm_wavepacket_create(const nhqm_spectrum* s, double sigma, double k0, double x0, nhqm_wavepacket** out) {
  if (!s) return null_arg("spectrum");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const nhqm::WavepacketSpec spec{sigma, k0, x0};
    const auto init = nhqm::scaled_initial_states(spec, s->spectrum->theta, s->spectrum->grid);
    auto wp = std::make_unique<nhqm::FPWavepacket>(nhqm::expand(init.right, init.left, s->spectrum));
    *out = new nhqm_wavepacket{std::move(wp)};
  });
}

nhqm_status nhqm_fp_norm(const nhqm_wavepacket* wp, double t, double* re, double* im) {
  if (!wp) return null_arg("wavepacket");
  if (!re || !im) return null_arg("re/im");
  return guarded([&] {
    const auto v = wp->wp->norm(t);
    *re = v.real();
    *im = v.imag();
  });
}

nhqm_status nhqm_fp_decay_rate(const nhqm_wavepacket* wp, double t, double* re, double* im) {
  if (!wp) return null_arg("wavepacket");
  if (!re || !im) return null_arg("re/im");
  return guarded([&] {
    const auto v = wp->wp->decay_rate(t);
    *re = v.real();
    *im = v.imag();
  });
}

nhqm_status nhqm_fp_expectation(const nhqm_wavepacket* wp, nhqm_observable obs, double t, double* re, double* im,
                                double* phase) {
  if (!wp) return null_arg("wavepacket");
  if (!re || !im) return null_arg("re/im");
  if (obs != NHQM_POSITION && obs != NHQM_MOMENTUM) {
    g_last_error = "unknown observable";
    return NHQM_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto e = wp->wp->expectation(obs == NHQM_POSITION ? nhqm::Observable::position : nhqm::Observable::momentum, t);
    *re = e.value.real();
    *im = e.value.imag();
    if (phase) *phase = e.phase;
  });
}

nhqm_status nhqm_np_norm(const nhqm_wavepacket* wp, double t, double* value) {
  if (!wp) return null_arg("wavepacket");
  if (!value) return null_arg("value");
  return guarded([&] { *value = wp->wp->np_norm(t); });
}

void nhqm_wavepacket_free(nhqm_wavepacket* wp) { delete wp; }

nhqm_status nhqm_compare_csv(const char* path_a, const char* path_b, double tstar, double threshold, int scaled,
                             int* passed, char** report_json) {
  if (!path_a || !path_b) return null_arg("path");
  if (!passed) return null_arg("passed");
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    const nhqm::TimeSeries a = nhqm::read_series_csv(path_a);
    const nhqm::TimeSeries b = nhqm::read_series_csv(path_b, nhqm::Formalism::QM);
    nhqm::CompareOptions opt;
    opt.t_star = tstar;
    opt.threshold = threshold;
    opt.mode = scaled ? nhqm::DeviationMode::scaled : nhqm::DeviationMode::pointwise;
    const nhqm::ComparisonReport r = nhqm::compare_series(a, b, opt);
    *passed = r.passed ? 1 : 0;
    if (report_json) {
      const std::string text = nhqm::to_json(r).dump(2);
      char* buf = static_cast<char*>(std::malloc(text.size() + 1));
      if (!buf) throw std::bad_alloc();
      std::memcpy(buf, text.c_str(), text.size() + 1);
      *report_json = buf;
    }
  });
}

void nhqm_string_free(char* s) { std::free(s); }

}  // extern "C"
