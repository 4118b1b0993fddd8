#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "error.hpp"
#include "hermitian.hpp"
#include "spectrum.hpp"

namespace nhqm {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "scenario", "sigma",  "k0",       "x0",      "theta",     "theta_alt", "grid_n",
      "grid_l",   "herm_grid_n", "herm_grid_l", "dt", "t_min", "t_max",     "n_samples",
      "region_a", "out_dir", "strict",  "quad_coef", "shift",   "gauss_exp", "mass"};
  return keys;
}

double to_double(const std::string& origin, const std::string& key, const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos == e.value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument(origin + ":" + std::to_string(e.line) + ": key '" + key + "' expects a number, got '" + e.value + "'");
}

int to_int(const std::string& origin, const std::string& key, const Entry& e) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(e.value, &pos);
    if (pos == e.value.size() && v >= -2147483647L && v <= 2147483647L) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw InvalidArgument(origin + ":" + std::to_string(e.line) + ": key '" + key + "' expects an integer, got '" + e.value + "'");
}

bool to_bool(const std::string& origin, const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw InvalidArgument(origin + ":" + std::to_string(e.line) + ": key '" + key + "' expects true or false, got '" + e.value + "'");
}

void apply_scenario_defaults(ScenarioConfig& c) {
  c.wavepacket = WavepacketSpec{};
  switch (c.scenario) {
    case ScenarioName::eigenfunctions:
      c.t_min = 0.0;
      c.t_max = 0.0;
      c.n_samples = 0;
      break;
    case ScenarioName::wide_norm:
      c.wavepacket.sigma = 3.87;
      c.t_max = 240.0;
      c.n_samples = 241;
      break;
    case ScenarioName::narrow_norm:
      c.wavepacket.sigma = 0.71;
      c.t_max = 45.0;
      c.n_samples = 451;
      break;
    case ScenarioName::mean_position:
      c.wavepacket.sigma = 3.87;
      c.wavepacket.k0 = 1.0;
      c.t_max = 110.0;
      c.n_samples = 221;
      break;
    case ScenarioName::phase_reality:
      c.wavepacket.sigma = 3.87;
      c.wavepacket.k0 = 1.0;
      c.t_min = 300.0;
      c.t_max = 350.0;
      c.n_samples = 501;
      c.theta_alt = 0.35;
      break;
  }
  c.out_dir = std::string("nhqm_out/") + to_string(c.scenario);
}

double sample_spacing(const ScenarioConfig& c) { return (c.t_max - c.t_min) / (c.n_samples - 1); }

long long sample_stride(const ScenarioConfig& c) {
  const double spacing = sample_spacing(c);
  const long long stride = std::llround(spacing / c.dt);
  if (stride < 1 || std::abs(static_cast<double>(stride) * c.dt - spacing) > 1e-9 * spacing)
    throw InvalidArgument("config: sample spacing " + num(spacing) + " is not a whole number of time steps dt = " + num(c.dt));
  return stride;
}

// ---- run helpers -------------------------------------------------------

struct Checks {
  json list = json::array();
  bool all = true;

  void add(const std::string& name, bool ok, json details) {
    json j;
    j["name"] = name;
    j["passed"] = ok;
    for (auto it = details.begin(); it != details.end(); ++it) j[it.key()] = it.value();
    list.push_back(std::move(j));
    all = all && ok;
  }
};

struct NhContext {
  GridPtr grid;
  std::shared_ptr<const Spectrum> spectrum;
  BarrierTop barrier;
  InteractionWidths widths;
  InteractionRegion region;
  std::vector<std::string> warnings;
};

NhContext nh_context(const ScenarioConfig& cfg, double theta) {
  NhContext ctx;
  ctx.grid = make_grid(cfg.grid_n, cfg.grid_l);
  ctx.barrier = barrier_tops(cfg.params);
  ScaledHamiltonian h = build_hamiltonian(ctx.grid, ScalingAngle(theta), cfg.params, cfg.strict);
  ctx.warnings = h.warnings;
  ctx.spectrum = std::make_shared<const Spectrum>(classify_states(eigendecompose(h), ctx.barrier.height));
  ctx.widths = choose_interaction_width(*ctx.spectrum, ctx.barrier.position);
  ctx.region = cfg.region_a ? InteractionRegion{0.5 * *cfg.region_a} : ctx.widths.chosen;
  return ctx;
}

json region_json(const NhContext& ctx, const ScenarioConfig& cfg) {
  json j;
  j["half_width"] = ctx.region.half_width;
  j["a"] = 2.0 * ctx.region.half_width;
  j["source"] = cfg.region_a ? "config" : "barrier_top";
  j["barrier_half_width"] = ctx.widths.barrier_half_width;
  if (ctx.widths.density_half_width)
    j["density_half_width"] = *ctx.widths.density_half_width;
  else
    j["density_half_width"] = nullptr;
  return j;
}

json spectrum_summary(const Spectrum& s) {
  json j;
  j["theta"] = s.theta.value();
  j["states"] = s.size();
  j["bound"] = s.count(StateClass::bound);
  j["resonance"] = s.count(StateClass::resonance);
  j["rotated_continuum"] = s.count(StateClass::rotated_continuum);
  json res = json::array();
  for (const EigenPair& p : s.pairs) {
    if (p.cls == StateClass::rotated_continuum) continue;
    json r;
    r["class"] = to_string(p.cls);
    r["re_e"] = p.energy.real();
    r["im_e"] = p.energy.imag();
    r["gamma"] = p.width();
    r["parity"] = to_string(p.parity);
    r["below_barrier"] = p.below_barrier;
    r["low_confidence"] = p.low_confidence;
    r["interior_weight"] = p.interior_weight;
    res.push_back(std::move(r));
  }
  j["localized_states"] = std::move(res);
  return j;
}

FPWavepacket make_wavepacket(const ScenarioConfig& cfg, const NhContext& ctx) {
  const ScaledInitialStates init = scaled_initial_states(cfg.wavepacket, ctx.spectrum->theta, ctx.grid);
  return expand(init.right, init.left, ctx.spectrum);
}

// Hermitian reference: one value per configured sample time.
struct QmRun {
  TimeSeries series;
  double max_norm_drift = 0.0;
};

QmRun qm_series(const ScenarioConfig& cfg, const std::string& label,
                const std::function<cplx(const GridFunction&)>& quantity) {
  const GridPtr g = make_grid(cfg.herm_grid_n, cfg.herm_grid_l);
  const GridFunction psi0 = gaussian_state(cfg.wavepacket, g);
  PropagatorConfig pc;
  pc.grid = g;
  pc.dt = cfg.dt;
  pc.t_max = cfg.t_max;
  const long long stride = sample_stride(cfg);
  pc.sample_stride = static_cast<int>(stride);
  const std::vector<double> times = cfg.sample_times();
  const long long first = std::llround(cfg.t_min / cfg.dt) / stride;

  QmRun run;
  run.series.label = label;
  run.series.formalism = Formalism::QM;
  run.series.times = times;
  run.series.values.assign(times.size(), cplx(0.0));
  std::size_t recorded = 0;
  split_operator_propagate(psi0, pc, cfg.params, [&](double t, const GridFunction& psi) {
    const long long k = std::llround(t / (static_cast<double>(stride) * cfg.dt)) - first;
    run.max_norm_drift = std::max(run.max_norm_drift, std::abs(total_norm(psi) - 1.0));
    if (k < 0 || k >= static_cast<long long>(times.size())) return;
    run.series.values[static_cast<std::size_t>(k)] = quantity(psi);
    ++recorded;
  });
  if (recorded != times.size()) throw NumericalError("hermitian reference recorded " + std::to_string(recorded) +
                                                     " of " + std::to_string(times.size()) + " samples");
  return run;
}

TimeSeries fp_series(const std::vector<double>& times, const std::string& label, Formalism f,
                     const std::function<cplx(double)>& value) {
  TimeSeries s;
  s.times = times;
  s.label = label;
  s.formalism = f;
  s.values.reserve(times.size());
  for (double t : times) s.values.push_back(value(t));
  return s;
}

std::string write(const ScenarioConfig& cfg, const std::string& name, const std::string& text, ScenarioResult& out) {
  const std::string path = (fs::path(cfg.out_dir) / name).string();
  write_text_file(path, text);
  out.files.push_back(path);
  return path;
}

json completeness_json(const FPWavepacket& wp) {
  const cplx c = wp.completeness();
  return {{"re", c.real()}, {"im", c.imag()}, {"error", std::abs(c - 1.0)}, {"tolerance", kCompletenessTolerance}};
}

std::size_t derivative_sign_changes(const TimeSeries& s) {
  std::size_t changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double d = s.values[i].real() - s.values[i - 1].real();
    const int sg = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

std::string grid_dump(const Grid& g, const CVector& v) {
  std::string out = "x,re_value,im_value,abs_value\n";
  char buf[160];
  for (int i = 0; i < g.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.point(i), v[i].real(), v[i].imag(), std::abs(v[i]));
    out += buf;
  }
  return out;
}

json energy_json(const EigenPair& p) {
  return {{"re_e", p.energy.real()}, {"im_e", p.energy.imag()}, {"gamma", p.width()}, {"class", to_string(p.cls)}};
}

// ---- scenarios -----------------------------------------------------------

void run_eigenfunctions(const ScenarioConfig& cfg, ScenarioResult& out, Checks& checks, json& rep) {
  const NhContext ctx = nh_context(cfg, cfg.theta);
  const Spectrum& s = *ctx.spectrum;
  const Grid& g = *ctx.grid;
  rep["warnings"] = ctx.warnings;
  rep["region"] = region_json(ctx, cfg);
  rep["spectrum"] = spectrum_summary(s);
  write(cfg, "spectrum.csv", spectrum_csv(s), out);

  const double vb = ctx.barrier.height;
  std::optional<std::size_t> bound, isolated, broad, continuum;
  std::size_t n_bound = 0;
  std::size_t n_below = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const EigenPair& p = s.pairs[k];
    if (p.cls == StateClass::bound) {
      ++n_bound;
      if (!bound) bound = k;
    }
    const bool confident_res = p.cls == StateClass::resonance && !p.low_confidence && p.energy.real() > 0.0;
    if (confident_res && p.below_barrier) {
      ++n_below;
      if (!isolated || p.width() < s.pairs[*isolated].width()) isolated = k;
    }
    if (confident_res && !p.below_barrier && (!broad || p.energy.real() < s.pairs[*broad].energy.real())) broad = k;
    if (p.cls == StateClass::rotated_continuum && !p.low_confidence && p.energy.real() < vb &&
        (!continuum || p.energy.real() > s.pairs[*continuum].energy.real()))
      continuum = k;
  }

  checks.add("one_bound_state", n_bound == 1, {{"count", n_bound}});
  checks.add("two_resonances_below_barrier", n_below >= 2, {{"count", n_below}, {"barrier_height", vb}});

  json states;
  const double half = ctx.region.half_width;
  auto exterior_max = [&](const CVector& v) {
    double m = 0.0;
    for (int i = 0; i < g.size(); ++i)
      if (std::abs(g.point(i)) > half) m = std::max(m, std::abs(v[i]));
    return m;
  };
  auto interior_max = [&](const CVector& v) {
    double m = 0.0;
    for (int i = 0; i < g.size(); ++i)
      if (std::abs(g.point(i)) <= half) m = std::max(m, std::abs(v[i]));
    return m;
  };
  auto dump = [&](const char* name, std::optional<std::size_t> k) {
    if (!k) {
      states[name] = nullptr;
      return;
    }
    write(cfg, std::string("state_") + name + ".csv", grid_dump(g, s.pairs[*k].vector.values), out);
    states[name] = energy_json(s.pairs[*k]);
  };
  dump("bound", bound);
  dump("isolated_resonance", isolated);
  dump("continuum", continuum);
  dump("broad_resonance", broad);
  rep["states"] = states;

  if (isolated) {
    const CVector& v = s.pairs[*isolated].vector.values;
    const double peak = v.cwiseAbs().maxCoeff();
    const double ratio = exterior_max(v) / peak;
    const double dens = density_half_width(s, {*isolated});
    checks.add("resonance_exterior_amplitude", ratio < 0.05,
               {{"ratio", ratio}, {"threshold", 0.05}, {"half_width", half}, {"density_half_width_99", dens}});
  } else {
    checks.add("resonance_exterior_amplitude", false, {{"reason", "no isolated resonance found"}});
  }
  if (continuum) {
    const CVector& v = s.pairs[*continuum].vector.values;
    const double in = interior_max(v);
    const double ex = exterior_max(v);
    checks.add("continuum_interior_amplitude", in < ex, {{"interior_max", in}, {"exterior_max", ex}, {"half_width", half}});
  } else {
    checks.add("continuum_interior_amplitude", false, {{"reason", "no continuum state below the barrier"}});
  }
}

void run_wide_norm(const ScenarioConfig& cfg, ScenarioResult& out, Checks& checks, json& rep) {
  const NhContext ctx = nh_context(cfg, cfg.theta);
  rep["warnings"] = ctx.warnings;
  rep["region"] = region_json(ctx, cfg);
  const FPWavepacket wp = make_wavepacket(cfg, ctx);
  const auto times = cfg.sample_times();
  const double tstar = transient_cutoff(cfg.wavepacket, ctx.barrier.position, cfg.params.mass);
  rep["t_star"] = tstar;

  const TimeSeries fp = fp_series(times, "N_FP", Formalism::FP, [&](double t) { return wp.norm(t); });
  const TimeSeries np = fp_series(times, "N_NP", Formalism::NP, [&](double t) { return cplx(wp.np_norm(t)); });
  const InteractionRegion region = ctx.region;
  const QmRun qm = qm_series(cfg, "N_QM", [&](const GridFunction& psi) { return cplx(region_norm(psi, region)); });

  write(cfg, "norm_fp.csv", norm_csv(fp, true), out);
  write(cfg, "norm_qm.csv", norm_csv(qm.series), out);
  write(cfg, "norm_np.csv", norm_csv(np), out);

  const json comp = completeness_json(wp);
  checks.add("completeness", comp["error"].get<double>() < kCompletenessTolerance, {{"value", comp}});

  const ComparisonReport cr = compare_series(fp, qm.series, {tstar, 0.05, DeviationMode::pointwise, true});
  rep["comparison"] = to_json(cr);
  checks.add("fp_vs_qm_norm", cr.passed, {{"max_deviation", cr.max_deviation}, {"threshold", cr.threshold}});

  const std::size_t changes = derivative_sign_changes(np);
  checks.add("np_norm_oscillates", changes >= 1, {{"derivative_sign_changes", changes}});

  bool monotone = true;
  double worst = 0.0;
  for (std::size_t i = 1; i < fp.size(); ++i) {
    const double step = std::log(std::abs(fp.values[i])) - std::log(std::abs(fp.values[i - 1]));
    worst = std::max(worst, step);
    if (step > 1e-12) monotone = false;
  }
  checks.add("fp_log_norm_monotone", monotone, {{"max_log_increase", worst}});

  const cplx k_end = wp.decay_rate(times.back());
  double gamma_min = INFINITY;
  for (const EigenPair& p : ctx.spectrum->pairs)
    if (p.cls == StateClass::resonance && !p.low_confidence && p.width() > 0.0) gamma_min = std::min(gamma_min, p.width());
  rep["decay"] = {{"k_fp_final", k_end.real()}, {"k_fp_final_imag", k_end.imag()}, {"gamma_min_resonance", gamma_min}};
  rep["np_norm_t0"] = {{"spectral", np.values.front().real()},
                       {"direct", total_norm(scaled_initial_states(cfg.wavepacket, ctx.spectrum->theta, ctx.grid).right)}};
  rep["hermitian_norm_drift"] = qm.max_norm_drift;
}

void run_narrow_norm(const ScenarioConfig& cfg, ScenarioResult& out, Checks& checks, json& rep) {
  const NhContext ctx = nh_context(cfg, cfg.theta);
  rep["warnings"] = ctx.warnings;
  rep["region"] = region_json(ctx, cfg);
  const FPWavepacket wp = make_wavepacket(cfg, ctx);
  const auto times = cfg.sample_times();
  const double tstar = transient_cutoff(cfg.wavepacket, ctx.barrier.position, cfg.params.mass);
  rep["t_star"] = tstar;

  const TimeSeries fp = fp_series(times, "N_FP", Formalism::FP, [&](double t) { return wp.norm(t); });
  const InteractionRegion region = ctx.region;
  const QmRun qm = qm_series(cfg, "N_QM", [&](const GridFunction& psi) { return cplx(region_norm(psi, region)); });
  write(cfg, "norm_fp.csv", norm_csv(fp, true), out);
  write(cfg, "norm_qm.csv", norm_csv(qm.series), out);

  const json comp = completeness_json(wp);
  checks.add("completeness", comp["error"].get<double>() < kCompletenessTolerance, {{"value", comp}});

  if (cfg.t_min == 0.0) {
    const double nqm0 = qm.series.values.front().real();
    checks.add("qm_initially_inside", nqm0 > 0.99, {{"n_qm_0", nqm0}, {"threshold", 0.99}});
    const double nfp0_err = std::abs(fp.values.front() - 1.0);
    checks.add("fp_norm_starts_at_one", nfp0_err < 1e-6, {{"error", nfp0_err}, {"tolerance", 1e-6}});
  }

  // NH decay starts at once; QM stays near one until the packet reaches the barriers.
  std::size_t in_window = 0;
  bool below = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || times[i] > 0.5 * tstar) continue;
    ++in_window;
    if (!(std::abs(fp.values[i]) < qm.series.values[i].real())) below = false;
  }
  checks.add("fp_below_qm_initially", in_window > 0 && below, {{"window_end", 0.5 * tstar}, {"samples", in_window}});

  const ComparisonReport cr = compare_series(fp, qm.series, {tstar, 0.05, DeviationMode::pointwise, true});
  rep["comparison"] = to_json(cr);
  checks.add("fp_vs_qm_norm", cr.passed, {{"max_deviation", cr.max_deviation}, {"threshold", cr.threshold}});
  rep["hermitian_norm_drift"] = qm.max_norm_drift;
}

void run_mean_position(const ScenarioConfig& cfg, ScenarioResult& out, Checks& checks, json& rep) {
  const NhContext ctx = nh_context(cfg, cfg.theta);
  rep["warnings"] = ctx.warnings;
  rep["region"] = region_json(ctx, cfg);
  const FPWavepacket wp = make_wavepacket(cfg, ctx);
  const auto times = cfg.sample_times();
  const double tstar = transient_cutoff(cfg.wavepacket, ctx.barrier.position, cfg.params.mass);
  rep["t_star"] = tstar;

  const TimeSeries fp = fp_series(times, "x_FP", Formalism::FP,
                                  [&](double t) { return wp.expectation(Observable::position, t).value; });
  const InteractionRegion region = ctx.region;
  const QmRun qm = qm_series(cfg, "x_QM", [&](const GridFunction& psi) {
    return cplx(region_expectation(psi, RegionObservable::position, region));
  });
  TimeSeries diff = fp;
  diff.label = "x_FP - x_QM";
  for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] -= qm.series.values[i];

  write(cfg, "mean_x_fp.csv", observable_csv(fp), out);
  write(cfg, "mean_x_qm.csv", observable_csv(qm.series), out);
  write(cfg, "mean_x_diff.csv", observable_csv(diff), out);

  const json comp = completeness_json(wp);
  checks.add("completeness", comp["error"].get<double>() < kCompletenessTolerance, {{"value", comp}});
  const ComparisonReport cr = compare_series(fp, qm.series, {tstar, 0.10, DeviationMode::scaled, false});
  rep["comparison"] = to_json(cr);
  checks.add("fp_vs_qm_mean_position", cr.passed, {{"max_deviation", cr.max_deviation}, {"threshold", cr.threshold}});
  rep["hermitian_norm_drift"] = qm.max_norm_drift;
}

void run_phase_reality(const ScenarioConfig& cfg, ScenarioResult& out, Checks& checks, json& rep) {
  const NhContext ctx = nh_context(cfg, cfg.theta);
  rep["warnings"] = ctx.warnings;
  const FPWavepacket wp = make_wavepacket(cfg, ctx);
  const auto times = cfg.sample_times();

  auto observables = [&](const FPWavepacket& w) {
    return std::pair{
        fp_series(times, "x_FP", Formalism::FP, [&](double t) { return w.expectation(Observable::position, t).value; }),
        fp_series(times, "p_FP", Formalism::FP, [&](double t) { return w.expectation(Observable::momentum, t).value; })};
  };
  const auto [x, p] = observables(wp);
  write(cfg, "mean_x_fp.csv", observable_csv(x), out);
  write(cfg, "mean_p_fp.csv", observable_csv(p), out);

  const json comp = completeness_json(wp);
  checks.add("completeness", comp["error"].get<double>() < kCompletenessTolerance, {{"value", comp}});

  for (const TimeSeries* s : {&x, &p}) {
    const RealityReport r = imaginary_ratio(*s);
    checks.add("reality_" + s->label, r.ratio < 1e-3,
               {{"imag_ratio", r.ratio}, {"threshold", 1e-3}, {"series_max", r.series_max}, {"samples_used", r.samples_used}});
  }

  json jumps = json::array();
  std::size_t total = 0;
  std::size_t aligned = 0;
  for (const TimeSeries* s : {&x, &p}) {
    for (const PhaseJump& j : detect_phase_jumps(*s)) {
      ++total;
      if (j.aligned) ++aligned;
      jumps.push_back({{"series", s->label}, {"t", j.t}, {"jump", j.jump}, {"aligned", j.aligned}});
    }
  }
  rep["phase_jumps"] = jumps;
  checks.add("phase_jumps_at_sign_changes", total >= 1 && aligned == total, {{"jumps", total}, {"aligned", aligned}});

  if (cfg.theta_alt) {
    ScenarioConfig alt = cfg;
    alt.theta = *cfg.theta_alt;
    const NhContext actx = nh_context(alt, alt.theta);
    const FPWavepacket awp = make_wavepacket(alt, actx);
    auto [ax, ap] = observables(awp);
    ax.label = "x_FP_theta_alt";
    ap.label = "p_FP_theta_alt";
    write(cfg, "mean_x_fp_theta_alt.csv", observable_csv(ax), out);
    write(cfg, "mean_p_fp_theta_alt.csv", observable_csv(ap), out);
    const ComparisonReport rx = compare_series(x, ax, {-INFINITY, 1e-3, DeviationMode::scaled, false});
    const ComparisonReport rp = compare_series(p, ap, {-INFINITY, 1e-3, DeviationMode::scaled, false});
    checks.add("theta_independence_x", rx.passed,
               {{"theta", cfg.theta}, {"theta_alt", *cfg.theta_alt}, {"max_deviation", rx.max_deviation}, {"threshold", 1e-3}});
    checks.add("theta_independence_p", rp.passed,
               {{"theta", cfg.theta}, {"theta_alt", *cfg.theta_alt}, {"max_deviation", rp.max_deviation}, {"threshold", 1e-3}});
  }
}

}  // namespace

const char* to_string(ScenarioName s) noexcept {
  switch (s) {
    case ScenarioName::eigenfunctions: return "eigenfunctions";
    case ScenarioName::wide_norm: return "wide_norm";
    case ScenarioName::narrow_norm: return "narrow_norm";
    case ScenarioName::mean_position: return "mean_position";
    case ScenarioName::phase_reality: return "phase_reality";
  }
  return "unknown";
}

ScenarioName scenario_from_string(const std::string& s) {
  for (ScenarioName n : {ScenarioName::eigenfunctions, ScenarioName::wide_norm, ScenarioName::narrow_norm,
                         ScenarioName::mean_position, ScenarioName::phase_reality})
    if (s == to_string(n)) return n;
  throw InvalidArgument("unknown scenario '" + s + "'");
}

std::vector<double> ScenarioConfig::sample_times() const {
  std::vector<double> t;
  if (n_samples < 2) return t;
  t.reserve(static_cast<std::size_t>(n_samples));
  const double h = (t_max - t_min) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) t.push_back(i + 1 == n_samples ? t_max : t_min + i * h);
  return t;
}

bool ScenarioConfig::needs_propagation() const noexcept {
  return scenario == ScenarioName::wide_norm || scenario == ScenarioName::narrow_norm ||
         scenario == ScenarioName::mean_position;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw InvalidArgument(where + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw InvalidArgument(where + ": unknown key '" + key + "'");
    if (entries.count(key)) throw InvalidArgument(where + ": key '" + key + "' repeated (first on line " +
                                                  std::to_string(entries[key].line) + ")");
    if (value.empty()) throw InvalidArgument(where + ": key '" + key + "' has no value");
    entries[key] = {value, lineno};
  }
  const auto sc = entries.find("scenario");
  if (sc == entries.end()) throw InvalidArgument(origin + ": missing required key 'scenario'");

  ScenarioConfig c;
  try {
    c.scenario = scenario_from_string(sc->second.value);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(origin + ":" + std::to_string(sc->second.line) + ": " + e.what());
  }
  apply_scenario_defaults(c);

  for (const auto& [key, e] : entries) {
    if (key == "scenario") continue;
    if (key == "sigma") c.wavepacket.sigma = to_double(origin, key, e);
    else if (key == "k0") c.wavepacket.k0 = to_double(origin, key, e);
    else if (key == "x0") c.wavepacket.x0 = to_double(origin, key, e);
    else if (key == "theta") c.theta = to_double(origin, key, e);
    else if (key == "theta_alt") {
      if (e.value == "none") c.theta_alt.reset();
      else c.theta_alt = to_double(origin, key, e);
    }
    else if (key == "grid_n") c.grid_n = to_int(origin, key, e);
    else if (key == "grid_l") c.grid_l = to_double(origin, key, e);
    else if (key == "herm_grid_n") c.herm_grid_n = to_int(origin, key, e);
    else if (key == "herm_grid_l") c.herm_grid_l = to_double(origin, key, e);
    else if (key == "dt") c.dt = to_double(origin, key, e);
    else if (key == "t_min") c.t_min = to_double(origin, key, e);
    else if (key == "t_max") c.t_max = to_double(origin, key, e);
    else if (key == "n_samples") c.n_samples = to_int(origin, key, e);
    else if (key == "region_a") {
      if (e.value == "auto") c.region_a.reset();
      else c.region_a = to_double(origin, key, e);
    }
    else if (key == "out_dir") c.out_dir = e.value;
    else if (key == "strict") c.strict = to_bool(origin, key, e);
    else if (key == "quad_coef") c.params.quad_coef = to_double(origin, key, e);
    else if (key == "shift") c.params.shift = to_double(origin, key, e);
    else if (key == "gauss_exp") c.params.gauss_exp = to_double(origin, key, e);
    else if (key == "mass") c.params.mass = to_double(origin, key, e);
  }
  try {
    validate_config(c);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(origin + ": " + e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

void validate_config(const ScenarioConfig& c) {
  c.params.validate();
  (void)ScalingAngle(c.theta);
  if (c.theta_alt) (void)ScalingAngle(*c.theta_alt);
  const GridPtr g = make_grid(c.grid_n, c.grid_l);
  if (c.strict) {
    for (double th : {c.theta, c.theta_alt.value_or(c.theta)})
      if (std::abs(potential_value(0.5 * c.grid_l, th, c.params)) >= kEdgePotentialTolerance)
        throw InvalidArgument("grid_l " + num(c.grid_l) + " too small: potential does not vanish at the box edge");
  }
  if (c.out_dir.empty()) throw InvalidArgument("out_dir must not be empty");
  if (c.region_a && !(*c.region_a > 0.0 && *c.region_a < std::min(c.grid_l, c.herm_grid_l)))
    throw InvalidArgument("region_a must lie in (0, grid extent)");
  if (c.scenario == ScenarioName::eigenfunctions) return;

  (void)scaled_initial_states(c.wavepacket, ScalingAngle(c.theta), g);
  if (c.n_samples < 2) throw InvalidArgument("n_samples must be >= 2");
  if (!(c.t_min >= 0.0) || !(c.t_max > c.t_min)) throw InvalidArgument("need 0 <= t_min < t_max");

  if (c.needs_propagation()) {
    const GridPtr hg = make_grid(c.herm_grid_n, c.herm_grid_l);
    PropagatorConfig pc;
    pc.grid = hg;
    pc.dt = c.dt;
    pc.t_max = c.t_max;
    const long long stride = sample_stride(c);
    if (stride > 2147483647LL) throw InvalidArgument("sample spacing too large for dt");
    pc.sample_stride = static_cast<int>(stride);
    pc.validate(c.params);
    const double spacing = sample_spacing(c);
    const double m = c.t_min / spacing;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
      throw InvalidArgument("t_min must be a multiple of the sample spacing " + num(spacing));
    const GridFunction psi0 = gaussian_state(c.wavepacket, hg);
    const double tw = wraparound_time(psi0, c.params);
    if (c.t_max >= tw)
      throw InvalidArgument("t_max " + num(c.t_max) + " reaches the wrap-around time " + num(tw) +
                            " of the Hermitian grid; enlarge herm_grid_l");
  }
}

double transient_cutoff(const WavepacketSpec& spec, double barrier_x, double mass) {
  spec.validate();
  if (!(mass > 0.0)) throw InvalidArgument("transient_cutoff: mass must be positive");
  const double spread = 1.0 / (std::sqrt(2.0) * spec.sigma * mass);
  return std::max(0.0, barrier_x - std::abs(spec.x0)) / spread;
}

json to_json(const ComparisonReport& r) {
  json j;
  j["a"] = {{"label", r.a_label}, {"formalism", to_string(r.a_formalism)}};
  j["b"] = {{"label", r.b_label}, {"formalism", to_string(r.b_formalism)}};
  j["t_star"] = std::isfinite(r.t_star) ? json(r.t_star) : json(nullptr);
  j["mode"] = r.mode == DeviationMode::pointwise ? "pointwise" : "scaled";
  j["magnitudes"] = r.magnitudes;
  j["samples"] = r.samples;
  j["max_deviation"] = r.max_deviation;
  j["mean_deviation"] = r.mean_deviation;
  j["worst_time"] = r.worst_time;
  j["threshold"] = r.threshold;
  j["passed"] = r.passed;
  if (r.has_rates) j["mean_decay_rate"] = {{"a", r.a_mean_rate}, {"b", r.b_mean_rate}};
  return j;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());

  ScenarioResult out;
  Checks checks;
  json rep;
  rep["scenario"] = to_string(cfg.scenario);
  rep["theta"] = cfg.theta;
  rep["grid"] = {{"n", cfg.grid_n}, {"l", cfg.grid_l}};
  if (cfg.scenario != ScenarioName::eigenfunctions) {
    rep["wavepacket"] = {{"sigma", cfg.wavepacket.sigma}, {"k0", cfg.wavepacket.k0}, {"x0", cfg.wavepacket.x0}};
    rep["time"] = {{"t_min", cfg.t_min}, {"t_max", cfg.t_max}, {"n_samples", cfg.n_samples}};
  }
  if (cfg.needs_propagation())
    rep["hermitian"] = {{"n", cfg.herm_grid_n}, {"l", cfg.herm_grid_l}, {"dt", cfg.dt}};

  try {
    switch (cfg.scenario) {
      case ScenarioName::eigenfunctions: run_eigenfunctions(cfg, out, checks, rep); break;
      case ScenarioName::wide_norm: run_wide_norm(cfg, out, checks, rep); break;
      case ScenarioName::narrow_norm: run_narrow_norm(cfg, out, checks, rep); break;
      case ScenarioName::mean_position: run_mean_position(cfg, out, checks, rep); break;
      case ScenarioName::phase_reality: run_phase_reality(cfg, out, checks, rep); break;
    }
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("scenario ") + to_string(cfg.scenario) + ": " + e.what());
  } catch (const IoError&) {
    throw;
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("scenario ") + to_string(cfg.scenario) + ": " + e.what());
  }

  rep["checks"] = checks.list;
  rep["passed"] = checks.all;
  out.passed = checks.all;
  std::vector<std::string> names;
  for (const auto& f : out.files) names.push_back(fs::path(f).filename().string());
  rep["files"] = names;
  out.report = rep;
  write(cfg, "report.json", rep.dump(2) + "\n", out);
  return out;
}

}  // namespace nhqm
