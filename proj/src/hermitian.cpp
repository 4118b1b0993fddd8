#include "hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "error.hpp"

namespace nhqm {
namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void PropagatorConfig::validate(const PotentialParams& params) const {
  params.validate();
  if (!grid) throw InvalidArgument("propagator: no grid");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("propagator: dt must be positive");
  const double kmax = grid->nyquist();
  const double tmax_kin = kmax * kmax / (2.0 * params.mass);
  if (!(dt * tmax_kin < kPi))
    throw InvalidArgument("propagator: dt * max kinetic eigenvalue = " + num(dt * tmax_kin) + " is not below pi");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw InvalidArgument("propagator: t_max must be non-negative");
  if (sample_stride < 1) throw InvalidArgument("propagator: sample_stride must be >= 1");
}

long long PropagatorConfig::steps() const { return std::llround(t_max / dt); }

void InteractionRegion::validate(const Grid& grid) const {
  if (!(half_width > 0.0) || !(half_width < 0.5 * grid.extent()))
    throw InvalidArgument("interaction region: half-width " + num(half_width) + " must lie in (0, L/2)");
}

double wraparound_time(const GridFunction& psi, const PotentialParams& params) {
  const Grid& g = *psi.grid;
  const CVector c = to_momentum(g, psi.values);
  const RVector dens = c.cwiseAbs2();
  const double peak = dens.maxCoeff();
  if (!(peak > 0.0)) throw InvalidArgument("wraparound_time: zero state");
  double kmax = 0.0;
  const auto k = g.momenta();
  for (int j = 0; j < g.size(); ++j)
    if (dens[j] >= 1e-4 * peak) kmax = std::max(kmax, std::abs(k[static_cast<std::size_t>(j)]));
  const double vmax = std::max(kmax, g.momentum_spacing()) / params.mass;
  return g.extent() / (2.0 * vmax);
}

void split_operator_propagate(const GridFunction& psi0, const PropagatorConfig& cfg, const PotentialParams& params,
                              const SampleCallback& on_sample, bool check_wraparound) {
  cfg.validate(params);
  if (!psi0.grid || psi0.grid->size() != cfg.grid->size() || psi0.grid->extent() != cfg.grid->extent())
    throw InvalidArgument("propagator: initial state is not on the propagation grid");
  const double n0 = total_norm(psi0);
  if (std::abs(n0 - 1.0) > 1e-8) throw InvalidArgument("propagator: initial state norm is " + num(n0) + ", not 1");
  if (check_wraparound) {
    const double tw = wraparound_time(psi0, params);
    if (cfg.t_max >= tw)
      throw InvalidArgument("propagator: t_max " + num(cfg.t_max) + " reaches the wrap-around time " + num(tw) +
                            "; enlarge the grid");
  }

  const Grid& g = *cfg.grid;
  const int n = g.size();
  const double dt = cfg.dt;
  CVector half_v(n);
  for (int i = 0; i < n; ++i) half_v[i] = std::exp(-kI * potential_value(g.point(i), 0.0, params).real() * (0.5 * dt));
  CVector kin(n);
  const auto k = g.momenta();
  for (int j = 0; j < n; ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    kin[j] = std::exp(-kI * (kj * kj / (2.0 * params.mass)) * dt);
  }

  GridFunction psi(cfg.grid, psi0.values);
  CVector work(n);
  const long long steps = cfg.steps();
  on_sample(0.0, psi);
  for (long long s = 1; s <= steps; ++s) {
    psi.values.array() *= half_v.array();
    g.fft().forward(psi.values.data(), work.data());
    work.array() *= kin.array();
    g.fft().inverse(work.data(), psi.values.data());
    psi.values.array() *= half_v.array();
    if (s % cfg.sample_stride == 0) on_sample(static_cast<double>(s) * dt, psi);
  }
}

std::vector<PropagationSample> split_operator_samples(const GridFunction& psi0, const PropagatorConfig& cfg,
                                                      const PotentialParams& params, bool check_wraparound) {
  std::vector<PropagationSample> out;
  split_operator_propagate(
      psi0, cfg, params, [&](double t, const GridFunction& psi) { out.push_back({t, psi}); }, check_wraparound);
  return out;
}

double total_norm(const GridFunction& psi) { return psi.values.squaredNorm() * psi.grid->spacing(); }

double region_norm(const GridFunction& psi, const InteractionRegion& region) {
  const Grid& g = *psi.grid;
  region.validate(g);
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i)
    if (std::abs(g.point(i)) <= region.half_width) s += std::norm(psi.values[i]);
  return s * g.spacing();
}

double region_expectation(const GridFunction& psi, RegionObservable obs, const InteractionRegion& region) {
  const Grid& g = *psi.grid;
  const double nrm = region_norm(psi, region);
  if (!(nrm > 1e-12)) throw NumericalError("region expectation undefined: region norm " + num(nrm) + " below 1e-12");
  double s = 0.0;
  if (obs == RegionObservable::position) {
    for (int i = 0; i < g.size(); ++i)
      if (std::abs(g.point(i)) <= region.half_width) s += g.point(i) * std::norm(psi.values[i]);
  } else {
    const CVector dpsi = momentum_apply(g, psi.values);
    for (int i = 0; i < g.size(); ++i)
      if (std::abs(g.point(i)) <= region.half_width) s += (std::conj(psi.values[i]) * dpsi[i]).real();
  }
  return s * g.spacing() / nrm;
}

double energy_expectation(const GridFunction& psi, const PotentialParams& params) {
  const Grid& g = *psi.grid;
  CVector h = kinetic_apply(g, psi.values, params.mass, 0.0);
  for (int i = 0; i < g.size(); ++i) h[i] += potential_value(g.point(i), 0.0, params).real() * psi.values[i];
  return psi.values.dot(h).real() / psi.values.squaredNorm();
}

double density_half_width(const Spectrum& s, const std::vector<std::size_t>& states, double fraction) {
  if (states.empty()) throw InvalidArgument("density_half_width: no states given");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("density_half_width: fraction must be in (0, 1]");
  const Grid& g = *s.grid;
  RVector rho = RVector::Zero(g.size());
  for (std::size_t k : states) {
    if (k >= s.size()) throw InvalidArgument("density_half_width: state index out of range");
    rho += s.pairs[k].vector.values.cwiseAbs2();
  }
  std::vector<int> order(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(g.point(a)) < std::abs(g.point(b)); });
  const double total = rho.sum();
  double acc = 0.0;
  for (std::size_t m = 0; m < order.size(); ++m) {
    const int i = order[m];
    acc += rho[i];
    // Points at the same |x| enter together.
    if (m + 1 < order.size() && std::abs(g.point(order[m + 1])) == std::abs(g.point(i))) continue;
    if (acc >= fraction * total) return std::abs(g.point(i));
  }
  return 0.5 * g.extent();
}

InteractionWidths choose_interaction_width(const Spectrum& s, double barrier_x) {
  if (!s.classified) throw InvalidArgument("choose_interaction_width: spectrum is not classified");
  if (!(barrier_x > 0.0)) throw InvalidArgument("choose_interaction_width: barrier position must be positive");
  InteractionWidths w;
  w.barrier_half_width = barrier_x;
  w.chosen.half_width = barrier_x;
  w.chosen.validate(*s.grid);
  std::vector<std::size_t> res;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const EigenPair& p = s.pairs[k];
    if (p.cls == StateClass::resonance && !p.low_confidence && p.below_barrier && p.energy.real() > 0.0) res.push_back(k);
  }
  if (!res.empty()) w.density_half_width = density_half_width(s, res);
  return w;
}

}  // namespace nhqm
