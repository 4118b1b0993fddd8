#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "grid.hpp"
#include "model.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace nhqm {

/// Strang split-operator settings on the reference grid.
struct PropagatorConfig {
  GridPtr grid;
  double dt = 5e-4;
  double t_max = 0.0;
  int sample_stride = 1;  // steps between recorded samples

  /// dt > 0, dt * max kinetic eigenvalue < pi, t_max >= 0, stride >= 1.
  void validate(const PotentialParams& params) const;
  long long steps() const;
};

struct InteractionRegion {
  double half_width = 0.0;

  Interval interval() const noexcept { return {-half_width, half_width}; }
  void validate(const Grid& grid) const;
};

/// L / (2 v_max), with v_max the largest |k|/m carrying at least 1e-4 of the
/// peak momentum density of psi.
double wraparound_time(const GridFunction& psi, const PotentialParams& params);

using SampleCallback = std::function<void(double t, const GridFunction& psi)>;

/// Propagates psi(0) with e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2}, calling
/// on_sample at t = 0 and every sample_stride steps. psi(0) must have unit
/// norm. With check_wraparound, t_max beyond wraparound_time is rejected.
void split_operator_propagate(const GridFunction& psi0, const PropagatorConfig& cfg, const PotentialParams& params,
                              const SampleCallback& on_sample, bool check_wraparound = true);

struct PropagationSample {
  double t;
  GridFunction psi;
};

std::vector<PropagationSample> split_operator_samples(const GridFunction& psi0, const PropagatorConfig& cfg,
                                                      const PotentialParams& params, bool check_wraparound = true);

/// Total conjugated norm sum |psi|^2 dx.
double total_norm(const GridFunction& psi);

/// N_QM = sum over the region of |psi|^2 dx.
double region_norm(const GridFunction& psi, const InteractionRegion& region);

enum class RegionObservable { position, momentum };

/// <A> restricted to the region and divided by the region norm. Momentum uses
/// the spectral derivative on the full grid and keeps the real part.
double region_expectation(const GridFunction& psi, RegionObservable obs, const InteractionRegion& region);

/// <psi|H(0)|psi> / <psi|psi> on the real axis.
double energy_expectation(const GridFunction& psi, const PotentialParams& params);

/// Smallest half-width h with sum_{|x|<=h} rho >= fraction * sum rho, where
/// rho = sum over the given states of |phi^L phi^R|.
double density_half_width(const Spectrum& s, const std::vector<std::size_t>& states, double fraction = 0.99);

struct InteractionWidths {
  double barrier_half_width = 0.0;
  std::optional<double> density_half_width;  // empty when no confident below-barrier resonance exists
  InteractionRegion chosen;                  // barrier-top estimate
};

/// Both interaction-region estimates; the barrier-top one is returned as the
/// default. The density estimate uses the confident below-barrier resonances.
InteractionWidths choose_interaction_width(const Spectrum& s, double barrier_x);

}  // namespace nhqm
