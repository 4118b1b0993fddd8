#pragma once

#include <memory>

#include "grid.hpp"
#include "model.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace nhqm {

/// Gaussian wavepacket exp(-(x - x0)^2 / 2 sigma^2 + i k0 x), unit norm.
struct WavepacketSpec {
  double sigma = 3.87;
  double k0 = 0.0;
  double x0 = 0.0;

  void validate() const;
};

/// The unscaled packet on a grid (the Hermitian initial state).
GridFunction gaussian_state(const WavepacketSpec& spec, GridPtr grid);

struct ScaledInitialStates {
  GridFunction right;
  GridFunction left;
};

/// Right and left initial states after the dilation x -> x e^{i theta}:
///   psi^{R/L} = e^{i theta/2} (pi sigma^2)^{-1/4} exp(-(x e^{i theta} - x0)^2 / 2 sigma^2 +/- i k0 x e^{i theta})
/// so that the c-product of left and right is exactly one.
ScaledInitialStates scaled_initial_states(const WavepacketSpec& spec, ScalingAngle theta, GridPtr grid);

enum class Observable { position, momentum };

struct Expectation {
  cplx value;
  double phase = 0.0;  // arg(value) in (-pi, pi]
};

/// Below this |N_FP(t)| the ratio quantities are undefined.
inline constexpr double kNormFloor = 1e-12;
inline constexpr double kCompletenessTolerance = 1e-6;

/// Wavepacket expanded over a complex-scaled spectrum. Right components
/// evolve as e^{-iEt}, left components as e^{+iE*t}; t < 0 is rejected.
class FPWavepacket {
 public:
  FPWavepacket(std::shared_ptr<const Spectrum> spectrum, CVector c_right, CVector c_left);

  const Spectrum& spectrum() const noexcept { return *spectrum_; }
  std::shared_ptr<const Spectrum> spectrum_ptr() const noexcept { return spectrum_; }
  const CVector& c_right() const noexcept { return c_right_; }
  const CVector& c_left() const noexcept { return c_left_; }
  double theta() const noexcept { return spectrum_->theta.value(); }

  /// sum C^L C^R.
  cplx completeness() const;

  /// N_FP(t) = sum C^L C^R exp(-Gamma t).
  cplx norm(double t) const;

  /// k_FP(t) = -d/dt ln N_FP, differentiated term by term. Complex in
  /// general; the real part is the physical rate.
  cplx decay_rate(double t) const;

  /// (Psi_FP | A~ | Psi_FP) / (Psi_FP | Psi_FP) with x~ = e^{i theta} x and
  /// p~ = e^{-i theta} p.
  Expectation expectation(Observable obs, double t) const;

  /// <Psi^R(t) | Psi^R(t)> with the conjugated product and all cross terms.
  double np_norm(double t) const;

  struct Evolved {
    GridFunction right;
    GridFunction left;
  };
  Evolved evolve(double t) const;

 private:
  struct Cache;

  CVector right_amplitudes(double t) const;
  CVector left_amplitudes(double t) const;
  static void check_time(double t);

  std::shared_ptr<const Spectrum> spectrum_;
  CVector energies_;
  CVector c_right_;
  CVector c_left_;
  std::shared_ptr<Cache> cache_;
};

/// C^R_a = sum phi_a psi^R dx, C^L_a = sum psi^L phi_a dx. Throws
/// NumericalError when sum C^L C^R misses the grid c-product of the two
/// states, or one, by more than kCompletenessTolerance.
FPWavepacket expand(const GridFunction& right, const GridFunction& left, std::shared_ptr<const Spectrum> spectrum);

}  // namespace nhqm
