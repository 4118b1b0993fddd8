#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "model.hpp"
#include "types.hpp"

namespace nhqm {

enum class StateClass { bound, resonance, rotated_continuum };
enum class Parity { even, odd, none };

const char* to_string(StateClass c) noexcept;
const char* to_string(Parity p) noexcept;

/// Right eigenvector with E = eps - i Gamma/2. For a complex symmetric matrix
/// the left eigenvector is the same vector, so only one is stored.
struct EigenPair {
  cplx energy;
  GridFunction vector;  // c-normalized: sum v_i^2 dx = 1
  StateClass cls = StateClass::rotated_continuum;
  bool low_confidence = false;
  Parity parity = Parity::none;
  bool below_barrier = false;
  double interior_weight = 0.0;  // share of sum |v|^2 inside the barrier tops
  double c_norm_residual = 0.0;  // |sum v^2 dx - 1|
  double residual = 0.0;         // |H v - E v| / |v|

  double width() const noexcept { return -2.0 * energy.imag(); }
};

struct Spectrum {
  std::vector<EigenPair> pairs;  // ordered by Re E, then Im E
  ScalingAngle theta{0.0};
  GridPtr grid;
  PotentialParams params;
  bool classified = false;

  std::size_t size() const noexcept { return pairs.size(); }
  /// Eigenvectors as columns, in pair order.
  CMatrix vectors() const;
  CVector energies() const;
  std::size_t count(StateClass c) const;
};

/// Eigenpairs of a general square matrix. When the matrix is complex symmetric
/// the vectors are c-normalized with the given quadrature weight and mutually
/// c-orthonormalized inside numerically degenerate clusters; otherwise they are
/// left with unit 2-norm and `c_normalized` is false.
struct MatrixEigenpairs {
  CVector values;
  CMatrix vectors;
  RVector residuals;
  RVector c_norm_residuals;
  bool c_normalized = false;
};

MatrixEigenpairs eigendecompose(const CMatrix& matrix, double weight = 1.0);

/// Full spectrum of a scaled Hamiltonian. A mirror-symmetric Hamiltonian is
/// split into even and odd blocks, which keeps the +/-k continuum pairs apart.
/// Throws NumericalError when a residual exceeds kResidualTolerance.
Spectrum eigendecompose(const ScaledHamiltonian& h);

inline constexpr double kResidualTolerance = 1e-8;
inline constexpr double kSelfOrthogonalTolerance = 1e-8;

/// w / sqrt(sum w_i^2 * weight) with the principal square root. Throws
/// SelfOrthogonalError when |sum v^2| < kSelfOrthogonalTolerance * sum |v|^2.
CVector c_normalize(const CVector& v, double weight = 1.0);
GridFunction c_normalize(const GridFunction& v);

struct ClassifyOptions {
  double bound_width_tolerance = 1e-6;  // |Im E| below this with Re E < 0 is bound
  double ray_band = 0.05;               // radians around arg E = -2 theta
  double resonance_weight = 0.25;       // interior weight for a confident resonance
  double continuum_weight = 0.02;       // below this an off-ray state counts as continuum
  std::optional<double> interior_half_width;  // defaults to the barrier-top position
};

/// Labels every pair as bound, resonance or rotated continuum.
Spectrum classify_states(Spectrum s, double barrier_height, const ClassifyOptions& options = {});

struct ThetaTrack {
  StateClass cls = StateClass::resonance;
  Parity parity = Parity::none;
  std::vector<cplx> energies;       // one per scanned angle until the track is lost
  std::vector<double> derivative;   // |dE/dtheta| per angle interval
  bool lost = false;
  bool ambiguous = false;
  std::optional<std::size_t> interior_minimum;  // interval index of an interior minimum of derivative
  double max_variation = 0.0;                   // max |E(theta) - E(theta_0)|
};

struct ThetaScanOptions {
  ClassifyOptions classify;
  bool include_continuum = false;
  bool strict = false;
  int threads = 0;
};

struct ThetaStabilityReport {
  std::vector<double> thetas;
  std::vector<ThetaTrack> tracks;
  std::vector<Spectrum> spectra;
  std::vector<std::string> issues;
};

/// Diagonalizes H(theta) for each angle (concurrently) and follows the
/// non-continuum eigenvalues by nearest-neighbour continuation inside the
/// same parity block. The matching radius is half the nearest-neighbour gap.
ThetaStabilityReport check_theta_stability(GridPtr grid, const PotentialParams& params,
                                           const std::vector<double>& thetas,
                                           const ThetaScanOptions& options = {});

/// index,re_e,im_e,gamma,class,c_norm_residual
void write_spectrum_csv(const std::string& path, const Spectrum& s);
std::string spectrum_csv(const Spectrum& s);

}  // namespace nhqm
