#pragma once

#include <string>
#include <vector>

#include "grid.hpp"
#include "types.hpp"

namespace nhqm {

/// V(x) = (quad_coef x^2 - shift) exp(-gauss_exp x^2), atomic units.
struct PotentialParams {
  double quad_coef = 0.5;
  double shift = 0.8;
  double gauss_exp = 0.1;
  double mass = 1.0;

  void validate() const;
};

/// Complex-scaling rotation angle, restricted to [0, pi/4).
class ScalingAngle {
 public:
  explicit ScalingAngle(double theta);
  double value() const noexcept { return theta_; }

 private:
  double theta_;
};

/// V(x e^{i theta}).
cplx potential_value(double x, double theta, const PotentialParams& params);

/// dV/dx on the real axis.
double potential_derivative(double x, const PotentialParams& params);

struct BarrierTop {
  double position = 0.0;  // x_b > 0; the mirror barrier sits at -x_b
  double height = 0.0;
};

/// Locates the outer maxima of the symmetric potential by bisection on the
/// analytic derivative.
BarrierTop barrier_tops(const PotentialParams& params);

/// Dense H(theta) = e^{-2i theta} T + diag V(x_i e^{i theta}) on a grid.
struct ScaledHamiltonian {
  CMatrix matrix;
  ScalingAngle theta{0.0};
  GridPtr grid;
  PotentialParams params;
  std::vector<std::string> warnings;
};

/// Potential magnitude at the box edge above this triggers a warning (an
/// error when strict).
inline constexpr double kEdgePotentialTolerance = 1e-10;

ScaledHamiltonian build_hamiltonian(GridPtr grid, ScalingAngle theta, const PotentialParams& params,
                                    bool strict = false);

}  // namespace nhqm
