#include "model.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace nhqm {

void PotentialParams::validate() const {
  if (!(gauss_exp > 0.0)) throw InvalidArgument("potential: gauss_exp must be positive");
  if (!(mass > 0.0)) throw InvalidArgument("potential: mass must be positive");
  if (!std::isfinite(quad_coef) || !std::isfinite(shift))
    throw InvalidArgument("potential: coefficients must be finite");
}

ScalingAngle::ScalingAngle(double theta) : theta_(theta) {
  if (!(theta >= 0.0) || !(theta < 0.25 * kPi))
    throw InvalidArgument("scaling angle must lie in [0, pi/4), got " + std::to_string(theta));
}

cplx potential_value(double x, double theta, const PotentialParams& p) {
  const cplx z2 = std::exp(cplx(0.0, 2.0 * theta)) * (x * x);
  return (p.quad_coef * z2 - p.shift) * std::exp(-p.gauss_exp * z2);
}

double potential_derivative(double x, const PotentialParams& p) {
  const double x2 = x * x;
  return 2.0 * x * (p.quad_coef - p.gauss_exp * (p.quad_coef * x2 - p.shift)) *
         std::exp(-p.gauss_exp * x2);
}

BarrierTop barrier_tops(const PotentialParams& p) {
  p.validate();
  // For x > 0 the derivative changes sign once, from positive to negative,
  // when quad_coef > 0. Bracket the root by doubling.
  if (!(p.quad_coef > 0.0)) throw InvalidArgument("barrier_tops: quad_coef must be positive");
  double lo = 1e-8;
  double hi = 1.0;
  while (potential_derivative(hi, p) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw NumericalError("barrier_tops: no maximum found");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (potential_derivative(mid, p) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double xb = 0.5 * (lo + hi);
  return {xb, potential_value(xb, 0.0, p).real()};
}

ScaledHamiltonian build_hamiltonian(GridPtr grid, ScalingAngle theta, const PotentialParams& params,
                                    bool strict) {
  if (!grid) throw InvalidArgument("build_hamiltonian: null grid");
  params.validate();
  ScaledHamiltonian h;
  h.theta = theta;
  h.grid = grid;
  h.params = params;

  const double edge = std::abs(potential_value(0.5 * grid->extent(), theta.value(), params));
  if (edge >= kEdgePotentialTolerance) {
    std::ostringstream msg;
    msg << "build_hamiltonian: |V(L/2)| = " << edge << " exceeds " << kEdgePotentialTolerance
        << "; extent " << grid->extent() << " is too small for the potential";
    if (strict) throw InvalidArgument(msg.str());
    h.warnings.push_back(msg.str());
  }

  h.matrix = kinetic_matrix(*grid, params.mass, theta.value());
  const auto x = grid->points();
  for (int i = 0; i < grid->size(); ++i)
    h.matrix(i, i) += potential_value(x[static_cast<std::size_t>(i)], theta.value(), params);
  return h;
}

}  // namespace nhqm
