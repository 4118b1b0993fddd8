#include "fp_dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
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

void WavepacketSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("wavepacket: sigma must be positive");
  if (!std::isfinite(k0) || !std::isfinite(x0)) throw InvalidArgument("wavepacket: k0 and x0 must be finite");
}

static CVector scaled_gaussian(const WavepacketSpec& spec, double theta, double k_sign, const Grid& grid) {
  const cplx rot = std::exp(cplx(0.0, theta));
  const cplx pref = std::exp(cplx(0.0, 0.5 * theta)) * std::pow(kPi * spec.sigma * spec.sigma, -0.25);
  const double s2 = 2.0 * spec.sigma * spec.sigma;
  CVector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const cplx z = grid.point(i) * rot;
    const cplx d = z - spec.x0;
    v[i] = pref * std::exp(-d * d / s2 + k_sign * kI * spec.k0 * z);
  }
  return v;
}

static void check_resolution(const WavepacketSpec& spec, const Grid& grid) {
  spec.validate();
  if (!(spec.sigma > 3.0 * grid.spacing()))
    throw InvalidArgument("wavepacket: sigma " + num(spec.sigma) + " is under-resolved (needs > 3 dx = " +
                          num(3.0 * grid.spacing()) + ")");
  if (std::abs(spec.x0) >= 0.5 * grid.extent()) throw InvalidArgument("wavepacket: x0 lies outside the grid");
}

GridFunction gaussian_state(const WavepacketSpec& spec, GridPtr grid) {
  if (!grid) throw InvalidArgument("wavepacket: no grid");
  check_resolution(spec, *grid);
  return GridFunction(grid, scaled_gaussian(spec, 0.0, 1.0, *grid));
}

ScaledInitialStates scaled_initial_states(const WavepacketSpec& spec, ScalingAngle theta, GridPtr grid) {
  if (!grid) throw InvalidArgument("wavepacket: no grid");
  check_resolution(spec, *grid);
  ScaledInitialStates s{GridFunction(grid, scaled_gaussian(spec, theta.value(), 1.0, *grid)),
                        GridFunction(grid, scaled_gaussian(spec, theta.value(), -1.0, *grid))};
  const cplx overlap = c_product(s.left, s.right);
  if (std::abs(overlap - 1.0) > 1e-8)
    throw NumericalError("wavepacket: left/right c-product is " + num(overlap.real()) + " " + num(overlap.imag()) +
                         "i, not 1; the packet does not fit the grid");
  return s;
}

struct FPWavepacket::Cache {
  std::once_flag phi_once;
  CMatrix phi;
  std::once_flag x_once;
  CMatrix position;
  std::once_flag p_once;
  CMatrix momentum;
  std::once_flag s_once;
  CMatrix overlap;
};

FPWavepacket::FPWavepacket(std::shared_ptr<const Spectrum> spectrum, CVector c_right, CVector c_left)
    : spectrum_(std::move(spectrum)), c_right_(std::move(c_right)), c_left_(std::move(c_left)),
      cache_(std::make_shared<Cache>()) {
  if (!spectrum_ || !spectrum_->grid) throw InvalidArgument("FPWavepacket: missing spectrum");
  const auto n = static_cast<Eigen::Index>(spectrum_->size());
  if (c_right_.size() != n || c_left_.size() != n)
    throw InvalidArgument("FPWavepacket: coefficient count does not match the spectrum");
  energies_ = spectrum_->energies();
}

void FPWavepacket::check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidArgument("time " + num(t) + " rejected: evolution is defined forward in time only");
}

cplx FPWavepacket::completeness() const { return c_left_.cwiseProduct(c_right_).sum(); }

CVector FPWavepacket::right_amplitudes(double t) const {
  CVector a(c_right_.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = c_right_[k] * std::exp(-kI * energies_[k] * t);
  return a;
}

CVector FPWavepacket::left_amplitudes(double t) const {
  CVector b(c_left_.size());
  for (Eigen::Index k = 0; k < b.size(); ++k) b[k] = c_left_[k] * std::exp(kI * std::conj(energies_[k]) * t);
  return b;
}

cplx FPWavepacket::norm(double t) const {
  check_time(t);
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < energies_.size(); ++k)
    s += c_left_[k] * c_right_[k] * std::exp(2.0 * energies_[k].imag() * t);
  return s;
}

cplx FPWavepacket::decay_rate(double t) const {
  check_time(t);
  cplx num_sum = 0.0;
  cplx den = 0.0;
  for (Eigen::Index k = 0; k < energies_.size(); ++k) {
    const double gamma = -2.0 * energies_[k].imag();
    const cplx term = c_left_[k] * c_right_[k] * std::exp(-gamma * t);
    num_sum += gamma * term;
    den += term;
  }
  if (std::abs(den) < kNormFloor) throw NumericalError("decay rate undefined: |N_FP(" + num(t) + ")| below floor");
  return num_sum / den;
}

Expectation FPWavepacket::expectation(Observable obs, double t) const {
  check_time(t);
  const Grid& grid = *spectrum_->grid;
  const double dx = grid.spacing();
  Cache& c = *cache_;
  std::call_once(c.phi_once, [&] { c.phi = spectrum_->vectors(); });
  const cplx rot = std::exp(cplx(0.0, theta()));
  const CMatrix* m = nullptr;
  if (obs == Observable::position) {
    std::call_once(c.x_once, [&] {
      RVector x(grid.size());
      for (int i = 0; i < grid.size(); ++i) x[i] = grid.point(i);
      c.position = (rot * dx) * (c.phi.transpose() * (x.asDiagonal() * c.phi));
    });
    m = &c.position;
  } else {
    std::call_once(c.p_once, [&] {
      CMatrix dphi(c.phi.rows(), c.phi.cols());
      for (Eigen::Index j = 0; j < c.phi.cols(); ++j) dphi.col(j) = momentum_apply(grid, c.phi.col(j));
      c.momentum = (dx / rot) * (c.phi.transpose() * dphi);
    });
    m = &c.momentum;
  }
  const CVector a = right_amplitudes(t);
  const CVector b = left_amplitudes(t);
  const cplx den = b.cwiseProduct(a).sum();
  if (std::abs(den) < kNormFloor) throw NumericalError("expectation undefined: |N_FP(" + num(t) + ")| below floor");
  const cplx value = (b.transpose() * (*m) * a).value() / den;
  return {value, std::arg(value)};
}

double FPWavepacket::np_norm(double t) const {
  check_time(t);
  Cache& c = *cache_;
  std::call_once(c.phi_once, [&] { c.phi = spectrum_->vectors(); });
  std::call_once(c.s_once, [&] { c.overlap = (c.phi.adjoint() * c.phi) * spectrum_->grid->spacing(); });
  const CVector a = right_amplitudes(t);
  return (a.adjoint() * c.overlap * a).value().real();
}

FPWavepacket::Evolved FPWavepacket::evolve(double t) const {
  check_time(t);
  Cache& c = *cache_;
  std::call_once(c.phi_once, [&] { c.phi = spectrum_->vectors(); });
  return {GridFunction(spectrum_->grid, c.phi * right_amplitudes(t)),
          GridFunction(spectrum_->grid, c.phi * left_amplitudes(t))};
}

FPWavepacket expand(const GridFunction& right, const GridFunction& left, std::shared_ptr<const Spectrum> spectrum) {
  if (!spectrum || !spectrum->grid) throw InvalidArgument("expand: missing spectrum");
  if (right.grid != spectrum->grid && (!right.grid || right.grid->size() != spectrum->grid->size()))
    throw InvalidArgument("expand: right state lives on a different grid");
  if (left.grid != spectrum->grid && (!left.grid || left.grid->size() != spectrum->grid->size()))
    throw InvalidArgument("expand: left state lives on a different grid");
  const double dx = spectrum->grid->spacing();
  const CMatrix phi = spectrum->vectors();
  CVector cr = (phi.transpose() * right.values) * dx;
  CVector cl = (phi.transpose() * left.values) * dx;
  FPWavepacket wp(std::move(spectrum), std::move(cr), std::move(cl));

  const cplx sum = wp.completeness();
  const cplx direct = left.values.cwiseProduct(right.values).sum() * dx;
  if (std::abs(sum - direct) > kCompletenessTolerance)
    throw NumericalError("expand: sum C^L C^R = " + num(sum.real()) + " " + num(sum.imag()) +
                         "i differs from the grid c-product " + num(direct.real()) + " " + num(direct.imag()) +
                         "i; the spectrum is incomplete");
  if (std::abs(sum - 1.0) > kCompletenessTolerance)
    throw NumericalError("expand: sum C^L C^R = " + num(sum.real()) + " " + num(sum.imag()) + "i is not 1");
  return wp;
}

}  // namespace nhqm
