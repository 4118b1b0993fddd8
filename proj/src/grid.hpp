#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fft.hpp"
#include "types.hpp"

namespace nhqm {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform periodic grid on [-L/2, L/2) with its conjugate momentum grid.
/// Points are x_i = -L/2 + i dx; momenta are in FFT order with spacing 2 pi / L.
class Grid {
 public:
  Grid(int n_points, double extent);

  int size() const noexcept { return n_; }
  double extent() const noexcept { return extent_; }
  double spacing() const noexcept { return dx_; }
  double momentum_spacing() const noexcept;
  double nyquist() const noexcept;  // pi / dx

  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> momenta() const noexcept { return momenta_; }
  double point(int i) const { return points_[static_cast<std::size_t>(i)]; }

  /// Index of -x_i on the periodic grid (x_0 = -L/2 maps to itself).
  int mirror(int i) const noexcept { return (n_ - i) % n_; }

  bool contains(const Interval& region) const noexcept;

  const Fft& fft() const noexcept { return *fft_; }

 private:
  int n_;
  double extent_;
  double dx_;
  std::vector<double> points_;
  std::vector<double> momenta_;
  std::shared_ptr<const Fft> fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int n_points, double extent);

/// Complex samples of a function on a grid.
struct GridFunction {
  GridPtr grid;
  CVector values;

  GridFunction() = default;
  GridFunction(GridPtr g, CVector v);
  explicit GridFunction(GridPtr g);
};

// Spectral representations. Momentum-space coefficients follow the grid's
// FFT ordering and are unnormalized DFT values.
CVector to_momentum(const Grid& grid, const CVector& values);
CVector to_position(const Grid& grid, const CVector& coefficients);

/// -i d/dx by Fourier multiplication; the Nyquist component is dropped so the
/// discrete operator stays Hermitian.
CVector momentum_apply(const Grid& grid, const CVector& values);

/// e^{-2i theta} p^2 / 2m applied spectrally.
CVector kinetic_apply(const Grid& grid, const CVector& values, double mass, double theta);

/// Fourier-grid representation of e^{-2i theta} p^2 / 2m as a dense matrix.
/// Complex symmetric; real symmetric circulant at theta = 0.
CMatrix kinetic_matrix(const Grid& grid, double mass, double theta);

/// Riemann sum dx * sum f(x_i) over the grid or over points with
/// lo <= x_i <= hi.
cplx integrate(const GridFunction& f, std::optional<Interval> region = std::nullopt);

/// Pointwise product helpers used for c-products and scalar products.
cplx c_product(const GridFunction& left, const GridFunction& right);
cplx scalar_product(const GridFunction& bra, const GridFunction& ket);

}  // namespace nhqm
