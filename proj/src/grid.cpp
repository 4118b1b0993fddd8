#include "grid.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace nhqm {

Grid::Grid(int n_points, double extent) : n_(n_points), extent_(extent) {
  if (n_points < 8 || n_points % 2 != 0)
    throw InvalidArgument("grid: n_points must be even and >= 8, got " + std::to_string(n_points));
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw InvalidArgument("grid: extent must be positive and finite");
  dx_ = extent / n_points;
  points_.resize(static_cast<std::size_t>(n_));
  momenta_.resize(static_cast<std::size_t>(n_));
  const double dk = 2.0 * kPi / extent;
  for (int i = 0; i < n_; ++i) {
    points_[static_cast<std::size_t>(i)] = -0.5 * extent + i * dx_;
    const int j = i < n_ / 2 ? i : i - n_;
    momenta_[static_cast<std::size_t>(i)] = j * dk;
  }
  fft_ = std::make_shared<const Fft>(static_cast<std::size_t>(n_));
}

double Grid::momentum_spacing() const noexcept { return 2.0 * kPi / extent_; }
double Grid::nyquist() const noexcept { return kPi / dx_; }

bool Grid::contains(const Interval& region) const noexcept {
  return region.lo <= region.hi && region.lo >= -0.5 * extent_ && region.hi <= 0.5 * extent_;
}

GridPtr make_grid(int n_points, double extent) {
  return std::make_shared<const Grid>(n_points, extent);
}

GridFunction::GridFunction(GridPtr g, CVector v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw InvalidArgument("grid function: null grid");
  if (values.size() != grid->size())
    throw InvalidArgument("grid function: value count does not match grid size");
}

GridFunction::GridFunction(GridPtr g) : grid(std::move(g)) {
  if (!grid) throw InvalidArgument("grid function: null grid");
  values = CVector::Zero(grid->size());
}

CVector to_momentum(const Grid& grid, const CVector& values) {
  CVector out(grid.size());
  grid.fft().forward(values.data(), out.data());
  return out;
}

CVector to_position(const Grid& grid, const CVector& coefficients) {
  CVector out(grid.size());
  grid.fft().inverse(coefficients.data(), out.data());
  return out;
}

CVector momentum_apply(const Grid& grid, const CVector& values) {
  CVector c = to_momentum(grid, values);
  const auto k = grid.momenta();
  for (int j = 0; j < grid.size(); ++j) c[j] *= k[static_cast<std::size_t>(j)];
  c[grid.size() / 2] = 0.0;
  return to_position(grid, c);
}

CVector kinetic_apply(const Grid& grid, const CVector& values, double mass, double theta) {
  CVector c = to_momentum(grid, values);
  const auto k = grid.momenta();
  const cplx rot = std::exp(cplx(0.0, -2.0 * theta)) / (2.0 * mass);
  for (int j = 0; j < grid.size(); ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    c[j] *= rot * kj * kj;
  }
  return to_position(grid, c);
}

CMatrix kinetic_matrix(const Grid& grid, double mass, double theta) {
  if (!(mass > 0.0)) throw InvalidArgument("kinetic_matrix: mass must be positive");
  const int n = grid.size();
  // The operator is a circulant; its first column is the inverse DFT of the
  // k^2/2m multiplier. Imaginary round-off is discarded to keep T(0) real.
  CVector multiplier(n);
  const auto k = grid.momenta();
  for (int j = 0; j < n; ++j) {
    const double kj = k[static_cast<std::size_t>(j)];
    multiplier[j] = kj * kj / (2.0 * mass);
  }
  const CVector column = to_position(grid, multiplier);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) t[static_cast<std::size_t>(m)] = column[m].real();
  // Symmetrize the stencil t(m) = t(n - m) against round-off.
  for (int m = 1; m < n / 2; ++m) {
    const double avg = 0.5 * (t[static_cast<std::size_t>(m)] + t[static_cast<std::size_t>(n - m)]);
    t[static_cast<std::size_t>(m)] = t[static_cast<std::size_t>(n - m)] = avg;
  }
  const cplx rot = std::exp(cplx(0.0, -2.0 * theta));
  CMatrix out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = rot * t[static_cast<std::size_t>((i - j + n) % n)];
  return out;
}

cplx integrate(const GridFunction& f, std::optional<Interval> region) {
  const Grid& g = *f.grid;
  if (!region) return f.values.sum() * g.spacing();
  if (!g.contains(*region))
    throw InvalidArgument("integrate: region lies outside the grid extent");
  cplx sum = 0.0;
  const auto x = g.points();
  for (int i = 0; i < g.size(); ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (xi >= region->lo && xi <= region->hi) sum += f.values[i];
  }
  return sum * g.spacing();
}

cplx c_product(const GridFunction& left, const GridFunction& right) {
  return (left.values.array() * right.values.array()).sum() * left.grid->spacing();
}

cplx scalar_product(const GridFunction& bra, const GridFunction& ket) {
  return bra.values.dot(ket.values) * bra.grid->spacing();
}

}  // namespace nhqm
