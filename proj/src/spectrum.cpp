#include "spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "error.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace nhqm {
namespace {

// One column of a real orthonormal parity basis: ca e_a + cb e_b.
struct BasisColumn {
  int a;
  int b;  // -1 when the column is a single unit vector
  double ca;
  double cb;
};

std::vector<BasisColumn> parity_basis(const Grid& grid, Parity parity) {
  const int n = grid.size();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<BasisColumn> cols;
  if (parity == Parity::even) {
    cols.push_back({0, -1, 1.0, 0.0});
    cols.push_back({n / 2, -1, 1.0, 0.0});
    for (int i = 1; i < n / 2; ++i) cols.push_back({i, grid.mirror(i), r, r});
  } else if (parity == Parity::odd) {
    for (int i = 1; i < n / 2; ++i) cols.push_back({i, grid.mirror(i), r, -r});
  } else {
    for (int i = 0; i < n; ++i) cols.push_back({i, -1, 1.0, 0.0});
  }
  return cols;
}

cplx entry(const CMatrix& h, const BasisColumn& row, const BasisColumn& col) {
  cplx s = row.ca * col.ca * h(row.a, col.a);
  if (col.b >= 0) s += row.ca * col.cb * h(row.a, col.b);
  if (row.b >= 0) {
    s += row.cb * col.ca * h(row.b, col.a);
    if (col.b >= 0) s += row.cb * col.cb * h(row.b, col.b);
  }
  return s;
}

CMatrix project(const CMatrix& h, const std::vector<BasisColumn>& cols) {
  const auto m = static_cast<Eigen::Index>(cols.size());
  CMatrix b(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) b(i, j) = entry(h, cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  return b;
}

CVector expand(const CVector& y, const std::vector<BasisColumn>& cols, int n) {
  CVector v = CVector::Zero(n);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto& c = cols[k];
    const auto idx = static_cast<Eigen::Index>(k);
    v[c.a] += c.ca * y[idx];
    if (c.b >= 0) v[c.b] += c.cb * y[idx];
  }
  return v;
}

double scale_of(const CMatrix& m) { return std::max(1.0, linalg::max_abs(m)); }

bool is_symmetric(const CMatrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale_of(m);
}

bool mirror_symmetric(const CMatrix& h, const Grid& grid) {
  const int n = grid.size();
  const double tol = 1e-12 * scale_of(h);
  for (int j = 0; j < n; ++j) {
    const int mj = grid.mirror(j);
    for (int i = 0; i < n; ++i)
      if (std::abs(h(i, j) - h(grid.mirror(i), mj)) > tol) return false;
  }
  return true;
}

cplx c_square(const CVector& v, double weight) { return v.cwiseProduct(v).sum() * weight; }

// Largest-magnitude component gets a positive real part.
void fix_sign(CVector& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k].real() < 0.0) v = -v;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const char* to_string(StateClass c) noexcept {
  switch (c) {
    case StateClass::bound: return "bound";
    case StateClass::resonance: return "resonance";
    case StateClass::rotated_continuum: return "rotated_continuum";
  }
  return "unknown";
}

const char* to_string(Parity p) noexcept {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
  }
  return "unknown";
}

CMatrix Spectrum::vectors() const {
  if (pairs.empty()) return {};
  CMatrix m(pairs.front().vector.values.size(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t j = 0; j < pairs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = pairs[j].vector.values;
  return m;
}

CVector Spectrum::energies() const {
  CVector e(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t j = 0; j < pairs.size(); ++j) e[static_cast<Eigen::Index>(j)] = pairs[j].energy;
  return e;
}

std::size_t Spectrum::count(StateClass c) const {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [c](const EigenPair& p) { return p.cls == c; }));
}

CVector c_normalize(const CVector& v, double weight) {
  if (!(weight > 0.0)) throw InvalidArgument("c_normalize: weight must be positive");
  const cplx s = c_square(v, weight);
  const double plain = v.squaredNorm() * weight;
  if (!(plain > 0.0) || std::abs(s) < kSelfOrthogonalTolerance * plain)
    throw SelfOrthogonalError("c_normalize: vector is self-orthogonal (|c-norm^2| = " + fmt17(std::abs(s)) +
                              ", |v|^2 = " + fmt17(plain) + ")");
  return v / std::sqrt(s);
}

GridFunction c_normalize(const GridFunction& v) {
  if (!v.grid) throw InvalidArgument("c_normalize: grid function has no grid");
  return GridFunction(v.grid, c_normalize(v.values, v.grid->spacing()));
}

MatrixEigenpairs eigendecompose(const CMatrix& matrix, double weight) {
  if (!(weight > 0.0)) throw InvalidArgument("eigendecompose: weight must be positive");
  linalg::EigenSystem es = linalg::eigensystem(matrix);
  MatrixEigenpairs out;
  out.values = std::move(es.values);
  out.vectors = std::move(es.vectors);
  const Eigen::Index n = out.values.size();
  out.c_norm_residuals = RVector::Constant(n, std::numeric_limits<double>::quiet_NaN());

  if (is_symmetric(matrix)) {
    for (Eigen::Index j = 0; j < n; ++j) {
      try {
        out.vectors.col(j) = c_normalize(CVector(out.vectors.col(j)), weight);
      } catch (const SelfOrthogonalError& e) {
        throw SelfOrthogonalError("eigenvector " + std::to_string(j) + " (E = " + fmt17(out.values[j].real()) + " " +
                                  fmt17(out.values[j].imag()) + "i): " + e.what());
      }
    }
    // Numerically degenerate eigenvalues: the inverse-iteration vectors span
    // the eigenspace but need not be c-orthogonal.
    const double tol = 1e-9 * scale_of(matrix);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (seen[static_cast<std::size_t>(i)]) continue;
      std::vector<Eigen::Index> cluster{i};
      seen[static_cast<std::size_t>(i)] = 1;
      for (std::size_t c = 0; c < cluster.size(); ++c)
        for (Eigen::Index j = 0; j < n; ++j)
          if (!seen[static_cast<std::size_t>(j)] && std::abs(out.values[j] - out.values[cluster[c]]) <= tol) {
            seen[static_cast<std::size_t>(j)] = 1;
            cluster.push_back(j);
          }
      if (cluster.size() < 2) continue;
      std::sort(cluster.begin(), cluster.end());
      for (std::size_t a = 0; a < cluster.size(); ++a) {
        CVector v = out.vectors.col(cluster[a]);
        for (std::size_t b = 0; b < a; ++b) {
          const auto u = out.vectors.col(cluster[b]);
          const cplx proj = u.cwiseProduct(v).sum() * weight;
          v -= proj * u;
        }
        out.vectors.col(cluster[a]) = c_normalize(v, weight);
      }
    }
    for (Eigen::Index j = 0; j < n; ++j)
      out.c_norm_residuals[j] = std::abs(c_square(CVector(out.vectors.col(j)), weight) - 1.0);
    out.c_normalized = true;
  }

  const CMatrix r = matrix * out.vectors - out.vectors * out.values.asDiagonal();
  out.residuals.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) out.residuals[j] = r.col(j).norm() / out.vectors.col(j).norm();
  return out;
}

Spectrum eigendecompose(const ScaledHamiltonian& h) {
  if (!h.grid) throw InvalidArgument("eigendecompose: Hamiltonian has no grid");
  const Grid& grid = *h.grid;
  const int n = grid.size();
  if (h.matrix.rows() != n || h.matrix.cols() != n)
    throw InvalidArgument("eigendecompose: matrix size does not match the grid");
  if (!h.matrix.allFinite()) throw InvalidArgument("eigendecompose: Hamiltonian has non-finite entries");
  const double dx = grid.spacing();

  std::vector<Parity> blocks;
  if (mirror_symmetric(h.matrix, grid))
    blocks = {Parity::even, Parity::odd};
  else
    blocks = {Parity::none};

  Spectrum s;
  s.theta = h.theta;
  s.grid = h.grid;
  s.params = h.params;
  s.pairs.reserve(static_cast<std::size_t>(n));
  for (Parity parity : blocks) {
    const auto cols = parity_basis(grid, parity);
    const CMatrix b = parity == Parity::none ? h.matrix : project(h.matrix, cols);
    MatrixEigenpairs me = eigendecompose(b, dx);
    if (!me.c_normalized) throw InvalidArgument("eigendecompose: Hamiltonian is not complex symmetric");
    for (Eigen::Index j = 0; j < me.values.size(); ++j) {
      if (!(me.residuals[j] < kResidualTolerance))
        throw NumericalError("eigendecompose: residual " + fmt17(me.residuals[j]) + " for E = " +
                             fmt17(me.values[j].real()) + " " + fmt17(me.values[j].imag()) + "i exceeds tolerance");
      CVector v = parity == Parity::none ? CVector(me.vectors.col(j)) : expand(me.vectors.col(j), cols, n);
      fix_sign(v);
      EigenPair p;
      p.energy = me.values[j];
      p.vector = GridFunction(h.grid, std::move(v));
      p.parity = parity;
      p.residual = me.residuals[j];
      p.c_norm_residual = me.c_norm_residuals[j];
      s.pairs.push_back(std::move(p));
    }
  }
  std::stable_sort(s.pairs.begin(), s.pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
    return a.energy.imag() < b.energy.imag();
  });
  return s;
}

Spectrum classify_states(Spectrum s, double barrier_height, const ClassifyOptions& options) {
  if (!s.grid) throw InvalidArgument("classify_states: spectrum has no grid");
  const double half_width = options.interior_half_width ? *options.interior_half_width : barrier_tops(s.params).position;
  if (!(half_width > 0.0)) throw InvalidArgument("classify_states: interior half-width must be positive");
  const double theta = s.theta.value();
  const cplx unrotate = std::exp(cplx(0.0, 2.0 * theta));
  const double band = std::sin(options.ray_band);
  const auto x = s.grid->points();

  for (EigenPair& p : s.pairs) {
    const cplx e = p.energy;
    const cplx z = e * unrotate;
    const bool on_ray = z.real() > 0.0 ? std::abs(z.imag()) <= std::max(band * std::abs(e), 1e-10) : std::abs(e) <= 1e-10;

    double inside = 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.vector.values.size(); ++i) {
      const double a = std::norm(p.vector.values[i]);
      total += a;
      if (std::abs(x[static_cast<std::size_t>(i)]) <= half_width) inside += a;
    }
    p.interior_weight = total > 0.0 ? inside / total : 0.0;
    p.below_barrier = e.real() < barrier_height;
    p.low_confidence = false;

    if (on_ray) {
      p.cls = StateClass::rotated_continuum;
    } else if (e.real() < 0.0 && std::abs(e.imag()) < options.bound_width_tolerance) {
      p.cls = StateClass::bound;
    } else if (p.interior_weight >= options.resonance_weight) {
      p.cls = StateClass::resonance;
      p.low_confidence = !(p.width() > 0.0);
    } else if (p.interior_weight >= options.continuum_weight) {
      p.cls = StateClass::resonance;
      p.low_confidence = true;
    } else {
      p.cls = StateClass::rotated_continuum;
      p.low_confidence = true;
    }
  }
  s.classified = true;
  return s;
}

ThetaStabilityReport check_theta_stability(GridPtr grid, const PotentialParams& params,
                                           const std::vector<double>& thetas, const ThetaScanOptions& options) {
  if (!grid) throw InvalidArgument("check_theta_stability: no grid");
  if (thetas.size() < 2) throw InvalidArgument("check_theta_stability: need at least two angles");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] >= 0.1 && thetas[i] <= 0.6))
      throw InvalidArgument("check_theta_stability: angle " + fmt17(thetas[i]) + " outside [0.1, 0.6]");
    if (i > 0 && !(thetas[i] > thetas[i - 1]))
      throw InvalidArgument("check_theta_stability: angles must be strictly increasing");
  }
  params.validate();
  // Without a barrier (quad_coef <= 0) the potential's supremum is its zero limit.
  const double vb = params.quad_coef > 0.0 ? barrier_tops(params).height : 0.0;

  ThetaStabilityReport report;
  report.thetas = thetas;
  report.spectra.resize(thetas.size());
  parallel_for(thetas.size(), options.threads, [&](std::size_t i) {
    ScaledHamiltonian h = build_hamiltonian(grid, ScalingAngle(thetas[i]), params, options.strict);
    report.spectra[i] = classify_states(eigendecompose(h), vb, options.classify);
  });

  const auto& first = report.spectra.front();
  for (std::size_t seed = 0; seed < first.size(); ++seed) {
    const EigenPair& p0 = first.pairs[seed];
    if (p0.cls == StateClass::rotated_continuum && !options.include_continuum) continue;
    ThetaTrack track;
    track.cls = p0.cls;
    track.parity = p0.parity;
    track.energies.push_back(p0.energy);
    std::size_t current = seed;

    for (std::size_t i = 1; i < thetas.size(); ++i) {
      const Spectrum& prev = report.spectra[i - 1];
      const Spectrum& next = report.spectra[i];
      const cplx last = track.energies.back();
      cplx predicted = last;
      if (track.energies.size() >= 2) {
        const cplx before = track.energies[track.energies.size() - 2];
        predicted = last + (last - before) * ((thetas[i] - thetas[i - 1]) / (thetas[i - 1] - thetas[i - 2]));
      }
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < prev.size(); ++k)
        if (k != current && prev.pairs[k].parity == track.parity)
          gap = std::min(gap, std::abs(prev.pairs[k].energy - last));
      const double radius = 0.5 * gap;

      std::size_t best = next.size();
      double best_dist = std::numeric_limits<double>::infinity();
      int candidates = 0;
      for (std::size_t k = 0; k < next.size(); ++k) {
        if (next.pairs[k].parity != track.parity) continue;
        const double d = std::abs(next.pairs[k].energy - predicted);
        if (d <= radius) ++candidates;
        if (d < best_dist) {
          best_dist = d;
          best = k;
        }
      }
      if (candidates == 0) {
        track.lost = true;
        report.issues.push_back("track starting at E = " + fmt17(p0.energy.real()) + " " + fmt17(p0.energy.imag()) +
                                "i lost at theta = " + fmt17(thetas[i]));
        break;
      }
      if (candidates > 1) {
        track.ambiguous = true;
        report.issues.push_back("track starting at E = " + fmt17(p0.energy.real()) + " " + fmt17(p0.energy.imag()) +
                                "i has " + std::to_string(candidates) + " candidates at theta = " + fmt17(thetas[i]));
      }
      current = best;
      track.energies.push_back(next.pairs[best].energy);
    }

    for (std::size_t i = 1; i < track.energies.size(); ++i) {
      track.derivative.push_back(std::abs(track.energies[i] - track.energies[i - 1]) / (thetas[i] - thetas[i - 1]));
      track.max_variation = std::max(track.max_variation, std::abs(track.energies[i] - track.energies[0]));
    }
    if (track.derivative.size() >= 3) {
      const auto it = std::min_element(track.derivative.begin(), track.derivative.end());
      const auto m = static_cast<std::size_t>(it - track.derivative.begin());
      if (m > 0 && m + 1 < track.derivative.size()) track.interior_minimum = m;
    }
    report.tracks.push_back(std::move(track));
  }
  return report;
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "index,re_e,im_e,gamma,class,c_norm_residual\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    const EigenPair& p = s.pairs[k];
    out += std::to_string(k) + ',' + fmt17(p.energy.real()) + ',' + fmt17(p.energy.imag()) + ',' + fmt17(p.width()) +
           ',' + (s.classified ? to_string(p.cls) : "unclassified") + ',' + fmt17(p.c_norm_residual) + '\n';
  }
  return out;
}

void write_spectrum_csv(const std::string& path, const Spectrum& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << spectrum_csv(s);
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace nhqm
