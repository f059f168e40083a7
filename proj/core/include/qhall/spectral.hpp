#pragma once

#include <vector>

#include "qhall/lattice_model.hpp"
#include "qhall/types.hpp"

namespace qhall {

struct Spectrum {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, unitary
};

struct GapInfo {
  Real lower_edge = 0.0;
  Real upper_edge = 0.0;
  Real mu = 0.0;  // defaults to mid-gap
  int rank = 0;   // states strictly below mu

  Real width() const { return upper_edge - lower_edge; }
};

// Positively oriented circle in the complex energy plane; trapezoidal
// quadrature nodes z_k = center + radius*exp(i theta_k) with weights
// w_k = i*radius*exp(i theta_k)*(2 pi / n), so that (i/2pi) sum_k w_k f(z_k)
// approximates the Riesz integral (i/2pi) oint f(z) dz.
struct Contour {
  Complex center;
  Real radius = 0.0;
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
};

struct Projection {
  OperatorMatrix matrix;
  int rank = 0;
};

namespace spectral {

// Residual check ||H v - E v|| <= 1e-10 per pair; SolverFailure otherwise.
Spectrum eigendecompose(const OperatorMatrix& H);

// Largest eigenvalue-free open interval containing hint; NoGap if its width
// falls below gap_min.  mu is set to the midpoint, rank to the count below.
GapInfo find_gap(const Spectrum& s, Real hint, Real gap_min = 1e-6);

// Sum of outer products over eigenvectors with E < mu.
// FermiOnSpectrum if mu comes within 1e-8 of an eigenvalue.
Projection fermi_projection_spectral(const Spectrum& s, Real mu);

// Circle through the gap: center = ((E_min - margin) + mu)/2 on the real
// axis, radius = mu - center, margin = width/2.  EnclosureFailure if the
// circle does not separate exactly gap.rank eigenvalues from the rest or a
// node comes closer than width/4 to the spectrum.
Contour build_contour(const GapInfo& gap, const Spectrum& s, int n_nodes);

// (i/2pi) sum_k w_k (H - z_k)^{-1}, Hermitized.  Resolvents via dense LU so
// the path stays independent of the eigensolver.  QuadratureDivergence if the
// idempotency defect exceeds 1e-6.
Projection fermi_projection_riesz(const OperatorMatrix& H, const Contour& c);

}  // namespace spectral
}  // namespace qhall
