#pragma once

#include <vector>

#include "qhall/fit.hpp"
#include "qhall/lattice_model.hpp"
#include "qhall/spectral.hpp"
#include "qhall/types.hpp"

namespace qhall {

// A[j-1] holds A_{j}; each generator is Hermitian and purely off-diagonal
// with respect to the Fermi projection (the diagonal part is chosen zero).
struct NeassGenerators {
  int order = 0;
  std::vector<Matrix> A;
};

struct NeassState {
  Real eps = 0.0;
  Matrix S;       // S_n = sum_j eps^{j-1} A_j
  Matrix U;       // exp(i eps S)
  Projection Pi;  // U Pi0 U^dagger
  // ||[H_eps, Pi]|| with [X2, .] realized as the minimal-image kernel; the
  // windowed variant restricts the commutator to pairs closer than
  // 0.4*min(L1,L2)*a before taking the norm, isolating bulk from seam.
  Real residual_norm = 0.0;
  Real residual_norm_windowed = 0.0;
};

namespace neass {

// B_m = sum_{k=1}^{m} ((-i)^k / k!) sum_{j in {1..m-k+1}^k, |j|=m}
//       [A_{j1}, [A_{j2}, ... [A_{jk}, B] ...]]
// with A passed as {A_1, ..}.  MissingGenerator if the expansion needs an
// A_j beyond the end of the list.
Matrix nested_commutator_coefficient(const Matrix& B, const std::vector<Matrix>& A, int m);

// Order-n recursion with X2 realized through minimal-image kernels:
//   A_1 = L^{-1}(-X2^OD),            X2^OD = [Pi0, [Pi0, X2]]
//   A_m = L^{-1}((L_{m-1} - (X2)_{m-1})^OD)   for 1 < m <= n
// where L_{m-1} collects the B_m(H0) terms free of A_m and (X2)_{m-1} is
// B_{m-1}(X2) with the innermost commutator [A_j, X2] = -d2 .* A_j.
NeassGenerators neass_generators(const OperatorMatrix& H0, const Projection& Pi0,
                                 const Spectrum& s, const DisplacementTable& d, int n);

// Same recursion with an explicit matrix X2; exact on any gapped pair
// (H0, X2), used to validate the kernel path on models where a true
// position operator exists.
NeassGenerators neass_generators_matrix_x2(const OperatorMatrix& H0, const Projection& Pi0,
                                           const Spectrum& s, const Matrix& X2, int n);

NeassState neass_state(const NeassGenerators& gen, const Projection& Pi0,
                       const OperatorMatrix& H0, const DisplacementTable& d, Real eps);

// Defect of the order-m defining equation ||[B_m(H0) - (X2)_{m-1}, Pi0]||
// for m = 1..order, kernel realization.  At m = 1 the kernel path carries an
// irreducible floor: the diagonal part of d2 .* Pi0 that no off-diagonal A_1
// can cancel.
std::vector<Real> recursion_identity_defects(const OperatorMatrix& H0,
                                             const NeassGenerators& gen, const Projection& Pi0,
                                             const DisplacementTable& d);

std::vector<Real> recursion_identity_defects_matrix_x2(const OperatorMatrix& H0,
                                                       const NeassGenerators& gen,
                                                       const Projection& Pi0, const Matrix& X2);

// Slope of log residual_norm vs log eps.  Requires at least 5 points, all
// inside (0, eps_max).
PowerLawFit residual_scaling(const OperatorMatrix& H0, const NeassGenerators& gen,
                             const Projection& Pi0, const DisplacementTable& d,
                             const std::vector<Real>& eps_list, Real eps_max = 0.3);

}  // namespace neass
}  // namespace qhall
