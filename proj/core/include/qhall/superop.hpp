#pragma once

#include "qhall/spectral.hpp"
#include "qhall/types.hpp"

namespace qhall {

// A = diagonal + offdiagonal with respect to a projection P:
// diagonal = PAP + (1-P)A(1-P), offdiagonal = PA(1-P) + (1-P)AP.
struct OdSplit {
  Matrix diagonal;
  Matrix offdiagonal;
};

namespace superop {

OdSplit od_split(const Matrix& A, const Projection& P);

inline Matrix od_part(const Matrix& A, const Projection& P) {
  const Matrix PA = P.matrix.mat * A;
  const Matrix AP = A * P.matrix.mat;
  return PA + AP - 2.0 * (P.matrix.mat * AP);
}

// L_H(B) = -i (HB - BH).
inline Matrix liouvillian(const Matrix& H, const Matrix& B) {
  return Complex(0, -1) * commutator(H, B);
}

// Unique off-diagonal solution of L_H(B) = A^OD, assembled in the eigenbasis
// as B_kl = i A_kl / (E_k - E_l) on cross-gap pairs and zero elsewhere.
// P must be the spectral projection of s below its Fermi level.  Hermitian
// input gives Hermitian output.  GapTooSmall if any cross-gap denominator
// falls below 1e-8.
Matrix inv_liouvillian_spectral(const Spectrum& s, const Projection& P, const Matrix& A);

// Resolvent form (1/2pi) oint dz (H-z)^{-1} [P, A] (H-z)^{-1} on the given
// contour; agrees with the spectral path to quadrature accuracy.
Matrix inv_liouvillian_contour(const OperatorMatrix& H, const Projection& P, const Matrix& A,
                               const Contour& c);

}  // namespace superop
}  // namespace qhall
