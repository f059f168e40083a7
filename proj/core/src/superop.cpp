#include "qhall/superop.hpp"

#include <Eigen/LU>
#include <string>

#include "qhall/errors.hpp"

namespace qhall {
namespace superop {

OdSplit od_split(const Matrix& A, const Projection& P) {
  if (A.rows() != P.matrix.mat.rows()) {
    throw ConfigError("od_split: dimension mismatch");
  }
  const Matrix& Pm = P.matrix.mat;
  const Matrix PA = Pm * A;
  const Matrix AP = A * Pm;
  const Matrix PAP = Pm * AP;
  OdSplit split;
  split.offdiagonal = PA + AP - 2.0 * PAP;
  split.diagonal = A - split.offdiagonal;
  return split;
}

Matrix inv_liouvillian_spectral(const Spectrum& s, const Projection& P, const Matrix& A) {
  const int N = static_cast<int>(s.eigenvalues.size());
  const int r = P.rank;
  if (A.rows() != N || P.matrix.mat.rows() != N) {
    throw ConfigError("inv_liouvillian_spectral: dimension mismatch");
  }
  if (r == 0 || r == N) {
    return Matrix::Zero(N, N);
  }
  const auto& E = s.eigenvalues;
  if (E(r) - E(r - 1) < 1e-8) {
    throw GapTooSmall("cross-gap spacing " + std::to_string(E(r) - E(r - 1)));
  }
  const Matrix& V = s.eigenvectors;
  // The projection must be spectral for this eigenbasis; in it P is
  // diag(1_r, 0).
  const Matrix Pt = V.adjoint() * (P.matrix.mat * V);
  Matrix Pref = Matrix::Zero(N, N);
  Pref.topLeftCorner(r, r).setIdentity();
  if ((Pt - Pref).cwiseAbs().maxCoeff() > 1e-8) {
    throw ConfigError("inv_liouvillian_spectral: P is not the rank-" + std::to_string(r) +
                      " spectral projection of s");
  }
  Matrix At = V.adjoint() * (A * V);
  Matrix Bt = Matrix::Zero(N, N);
  // Cross-gap blocks only; within-band entries stay exactly zero rather than
  // relying on cancellation.
  for (int k = 0; k < r; ++k) {
    for (int l = r; l < N; ++l) {
      Bt(k, l) = Complex(0, 1) * At(k, l) / (E(k) - E(l));
      Bt(l, k) = Complex(0, 1) * At(l, k) / (E(l) - E(k));
    }
  }
  return V * (Bt * V.adjoint());
}

Matrix inv_liouvillian_contour(const OperatorMatrix& H, const Projection& P, const Matrix& A,
                               const Contour& c) {
  const int N = H.dim();
  const Matrix I = Matrix::Identity(N, N);
  const Matrix C = commutator(P.matrix.mat, A);
  Matrix out = Matrix::Zero(N, N);
  for (std::size_t k = 0; k < c.nodes.size(); ++k) {
    Eigen::PartialPivLU<Matrix> lu(H.mat - c.nodes[k] * I);
    const Matrix R = lu.solve(I);
    out += (c.weights[k] / (2.0 * kPi)) * (R * (C * R));
  }
  // Round-trip guard against under-resolved quadrature, mirroring the
  // idempotency guard on the Riesz projection.
  const Matrix od = od_part(A, P);
  const Real scale = std::max(Real(1), operator_norm(od));
  const Real defect = operator_norm(liouvillian(H.mat, out) - od);
  if (defect > 1e-6 * scale) {
    throw QuadratureDivergence("inverse-Liouvillian round-trip defect " +
                               std::to_string(defect));
  }
  return out;
}

}  // namespace superop
}  // namespace qhall
