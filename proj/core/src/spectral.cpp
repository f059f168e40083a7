#include "qhall/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qhall/errors.hpp"

namespace qhall {
namespace spectral {

Spectrum eigendecompose(const OperatorMatrix& H) {
  if (hermiticity_defect(H.mat) > 1e-12) {
    throw SolverFailure("eigendecompose: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.mat);
  if (es.info() != Eigen::Success) {
    throw SolverFailure("eigendecompose: eigensolver did not converge");
  }
  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  const Real scale = std::max(Real(1), s.eigenvalues.cwiseAbs().maxCoeff());
  Matrix resid = H.mat * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal();
  if (resid.colwise().norm().maxCoeff() > 1e-10 * scale) {
    throw SolverFailure("eigendecompose: eigenpair residual above 1e-10");
  }
  if (unitarity_defect(s.eigenvectors) > 1e-12) {
    throw SolverFailure("eigendecompose: eigenvector basis not unitary");
  }
  return s;
}

GapInfo find_gap(const Spectrum& s, Real hint, Real gap_min) {
  const auto& E = s.eigenvalues;
  const int N = static_cast<int>(E.size());
  if (N == 0) throw NoGap("empty spectrum");
  if (hint <= E(0) || hint >= E(N - 1)) {
    throw NoGap("hint lies outside the spectral range");
  }
  int below = 0;
  while (below < N && E(below) <= hint) ++below;
  GapInfo gap;
  gap.lower_edge = E(below - 1);
  gap.upper_edge = E(below);
  gap.rank = below;
  gap.mu = 0.5 * (gap.lower_edge + gap.upper_edge);
  if (hint <= gap.lower_edge || gap.width() < gap_min) {
    throw NoGap("no interval of width >= " + std::to_string(gap_min) +
                " around hint " + std::to_string(hint));
  }
  return gap;
}

Projection fermi_projection_spectral(const Spectrum& s, Real mu) {
  const auto& E = s.eigenvalues;
  const int N = static_cast<int>(E.size());
  if ((E.array() - mu).abs().minCoeff() < 1e-8) {
    throw FermiOnSpectrum("mu = " + std::to_string(mu) + " within 1e-8 of an eigenvalue");
  }
  int rank = 0;
  while (rank < N && E(rank) < mu) ++rank;
  Projection P;
  P.rank = rank;
  if (rank == 0) {
    P.matrix.mat = Matrix::Zero(N, N);
  } else {
    const Matrix V = s.eigenvectors.leftCols(rank);
    Matrix M = V * V.adjoint();
    P.matrix.mat = 0.5 * (M + Matrix(M.adjoint()));
  }
  P.matrix.hermitian = true;
  return P;
}

Contour build_contour(const GapInfo& gap, const Spectrum& s, int n_nodes) {
  if (n_nodes < 8) throw ConfigError("build_contour: need at least 8 nodes");
  const auto& E = s.eigenvalues;
  const Real g = gap.width();
  Contour c;
  if (gap.rank == 0) {
    // Nothing to enclose: a small circle below the spectrum, so the Riesz
    // integral evaluates to zero.
    c.center = gap.mu - 0.5 * g;
    c.radius = 0.25 * g;
  } else {
    const Real left = E.minCoeff() - 0.5 * g;
    c.center = 0.5 * (left + gap.mu);
    c.radius = gap.mu - c.center.real();
  }
  if (c.radius <= 0) throw EnclosureFailure("non-positive contour radius");
  int inside = 0;
  for (int k = 0; k < E.size(); ++k) {
    const Real dist = std::abs(Complex(E(k), 0) - c.center);
    if (dist < c.radius) ++inside;
    else if (dist == c.radius) throw EnclosureFailure("eigenvalue on the contour");
  }
  if (inside != gap.rank) {
    throw EnclosureFailure("contour encloses " + std::to_string(inside) +
                           " states, expected " + std::to_string(gap.rank));
  }
  c.nodes.resize(static_cast<std::size_t>(n_nodes));
  c.weights.resize(static_cast<std::size_t>(n_nodes));
  Real min_dist = std::numeric_limits<Real>::max();
  for (int k = 0; k < n_nodes; ++k) {
    const Real th = 2.0 * kPi * k / n_nodes;
    const Complex dir = std::exp(Complex(0, th));
    c.nodes[k] = c.center + c.radius * dir;
    c.weights[k] = Complex(0, 1) * c.radius * dir * (2.0 * kPi / n_nodes);
    for (int l = 0; l < E.size(); ++l) {
      min_dist = std::min(min_dist, std::abs(c.nodes[k] - Complex(E(l), 0)));
    }
  }
  if (min_dist < 0.25 * g) {
    throw EnclosureFailure("quadrature node within g/4 of the spectrum");
  }
  return c;
}

Projection fermi_projection_riesz(const OperatorMatrix& H, const Contour& c) {
  const int N = H.dim();
  const Matrix I = Matrix::Identity(N, N);
  Matrix acc = Matrix::Zero(N, N);
  for (std::size_t k = 0; k < c.nodes.size(); ++k) {
    Eigen::PartialPivLU<Matrix> lu(H.mat - c.nodes[k] * I);
    acc += c.weights[k] * lu.solve(I);
  }
  Matrix M = (Complex(0, 1) / (2.0 * kPi)) * acc;
  Projection P;
  P.matrix.mat = 0.5 * (M + Matrix(M.adjoint()));
  P.matrix.hermitian = true;
  const Real idem = operator_norm(P.matrix.mat * P.matrix.mat - P.matrix.mat);
  if (idem > 1e-6) {
    throw QuadratureDivergence("Riesz projection idempotency defect " + std::to_string(idem));
  }
  const Real tr = P.matrix.mat.trace().real();
  P.rank = static_cast<int>(std::lround(tr));
  return P;
}

}  // namespace spectral
}  // namespace qhall
