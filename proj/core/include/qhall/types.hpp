#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qhall {

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

constexpr Real kPi = 3.141592653589793238462643383279502884;

// Spectral norm (largest singular value), computed from the top eigenvalue of
// A^dagger A.  Exact enough for tolerance checks down to ~1e-14 * ||A||.
Real operator_norm(const Matrix& A);

inline Matrix commutator(const Matrix& A, const Matrix& B) { return A * B - B * A; }

inline Real hermiticity_defect(const Matrix& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

inline Real unitarity_defect(const Matrix& U) {
  return operator_norm(U.adjoint() * U - Matrix::Identity(U.rows(), U.cols()));
}

}  // namespace qhall
