#include "qhall/neass.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "qhall/errors.hpp"
#include "qhall/superop.hpp"

namespace qhall {
namespace neass {
namespace {

// Shared expansion engine for Eq. (B_m).  Nested commutators are memoized by
// their index suffix: [A_{j1}, nested(j2..jk)], so tuples sharing a tail
// reuse work.  The innermost layer [A_{jk}, B] is pluggable, which is how
// the kernel realization of B = X2 enters without an X2 matrix existing.
class BmExpansion {
 public:
  BmExpansion(const std::vector<Matrix>& A, std::function<Matrix(const Matrix&)> innermost)
      : A_(A), innermost_(std::move(innermost)) {}

  // Sum over all multi-indices of total weight m whose entries do not exceed
  // max_index.  missing_is_error selects between MissingGenerator and
  // silently dropping such tuples (used when the top generator is the
  // unknown being solved for).
  Matrix evaluate(int m, int max_index, bool missing_is_error) {
    const int N = static_cast<int>(A_.empty() ? 0 : A_[0].rows());
    Matrix sum = Matrix::Zero(N, N);
    std::vector<int> tuple;
    for (int k = 1; k <= m; ++k) {
      const int cap = m - k + 1;
      Complex coeff(1, 0);
      for (int i = 1; i <= k; ++i) coeff *= Complex(0, -1) / static_cast<Real>(i);
      tuple.clear();
      enumerate(m, k, cap, max_index, missing_is_error, coeff, tuple, sum);
    }
    return sum;
  }

 private:
  void enumerate(int remaining, int slots, int cap, int max_index, bool missing_is_error,
                 Complex coeff, std::vector<int>& tuple, Matrix& sum) {
    if (slots == 0) {
      if (remaining == 0) sum += coeff * nested(tuple, 0);
      return;
    }
    // Each later slot takes at least 1, so this slot takes at most
    // remaining - (slots - 1).
    const int hi = std::min(cap, remaining - (slots - 1));
    for (int j = 1; j <= hi; ++j) {
      if (j > static_cast<int>(A_.size()) || j > max_index) {
        if (missing_is_error && j <= remaining - (slots - 1)) {
          throw MissingGenerator("expansion of order " + std::to_string(remaining) +
                                 " needs A_" + std::to_string(j));
        }
        continue;
      }
      tuple.push_back(j);
      enumerate(remaining - j, slots - 1, cap, max_index, missing_is_error, coeff, tuple, sum);
      tuple.pop_back();
    }
  }

  const Matrix& nested(const std::vector<int>& tuple, std::size_t from) {
    const std::vector<int> key(tuple.begin() + static_cast<std::ptrdiff_t>(from), tuple.end());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Matrix value;
    if (key.size() == 1) {
      value = innermost_(A_[static_cast<std::size_t>(key[0] - 1)]);
    } else {
      value = commutator(A_[static_cast<std::size_t>(key[0] - 1)], nested(tuple, from + 1));
    }
    return memo_.emplace(std::move(key), std::move(value)).first->second;
  }

  const std::vector<Matrix>& A_;
  std::function<Matrix(const Matrix&)> innermost_;
  std::map<std::vector<int>, Matrix> memo_;
};

void check_generator(const Matrix& Aj, const Projection& Pi0, int j) {
  if (hermiticity_defect(Aj) > 1e-10) {
    throw SolverFailure("A_" + std::to_string(j) + " lost Hermiticity");
  }
  const Matrix diag = Aj - superop::od_part(Aj, Pi0);
  if (operator_norm(diag) > 1e-10) {
    throw SolverFailure("A_" + std::to_string(j) + " has a diagonal component");
  }
}

// Recursion shared by the kernel and matrix realizations of X2.  x2_od is
// [Pi0,[Pi0,X2]] and innermost computes [A, X2].
NeassGenerators build_generators(const OperatorMatrix& H0, const Projection& Pi0,
                                 const Spectrum& s, int n, const Matrix& x2_od,
                                 const std::function<Matrix(const Matrix&)>& innermost) {
  if (n < 1) throw ConfigError("neass order must be >= 1");
  NeassGenerators gen;
  gen.order = n;
  gen.A.push_back(superop::inv_liouvillian_spectral(s, Pi0, -x2_od));
  check_generator(gen.A.back(), Pi0, 1);
  for (int m = 2; m <= n; ++m) {
    BmExpansion h_terms(gen.A, [&H0](const Matrix& Aj) { return commutator(Aj, H0.mat); });
    const Matrix Lm1 = h_terms.evaluate(m, m - 1, false);
    BmExpansion x2_terms(gen.A, innermost);
    const Matrix X2m1 = x2_terms.evaluate(m - 1, m - 1, true);
    const Matrix D = superop::od_part(Lm1 - X2m1, Pi0);
    gen.A.push_back(superop::inv_liouvillian_spectral(s, Pi0, D));
    check_generator(gen.A.back(), Pi0, m);
  }
  return gen;
}

}  // namespace

Matrix nested_commutator_coefficient(const Matrix& B, const std::vector<Matrix>& A, int m) {
  if (m < 1) throw ConfigError("nested_commutator_coefficient: m must be >= 1");
  BmExpansion terms(A, [&B](const Matrix& Aj) { return commutator(Aj, B); });
  return terms.evaluate(m, m, true);
}

NeassGenerators neass_generators(const OperatorMatrix& H0, const Projection& Pi0,
                                 const Spectrum& s, const DisplacementTable& d, int n) {
  // [Pi0, X2] = -(d2 .* Pi0), so X2^OD = [Pi0, -(d2 .* Pi0)].
  const Matrix W = lattice::displacement_product(d, Pi0.matrix.mat, 2);
  const Matrix x2_od = commutator(Pi0.matrix.mat, Matrix(-W));
  return build_generators(H0, Pi0, s, n, x2_od, [&d](const Matrix& Aj) {
    return Matrix(-lattice::displacement_product(d, Aj, 2));
  });
}

NeassGenerators neass_generators_matrix_x2(const OperatorMatrix& H0, const Projection& Pi0,
                                           const Spectrum& s, const Matrix& X2, int n) {
  const Matrix x2_od = superop::od_part(X2, Pi0);
  return build_generators(H0, Pi0, s, n, x2_od,
                          [&X2](const Matrix& Aj) { return commutator(Aj, X2); });
}

NeassState neass_state(const NeassGenerators& gen, const Projection& Pi0,
                       const OperatorMatrix& H0, const DisplacementTable& d, Real eps) {
  if (eps < 0) throw ConfigError("neass_state: eps must be >= 0");
  const int N = Pi0.matrix.dim();
  NeassState st;
  st.eps = eps;
  st.S = Matrix::Zero(N, N);
  Real scale = 1.0;
  for (const Matrix& Aj : gen.A) {
    st.S += scale * Aj;
    scale *= eps;
  }
  // exp(i eps S) through the eigenbasis of the Hermitian eps*S keeps U
  // unitary to round-off.
  Eigen::SelfAdjointEigenSolver<Matrix> es(eps * st.S);
  if (es.info() != Eigen::Success) throw SolverFailure("neass_state: exponential eigensolve");
  const Matrix& W = es.eigenvectors();
  Matrix phases = (Complex(0, 1) * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal();
  st.U = W * (phases * W.adjoint());
  if (unitarity_defect(st.U) > 1e-12) throw SolverFailure("neass_state: U not unitary");

  Matrix Pi = st.U * (Pi0.matrix.mat * st.U.adjoint());
  st.Pi.matrix.mat = 0.5 * (Pi + Matrix(Pi.adjoint()));
  st.Pi.matrix.hermitian = true;
  st.Pi.rank = Pi0.rank;

  // [H_eps, Pi] = [H0, Pi] - eps * (d2 .* Pi), all through the kernel; the
  // coordinate-branch X2 would inject an O(1) seam term at |x2 - x2'| = L2-1.
  const Matrix resid =
      commutator(H0.mat, st.Pi.matrix.mat) -
      eps * lattice::displacement_product(d, st.Pi.matrix.mat, 2);
  st.residual_norm = operator_norm(resid);
  const Real cut = 0.4 * std::min(d.L1, d.L2) * d.a;
  st.residual_norm_windowed =
      operator_norm((d.dist.array() <= cut).cast<Complex>().matrix().cwiseProduct(resid));
  return st;
}

std::vector<Real> recursion_identity_defects(const OperatorMatrix& H0,
                                             const NeassGenerators& gen, const Projection& Pi0,
                                             const DisplacementTable& d) {
  std::vector<Real> defects;
  const Matrix& P = Pi0.matrix.mat;
  for (int m = 1; m <= gen.order; ++m) {
    const Matrix BmH = nested_commutator_coefficient(H0.mat, gen.A, m);
    Matrix lhs;
    if (m == 1) {
      // (X2)_0 is X2 itself; only its commutator with Pi0 exists at kernel
      // level: [X2, Pi0] = d2 .* Pi0.
      lhs = commutator(BmH, P) - lattice::displacement_product(d, P, 2);
    } else {
      BmExpansion x2_terms(gen.A, [&d](const Matrix& Aj) {
        return Matrix(-lattice::displacement_product(d, Aj, 2));
      });
      lhs = commutator(Matrix(BmH - x2_terms.evaluate(m - 1, m - 1, true)), P);
    }
    defects.push_back(operator_norm(lhs));
  }
  return defects;
}

std::vector<Real> recursion_identity_defects_matrix_x2(const OperatorMatrix& H0,
                                                       const NeassGenerators& gen,
                                                       const Projection& Pi0, const Matrix& X2) {
  std::vector<Real> defects;
  const Matrix& P = Pi0.matrix.mat;
  for (int m = 1; m <= gen.order; ++m) {
    const Matrix BmH = nested_commutator_coefficient(H0.mat, gen.A, m);
    Matrix X2m1;
    if (m == 1) {
      X2m1 = X2;
    } else {
      BmExpansion x2_terms(gen.A, [&X2](const Matrix& Aj) { return commutator(Aj, X2); });
      X2m1 = x2_terms.evaluate(m - 1, m - 1, true);
    }
    defects.push_back(operator_norm(commutator(Matrix(BmH - X2m1), P)));
  }
  return defects;
}

PowerLawFit residual_scaling(const OperatorMatrix& H0, const NeassGenerators& gen,
                             const Projection& Pi0, const DisplacementTable& d,
                             const std::vector<Real>& eps_list, Real eps_max) {
  if (eps_list.size() < 5) {
    throw ConfigError("residual_scaling: need at least 5 eps points");
  }
  std::vector<Real> resid;
  for (Real eps : eps_list) {
    if (eps <= 0 || eps >= eps_max) {
      throw ConfigError("residual_scaling: eps " + std::to_string(eps) +
                        " outside (0, " + std::to_string(eps_max) + ")");
    }
    resid.push_back(neass_state(gen, Pi0, H0, d, eps).residual_norm);
  }
  return fitting::power_law_fit(eps_list, resid);
}

}  // namespace neass
}  // namespace qhall
