#include "qhall/lattice_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

#include "qhall/errors.hpp"

namespace qhall {

Real operator_norm(const Matrix& A) {
  if (A.rows() == 0) return 0.0;
  Matrix gram = A.adjoint() * A;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  Real top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, Real(0)));
}

namespace lattice {
namespace {

// Signed fold of an integer coordinate difference into (-L/2, L/2), with the
// antipodal tie 2r == L sent to zero.  Keeping both signs at the tie would
// break antisymmetry; dropping the pair keeps every kernel identity exact.
int fold_signed(int delta, int L) {
  int r = ((delta % L) + L) % L;
  if (2 * r == L) return 0;
  if (2 * r > L) r -= L;
  return r;
}

// Unsigned minimal distance along one axis; the tie keeps magnitude L/2.
int fold_mag(int delta, int L) {
  int r = ((delta % L) + L) % L;
  return std::min(r, L - r);
}

Real table_at(const std::vector<Real>& t, int x1, int q) {
  if (t.empty()) return 0.0;
  return t[static_cast<std::size_t>(x1 % q)];
}

void verify_flags(OperatorMatrix& T, const LatticeGeometry& g, const char* who) {
  Real hd = hermiticity_defect(T.mat);
  if (hd > 1e-12) {
    throw FlagViolation(std::string(who) + ": hermiticity defect " + std::to_string(hd));
  }
  T.hermitian = true;
  Real md = mp_defect(T.mat, g);
  if (md > 1e-10) {
    throw FlagViolation(std::string(who) + ": magnetic-periodicity defect " + std::to_string(md));
  }
  T.magnetic_periodic = true;
}

}  // namespace

LatticeGeometry build_geometry(int L1, int L2, const FluxConfig& flux, Real a) {
  if (L1 <= 0 || L2 <= 0 || flux.q <= 0 || flux.p < 0 || flux.p >= flux.q) {
    throw ConfigError("build_geometry: need L1,L2 > 0 and 0 <= p/q < 1");
  }
  if (!(a > 0)) {
    throw ConfigError("build_geometry: lattice constant must be positive");
  }
  if (flux.p > 0 && std::gcd(flux.p, flux.q) != 1) {
    throw ConfigError("build_geometry: p/q must be in lowest terms");
  }
  if (L1 % flux.q != 0) {
    throw NonCommensurateTorus("L1 = " + std::to_string(L1) + " not divisible by q = " +
                               std::to_string(flux.q));
  }
  // Total flux through the torus must be an integer number of quanta,
  // p*L1*L2/q; with q | L1 this is automatic but the check stays explicit.
  if ((static_cast<long long>(flux.p) * L1 * L2) % flux.q != 0) {
    throw NonCommensurateTorus("total flux p*L1*L2/q is not an integer");
  }
  LatticeGeometry g;
  g.L1 = L1;
  g.L2 = L2;
  g.a = a;
  g.p = flux.p;
  g.q = flux.q;
  g.cell_area = static_cast<Real>(flux.q) * a * a;
  return g;
}

OperatorMatrix build_hamiltonian(const LatticeGeometry& g, const PotentialConfig& pot) {
  const int N = g.sites();
  const Real phi = g.flux();
  for (const auto* t : {&pot.v, &pot.a1, &pot.a2}) {
    if (!t->empty() && static_cast<int>(t->size()) != g.q) {
      throw ConfigError("potential tables must have length q = " + std::to_string(g.q));
    }
  }
  OperatorMatrix H;
  H.mat = Matrix::Zero(N, N);
  for (int x2 = 0; x2 < g.L2; ++x2) {
    for (int x1 = 0; x1 < g.L1; ++x1) {
      const int i = site_index(g, x1, x2);
      H.mat(i, i) += table_at(pot.v, x1, g.q);
      // Bonds accumulate so that L = 2 tori (where x+e and x-e coincide)
      // pick up both contributions.
      const int j1 = site_index(g, x1 + 1, x2);
      const Complex t1 = -std::exp(Complex(0, -table_at(pot.a1, x1, g.q)));
      H.mat(i, j1) += t1;
      H.mat(j1, i) += std::conj(t1);
      const int j2 = site_index(g, x1, x2 + 1);
      const Complex t2 = -std::exp(Complex(0, -(phi * x1 + table_at(pot.a2, x1, g.q))));
      H.mat(i, j2) += t2;
      H.mat(j2, i) += std::conj(t2);
    }
  }
  verify_flags(H, g, "build_hamiltonian");
  return H;
}

OperatorMatrix magnetic_translation(const LatticeGeometry& g, int g1, int g2) {
  if (g1 % g.q != 0) {
    throw ConfigError("magnetic_translation: g1 = " + std::to_string(g1) +
                      " must be a multiple of q = " + std::to_string(g.q));
  }
  const int N = g.sites();
  OperatorMatrix T;
  T.mat = Matrix::Zero(N, N);
  // In Landau gauge with q | L1 the supercell translations need no gauge
  // phase: the e2-bond phase exp(-i phi x1) is q-periodic in x1 and blind
  // to x2.
  for (int x2 = 0; x2 < g.L2; ++x2) {
    for (int x1 = 0; x1 < g.L1; ++x1) {
      T.mat(site_index(g, x1 + g1, x2 + g2), site_index(g, x1, x2)) = 1.0;
    }
  }
  T.hermitian = (g1 % g.L1 == 0 && g2 % g.L2 == 0);
  T.magnetic_periodic = true;
  return T;
}

DisplacementTable displacement_table(const LatticeGeometry& g) {
  const int N = g.sites();
  DisplacementTable d;
  d.L1 = g.L1;
  d.L2 = g.L2;
  d.a = g.a;
  d.d1.resize(N, N);
  d.d2.resize(N, N);
  d.dist.resize(N, N);
  for (int j = 0; j < N; ++j) {
    const int y1 = j % g.L1;
    const int y2 = j / g.L1;
    for (int i = 0; i < N; ++i) {
      const int x1 = i % g.L1;
      const int x2 = i / g.L1;
      d.d1(i, j) = g.a * fold_signed(x1 - y1, g.L1);
      d.d2(i, j) = g.a * fold_signed(x2 - y2, g.L2);
      d.dist(i, j) = g.a * std::hypot(static_cast<Real>(fold_mag(x1 - y1, g.L1)),
                                      static_cast<Real>(fold_mag(x2 - y2, g.L2)));
    }
  }
  return d;
}

OperatorMatrix perturbed_hamiltonian(const OperatorMatrix& H0, Real eps,
                                     const DisplacementTable& d) {
  const int N = H0.dim();
  if (N != d.L1 * d.L2) {
    throw ConfigError("perturbed_hamiltonian: dimension mismatch");
  }
  if (hermiticity_defect(H0.mat) > 1e-12) {
    throw ConfigError("perturbed_hamiltonian: H0 must be Hermitian");
  }
  OperatorMatrix H = H0;
  for (int i = 0; i < N; ++i) {
    const int x2 = i / d.L1;
    H.mat(i, i) -= eps * d.a * static_cast<Real>(x2 - d.L2 / 2);
  }
  H.hermitian = true;
  if (eps != 0.0) H.magnetic_periodic = false;
  return H;
}

OperatorMatrix random_mp_operator(const LatticeGeometry& g, std::mt19937& rng) {
  const int N = g.sites();
  const Real phi = g.flux();
  std::uniform_real_distribution<Real> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<Real> onsite(-0.3, 0.3);

  Matrix T = Matrix::Zero(N, N);
  struct Harmonic { int m1, m2; Real w; };
  const Harmonic hops[] = {{1, 0, 0.7}, {0, 1, 0.4}, {1, 1, 0.2}, {2, 0, 0.1}};
  for (const auto& h : hops) {
    const Complex c = h.w * std::exp(Complex(0, angle(rng)));
    for (int x2 = 0; x2 < g.L2; ++x2) {
      for (int x1 = 0; x1 < g.L1; ++x1) {
        // The phase exp(-i phi x1 m2) is q-periodic in x1, so the hop
        // commutes with the shift by q*e1; independence of x2 gives the
        // e2 shift for free.
        const Complex amp = c * std::exp(Complex(0, -phi * x1 * h.m2));
        T(site_index(g, x1, x2), site_index(g, x1 - h.m1, x2 - h.m2)) += amp;
      }
    }
  }
  std::vector<Real> v(static_cast<std::size_t>(g.q));
  for (auto& x : v) x = onsite(rng);
  for (int x2 = 0; x2 < g.L2; ++x2) {
    for (int x1 = 0; x1 < g.L1; ++x1) {
      T(site_index(g, x1, x2), site_index(g, x1, x2)) += v[static_cast<std::size_t>(x1 % g.q)];
    }
  }
  OperatorMatrix out;
  out.mat = 0.5 * (T + Matrix(T.adjoint()));
  out.hermitian = true;
  out.magnetic_periodic = true;
  return out;
}

Real mp_defect(const Matrix& T, const LatticeGeometry& g) {
  const Matrix S1 = magnetic_translation(g, g.q, 0).mat;
  const Matrix S2 = magnetic_translation(g, 0, 1).mat;
  return std::max(operator_norm(commutator(T, S1)), operator_norm(commutator(T, S2)));
}

Matrix displacement_product(const DisplacementTable& d, const Matrix& T, int axis) {
  if (axis != 1 && axis != 2) throw ConfigError("displacement axis must be 1 or 2");
  const RealMatrix& dj = (axis == 1) ? d.d1 : d.d2;
  if (dj.rows() != T.rows()) throw ConfigError("displacement_product: dimension mismatch");
  return dj.cast<Complex>().cwiseProduct(T);
}

}  // namespace lattice
}  // namespace qhall
