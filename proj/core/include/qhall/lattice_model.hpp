#pragma once

#include <random>
#include <vector>

#include "qhall/types.hpp"

namespace qhall {

// Flux per plaquette is 2*pi*p/q with gcd(p,q) = 1 and 0 <= p/q < 1.
struct FluxConfig {
  int p = 0;
  int q = 1;
};

// Finite L1 x L2 torus with a q x 1 magnetic unit cell.  Sites are indexed
// i = x1 + L1*x2 with x1 in [0,L1), x2 in [0,L2).
struct LatticeGeometry {
  int L1 = 0;
  int L2 = 0;
  Real a = 1.0;
  int p = 0;
  int q = 1;
  Real cell_area = 0.0;

  int sites() const { return L1 * L2; }
  Real flux() const { return 2.0 * kPi * static_cast<Real>(p) / static_cast<Real>(q); }
};

// Onsite energies and extra bond phases, periodic with the magnetic cell:
// all three tables are indexed by x1 mod q.  a1/a2 are the Peierls phases
// added on the bonds x -> x+e1 and x -> x+e2.  Empty tables mean zero.
struct PotentialConfig {
  std::vector<Real> v;
  std::vector<Real> a1;
  std::vector<Real> a2;
};

struct OperatorMatrix {
  Matrix mat;
  bool hermitian = false;
  bool magnetic_periodic = false;

  int dim() const { return static_cast<int>(mat.rows()); }
};

// Minimal-image signed displacements d_j(x,x') = x_j - x'_j folded into
// (-L_j/2, L_j/2], with the antipodal tie |delta| = L_j/2 mapped to zero so
// that antisymmetry d_j(x,x') = -d_j(x',x) holds exactly.  dist keeps the
// full magnitude L_j/2 at the tie.  Lengths carry one factor of a.
struct DisplacementTable {
  RealMatrix d1;
  RealMatrix d2;
  RealMatrix dist;
  int L1 = 0;
  int L2 = 0;
  Real a = 1.0;
};

namespace lattice {

inline int site_index(const LatticeGeometry& g, int x1, int x2) {
  x1 = ((x1 % g.L1) + g.L1) % g.L1;
  x2 = ((x2 % g.L2) + g.L2) % g.L2;
  return x1 + g.L1 * x2;
}

// Throws NonCommensurateTorus unless q divides L1 and the total flux
// p*L1*L2/q is an integer (both needed for single-valued boundary phases).
LatticeGeometry build_geometry(int L1, int L2, const FluxConfig& flux, Real a = 1.0);

// Hofstadter Hamiltonian in Landau gauge:
//   H(x, x+e1) = -exp(-i a1(x1))
//   H(x, x+e2) = -exp(-i (phi*x1 + a2(x1)))
//   H(x, x)    = v(x1)
// with phi = 2*pi*p/q, all bonds wrapped periodically, hermitian conjugates
// accumulated.  Both output flags are verified before return; a failed check
// throws FlagViolation.
OperatorMatrix build_hamiltonian(const LatticeGeometry& g, const PotentialConfig& pot = {});

// Translation by gamma = (g1, g2) sites.  Requires g1 to be a multiple of q
// (the magnetic supercell lattice); in Landau gauge with q | L1 these are
// plain permutation matrices and commute with build_hamiltonian output
// exactly.  Throws ConfigError off the supercell lattice.
OperatorMatrix magnetic_translation(const LatticeGeometry& g, int g1, int g2);

DisplacementTable displacement_table(const LatticeGeometry& g);

// H_eps = H0 - eps * X2 with X2 = diag(a*(x2 - L2/2)), the fixed coordinate
// branch centered on the torus.  The result is Hermitian but not magnetic
// periodic for eps != 0 (the branch has a seam at x2 = 0).
OperatorMatrix perturbed_hamiltonian(const OperatorMatrix& H0, Real eps,
                                     const DisplacementTable& d);

// Random Hermitian test operator that commutes exactly with both supercell
// translations: short-range hops T(x, x-m) = w_m * exp(i theta_m) *
// exp(-i phi * x1 * m2) over m in {(1,0),(0,1),(1,1),(2,0)} plus a random
// q-periodic real diagonal, Hermitized.  Support radius 2, so the
// operator is localized by construction.
OperatorMatrix random_mp_operator(const LatticeGeometry& g, std::mt19937& rng);

// Largest operator-norm commutator defect against the two generator
// translations (q*e1 and e2).
Real mp_defect(const Matrix& T, const LatticeGeometry& g);

// Entrywise product d_axis .* T, the kernel form of [X_axis, T].  axis is
// 1 or 2.
Matrix displacement_product(const DisplacementTable& d, const Matrix& T, int axis);

}  // namespace lattice
}  // namespace qhall
