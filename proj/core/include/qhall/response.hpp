#pragma once

#include <utility>
#include <vector>

#include "qhall/fit.hpp"
#include "qhall/lattice_model.hpp"
#include "qhall/neass.hpp"
#include "qhall/spectral.hpp"

namespace qhall {

// Units: e = hbar = 1, so the conductance quantum is 1/(2 pi).
struct ResponseReport {
  Real sigma_hall = 0.0;
  int chern_oracle = 0;
  std::vector<std::pair<Real, Real>> j_hall;  // (eps, j)
  Real kubo_defect_slope = 0.0;
  Real ids = 0.0;  // trace per unit area of Pi0
};

namespace response {

// Tr(T) / (L1*L2*a^2).  On the finite torus this is exact; for magnetic
// periodic T it coincides with the cell average below.
Real trace_per_unit_area(const Matrix& T, const LatticeGeometry& g);

// Average of the kernel diagonal over one magnetic cell (q sites at x2 = 0)
// divided by the cell area.
Real cell_average_diagonal(const Matrix& T, const LatticeGeometry& g);

// [T, X_j] = -(d_j .* T) under the minimal-image convention.
OperatorMatrix position_commutator(const OperatorMatrix& T, const DisplacementTable& d, int axis);

// J_i = i [H, X_i] = -i (d_i .* H); Hermitian for Hermitian H.
OperatorMatrix current_operator(const OperatorMatrix& H, const DisplacementTable& d, int axis);

// sigma = i T(Pi0 [[Pi0,X1],[Pi0,X2]] Pi0) evaluated with displacement
// kernels; real up to round-off, quantized to C/(2 pi) for gapped Pi0.
Real hall_conductivity_marker(const Projection& Pi0, const DisplacementTable& d,
                              const LatticeGeometry& g);

// Momentum-space Chern number of the lowest filled_bands magnetic Bloch
// bands, by plaquette link products on a k-mesh, refined until the rounded
// value is stable.  v is an optional onsite table on the q-site cell.
// GaplessAtFilling when the direct gap closes on the mesh.
int chern_number_momentum(const FluxConfig& flux, int filled_bands,
                          const std::vector<Real>& v = {}, int mesh0 = 12);

// j_Hall(eps) = T(J_1 Pi_n^eps).
Real hall_current_density(const OperatorMatrix& H0, const DisplacementTable& d,
                          const NeassState& state, const LatticeGeometry& g);

// Slope of log |j(eps) - eps*sigma| vs log eps, sigma from the marker.
PowerLawFit kubo_defect_scaling(const OperatorMatrix& H0, const NeassGenerators& gen,
                                const Projection& Pi0, const DisplacementTable& d,
                                const LatticeGeometry& g, const std::vector<Real>& eps_list,
                                Real eps_max = 0.3);

// Both sides of T([Q X1 Q, Q X2 Q]) at Q = U P U^dagger and Q = P.  The
// traces are purely imaginary; the imaginary parts are returned and the
// stray real parts are required to vanish.  U must be unitary with U - 1
// localized (checked when the profile offers enough bins to fit).
std::pair<Real, Real> chern_simons_check(const Projection& P, const Matrix& U,
                                         const DisplacementTable& d, const LatticeGeometry& g);

// |T(T1 T2) - T(T2 T1)| with the two traces accumulated in different orders;
// exact cyclicity on the torus makes this a round-off regression guard.
Real cyclicity_defect(const Matrix& T1, const Matrix& T2, const LatticeGeometry& g);

// |T([PAP, P X_j P])|, anchored-kernel evaluation; vanishes for localized
// magnetic-periodic A.
Real vanishing_trace_check(const Projection& P, const Matrix& A, const DisplacementTable& d,
                           int axis, const LatticeGeometry& g);

// T([P X1 P, P X2 P]) computed two independent ways: expanding the anchored
// triple sum over site chains literally, and reducing it to matrix products
// Tr(P [d1.*P, d2.*P]).  Both values are purely imaginary and agree to
// round-off; i times either one is the Hall marker.
std::pair<Complex, Complex> commutator_trace_two_ways(const Projection& P,
                                                      const DisplacementTable& d,
                                                      const LatticeGeometry& g);

}  // namespace response
}  // namespace qhall
