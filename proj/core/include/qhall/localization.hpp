#pragma once

#include <vector>

#include "qhall/lattice_model.hpp"
#include "qhall/types.hpp"

namespace qhall {

// Kernel magnitudes binned by minimal-image Euclidean distance, unit bin
// width, max aggregation within a bin (matching a sup over pairs).  A bin is
// present whenever the torus has site pairs at that distance, even if the
// kernel vanishes there.
struct DecayProfile {
  std::vector<Real> distance;  // bin lower edges
  std::vector<Real> value;
  Real seam_cut = 0.0;  // 0.4 * min(L1,L2) * a; beyond this wraparound mixes in
};

struct LocalizationFit {
  Real C = 0.0;
  Real beta = 0.0;  // decay rate in inverse lattice constants, > 0 if localized
  Real r_squared = 0.0;
  Real d_min = 0.0;
  Real d_max = 0.0;
};

struct DecayPropagationReport {
  LocalizationFit input1;
  LocalizationFit input2;
  LocalizationFit product;      // T1 * T2
  LocalizationFit commutator;   // [X_1, T1] kernel
  bool product_rate_ok = false;
  bool commutator_rate_ok = false;
};

namespace localization {

DecayProfile kernel_decay_profile(const Matrix& T, const LatticeGeometry& g);

// Least squares of log(value) against bin distance over the usable bins:
// value above the 1e-14 round-off floor, distance in [d_min, seam_cut].
// InsufficientData with fewer than 4 usable bins.
LocalizationFit fit_localization(const DecayProfile& p, Real d_min = 1.0);

// One resolvent fit per z.  The eigenbasis is computed once and reused;
// ZTooCloseToSpectrum when dist(z, sigma(H)) <= 1e-3.
std::vector<LocalizationFit> combes_thomas_scan(const OperatorMatrix& H,
                                                const LatticeGeometry& g,
                                                const std::vector<Complex>& z_list);

// Fits T1*T2 and the commutator kernel [X_1, T1] and compares their rates
// against the inputs: the product should keep at least min_ratio of the
// slower input rate up to an additive slack, the commutator rate should stay
// positive.  Inputs must themselves fit with beta > 0.
DecayPropagationReport decay_propagation_check(const Matrix& T1, const Matrix& T2,
                                               const LatticeGeometry& g, Real min_ratio = 0.8,
                                               Real slack = 0.05);

}  // namespace localization
}  // namespace qhall
