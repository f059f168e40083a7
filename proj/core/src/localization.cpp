#include "qhall/localization.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qhall/errors.hpp"
#include "qhall/fit.hpp"

namespace qhall {
namespace localization {

DecayProfile kernel_decay_profile(const Matrix& T, const LatticeGeometry& g) {
  const int N = g.sites();
  if (T.rows() != N) throw ConfigError("kernel_decay_profile: dimension mismatch");
  const DisplacementTable d = lattice::displacement_table(g);
  const Real diameter = std::hypot(0.5 * g.L1, 0.5 * g.L2) * g.a;
  const int nbins = static_cast<int>(diameter) + 1;
  std::vector<Real> vmax(static_cast<std::size_t>(nbins), -1.0);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const int b = static_cast<int>(d.dist(i, j));
      if (b >= nbins) continue;
      vmax[static_cast<std::size_t>(b)] =
          std::max(vmax[static_cast<std::size_t>(b)], std::abs(T(i, j)));
    }
  }
  DecayProfile p;
  p.seam_cut = 0.4 * std::min(g.L1, g.L2) * g.a;
  for (int b = 0; b < nbins; ++b) {
    if (vmax[static_cast<std::size_t>(b)] < 0) continue;  // no pairs at this distance
    p.distance.push_back(static_cast<Real>(b));
    p.value.push_back(vmax[static_cast<std::size_t>(b)]);
  }
  return p;
}

LocalizationFit fit_localization(const DecayProfile& p, Real d_min) {
  std::vector<Real> xs, ys;
  for (std::size_t i = 0; i < p.distance.size(); ++i) {
    const Real d = p.distance[i];
    const Real v = p.value[i];
    if (v > 1e-14 && d >= d_min && d <= p.seam_cut) {
      xs.push_back(d);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 4) {
    throw InsufficientData("only " + std::to_string(xs.size()) +
                           " usable bins, need 4 to fit a decay rate");
  }
  const fitting::LineFit f = fitting::least_squares_line(xs, ys);
  LocalizationFit fit;
  fit.beta = -f.slope;
  fit.C = std::exp(f.intercept);
  fit.r_squared = f.r_squared;
  fit.d_min = xs.front();
  fit.d_max = xs.back();
  return fit;
}

std::vector<LocalizationFit> combes_thomas_scan(const OperatorMatrix& H,
                                                const LatticeGeometry& g,
                                                const std::vector<Complex>& z_list) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.mat);
  if (es.info() != Eigen::Success) throw SolverFailure("combes_thomas_scan: eigensolve");
  const RealVector& E = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  std::vector<LocalizationFit> fits;
  for (const Complex& z : z_list) {
    Real dist = std::numeric_limits<Real>::max();
    for (int k = 0; k < E.size(); ++k) dist = std::min(dist, std::abs(z - Complex(E(k), 0)));
    if (dist <= 1e-3) {
      throw ZTooCloseToSpectrum("dist(z, spectrum) = " + std::to_string(dist));
    }
    Matrix resolvent_diag =
        (E.cast<Complex>().array() - z).inverse().matrix().asDiagonal();
    const Matrix R = V * (resolvent_diag * V.adjoint());
    fits.push_back(fit_localization(kernel_decay_profile(R, g)));
  }
  return fits;
}

DecayPropagationReport decay_propagation_check(const Matrix& T1, const Matrix& T2,
                                               const LatticeGeometry& g, Real min_ratio,
                                               Real slack) {
  DecayPropagationReport r;
  r.input1 = fit_localization(kernel_decay_profile(T1, g));
  r.input2 = fit_localization(kernel_decay_profile(T2, g));
  if (r.input1.beta <= 0 || r.input2.beta <= 0) {
    throw ConfigError("decay_propagation_check: inputs must have positive decay rates");
  }
  r.product = fit_localization(kernel_decay_profile(T1 * T2, g));
  const DisplacementTable d = lattice::displacement_table(g);
  r.commutator = fit_localization(
      kernel_decay_profile(lattice::displacement_product(d, T1, 1), g));
  r.product_rate_ok =
      r.product.beta >= min_ratio * std::min(r.input1.beta, r.input2.beta) - slack;
  r.commutator_rate_ok = r.commutator.beta > 0;
  return r;
}

}  // namespace localization
}  // namespace qhall
