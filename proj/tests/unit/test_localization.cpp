#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhall/errors.hpp"
#include "qhall/fit.hpp"
#include "qhall/lattice_model.hpp"
#include "qhall/localization.hpp"
#include "qhall/neass.hpp"
#include "qhall/spectral.hpp"

using namespace qhall;

namespace {

struct Model {
  LatticeGeometry g = lattice::build_geometry(12, 12, {1, 3});
  OperatorMatrix H = lattice::build_hamiltonian(g);
  DisplacementTable d = lattice::displacement_table(g);
  Spectrum s = spectral::eigendecompose(H);
  GapInfo gap = spectral::find_gap(s, -1.3);
  Projection P = spectral::fermi_projection_spectral(s, gap.mu);
};

const Model& model() {
  static Model m;
  return m;
}

Matrix synthetic_decay(const DisplacementTable& d, Real rate) {
  return ((-rate) * d.dist.array()).exp().matrix().cast<Complex>();
}

}  // namespace

TEST_CASE("profile and fit recover a planted exponential rate exactly") {
  const Model& m = model();
  const Matrix T = synthetic_decay(m.d, 0.7);
  const DecayProfile p = localization::kernel_decay_profile(T, m.g);

  // Half-torus diameter hypot(6, 6) = 8.49 gives bins 0..8, all populated.
  REQUIRE(p.distance.size() == 9);
  CHECK(p.distance.front() == 0.0);
  CHECK(p.distance.back() == 8.0);
  CHECK(p.seam_cut == doctest::Approx(4.8));
  // Integer separations exist along the axes, so each near bin is pinned at
  // its lower edge.
  for (int b = 0; b <= 6; ++b)
    CHECK(std::abs(p.value[static_cast<std::size_t>(b)] - std::exp(-0.7 * b)) <= 1e-15);

  const LocalizationFit f = localization::fit_localization(p);
  CHECK(std::abs(f.beta - 0.7) <= 1e-9);
  CHECK(std::abs(f.C - 1.0) <= 1e-9);
  CHECK(f.r_squared >= 1.0 - 1e-12);
  CHECK(f.d_min == 1.0);
  CHECK(f.d_max == 4.0);

  CHECK_THROWS_AS(localization::kernel_decay_profile(Matrix::Zero(10, 10), m.g), ConfigError);
}

TEST_CASE("too small a torus leaves nothing between floor and seam") {
  const LatticeGeometry tiny = lattice::build_geometry(3, 3, {1, 3});
  const DisplacementTable d = lattice::displacement_table(tiny);
  const Matrix T = synthetic_decay(d, 0.5);
  CHECK_THROWS_AS(localization::fit_localization(localization::kernel_decay_profile(T, tiny)),
                  InsufficientData);
}

TEST_CASE("resolvent decay steepens with distance from the spectrum") {
  const Model& m = model();
  const Real mu = m.gap.mu;
  const Real e_min = m.s.eigenvalues(0);
  const std::vector<Complex> zs = {Complex(mu, 0.0), Complex(mu, 0.6), Complex(mu, 1.5),
                                   Complex(e_min - 3.0, 0.0)};
  const auto fits = localization::combes_thomas_scan(m.H, m.g, zs);
  REQUIRE(fits.size() == 4);

  CHECK(std::abs(fits[0].beta - 0.590930) <= 2e-3);
  CHECK(std::abs(fits[1].beta - 0.680733) <= 2e-3);
  CHECK(std::abs(fits[2].beta - 0.921165) <= 2e-3);
  CHECK(std::abs(fits[3].beta - 1.674913) <= 2e-3);
  CHECK(fits[3].r_squared > 0.999);

  std::vector<Real> betas;
  for (const auto& f : fits) betas.push_back(f.beta);
  CHECK(fitting::kendall_tau(betas) == 1.0);

  const std::vector<Complex> on_spectrum = {Complex(e_min, 0.0)};
  CHECK_THROWS_AS(localization::combes_thomas_scan(m.H, m.g, on_spectrum),
                  ZTooCloseToSpectrum);
}

TEST_CASE("localization survives products and position commutators") {
  const Model& m = model();
  const NeassGenerators gen = neass::neass_generators(m.H, m.P, m.s, m.d, 1);
  const DecayPropagationReport r =
      localization::decay_propagation_check(m.P.matrix.mat, gen.A[0], m.g);

  CHECK(std::abs(r.input1.beta - 0.962) <= 1e-2);
  CHECK(r.input2.beta > 0);
  CHECK(r.product.beta > 0);
  CHECK(std::abs(r.commutator.beta - 0.505) <= 1e-2);
  CHECK(r.product_rate_ok);
  CHECK(r.commutator_rate_ok);

  const Matrix growing = synthetic_decay(m.d, -0.1);
  CHECK_THROWS_AS(localization::decay_propagation_check(growing, growing, m.g), ConfigError);
}

TEST_CASE("line fit, power law, and rank correlation behave on closed forms") {
  const std::vector<Real> x = {0.0, 1.0, 2.0, 3.0};
  const std::vector<Real> y = {1.0, 3.0, 5.0, 7.0};
  const fitting::LineFit lf = fitting::least_squares_line(x, y);
  CHECK(std::abs(lf.slope - 2.0) <= 1e-14);
  CHECK(std::abs(lf.intercept - 1.0) <= 1e-14);
  CHECK(lf.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(fitting::least_squares_line({1.0, 1.0}, {2.0, 3.0}), DegenerateFit);
  CHECK_THROWS_AS(fitting::least_squares_line({1.0}, {2.0}), DegenerateFit);
  CHECK_THROWS_AS(fitting::least_squares_line({1.0, 2.0}, {2.0}), ConfigError);

  std::vector<Real> px = {1.0, 2.0, 4.0, 8.0};
  std::vector<Real> py;
  for (Real v : px) py.push_back(3.0 * std::pow(v, 2.5));
  const PowerLawFit pf = fitting::power_law_fit(px, py);
  CHECK(std::abs(pf.slope - 2.5) <= 1e-12);
  CHECK(std::abs(pf.intercept - std::log(3.0)) <= 1e-12);
  CHECK_THROWS_AS(fitting::power_law_fit({1.0, 2.0}, {1.0, 1e-14}), DegenerateFit);
  CHECK_THROWS_AS(fitting::power_law_fit({-1.0, 2.0}, {1.0, 1.0}), DegenerateFit);

  CHECK(fitting::kendall_tau({1.0, 2.0, 3.0}) == 1.0);
  CHECK(fitting::kendall_tau({3.0, 2.0, 1.0}) == -1.0);
  CHECK(fitting::kendall_tau({1.0, 1.0, 2.0}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(fitting::kendall_tau({1.0}), DegenerateFit);
}
