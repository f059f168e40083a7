#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qhall/errors.hpp"
#include "qhall/lattice_model.hpp"
#include "qhall/neass.hpp"
#include "qhall/response.hpp"
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
  NeassGenerators gen2 = neass::neass_generators(H, P, s, d, 2);
};

const Model& model() {
  static Model m;
  return m;
}

std::vector<Real> eps_grid() {
  std::vector<Real> eps;
  for (int i = 0; i < 7; ++i) eps.push_back(std::pow(10.0, -1.5 + i / 6.0));
  return eps;
}

constexpr Real kSigma = 0.157612559748920;

}  // namespace

TEST_CASE("trace per unit area equals the cell average for periodic kernels") {
  const Model& m = model();
  CHECK(std::abs(response::trace_per_unit_area(m.P.matrix.mat, m.g) - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(response::cell_average_diagonal(m.P.matrix.mat, m.g) - 1.0 / 3.0) <= 1e-12);

  PotentialConfig pot;
  pot.v = {0.3, -0.1, 0.2};
  const OperatorMatrix Hv = lattice::build_hamiltonian(m.g, pot);
  const Real tpua = response::trace_per_unit_area(Hv.mat, m.g);
  const Real cell = response::cell_average_diagonal(Hv.mat, m.g);
  CHECK(std::abs(tpua - 0.4 / 3.0) <= 1e-14);
  CHECK(std::abs(tpua - cell) <= 1e-14);

  std::mt19937 rng(21);
  const OperatorMatrix T = lattice::random_mp_operator(m.g, rng);
  CHECK(std::abs(response::trace_per_unit_area(T.mat, m.g) -
                 response::cell_average_diagonal(T.mat, m.g)) <= 1e-12);

  CHECK_THROWS_AS(response::trace_per_unit_area(Matrix::Zero(10, 10), m.g), ConfigError);
}

TEST_CASE("current operator is the displacement kernel of the Hamiltonian") {
  const Model& m = model();
  const OperatorMatrix J1 = response::current_operator(m.H, m.d, 1);
  CHECK(J1.hermitian);
  CHECK(hermiticity_defect(J1.mat) <= 1e-13);
  const Matrix expect = Complex(0, -1) * lattice::displacement_product(m.d, m.H.mat, 1);
  CHECK(operator_norm(J1.mat - expect) == 0.0);

  const OperatorMatrix pc = response::position_commutator(m.H, m.d, 1);
  CHECK(operator_norm(J1.mat - Complex(0, 1) * pc.mat) == 0.0);

  OperatorMatrix bad;
  bad.mat = Matrix::Zero(144, 144);
  bad.mat(0, 1) = 1.0;
  CHECK_THROWS_AS(response::current_operator(bad, m.d, 1), ConfigError);
}

TEST_CASE("equilibrium state carries no net current") {
  const Model& m = model();
  const OperatorMatrix J1 = response::current_operator(m.H, m.d, 1);
  const OperatorMatrix J2 = response::current_operator(m.H, m.d, 2);
  CHECK(std::abs(response::trace_per_unit_area(Matrix(J1.mat * m.P.matrix.mat), m.g)) <= 1e-14);
  CHECK(std::abs(response::trace_per_unit_area(Matrix(J2.mat * m.P.matrix.mat), m.g)) <= 1e-14);
}

TEST_CASE("hall marker is near the flux-1/3 quantum and gauge invariant") {
  const Model& m = model();
  const Real sigma = response::hall_conductivity_marker(m.P, m.d, m.g);
  CHECK(std::abs(sigma - kSigma) <= 1e-9);
  CHECK(std::abs(2.0 * kPi * sigma - 1.0) <= 0.05);
  CHECK(std::abs(2.0 * kPi * sigma - 1.0 + 9.691080358624e-3) <= 1e-9);

  // Conjugating by site phases multiplies each closed chain by unity, so the
  // marker is exactly gauge invariant.
  std::mt19937 rng(17);
  std::uniform_real_distribution<Real> ud(0.0, 2.0 * kPi);
  Matrix D = Matrix::Zero(144, 144);
  for (int i = 0; i < 144; ++i) D(i, i) = std::polar(1.0, ud(rng));
  Projection gauged;
  gauged.matrix.mat = D * (m.P.matrix.mat * Matrix(D.adjoint()));
  gauged.matrix.hermitian = true;
  gauged.rank = m.P.rank;
  CHECK(std::abs(response::hall_conductivity_marker(gauged, m.d, m.g) - sigma) <= 1e-12);

  // Magnetic translations commute with H, so they fix the projection itself.
  const OperatorMatrix T = lattice::magnetic_translation(m.g, 3, 2);
  Projection moved;
  moved.matrix.mat = T.mat * (m.P.matrix.mat * Matrix(T.mat.adjoint()));
  moved.matrix.hermitian = true;
  moved.rank = m.P.rank;
  CHECK(operator_norm(moved.matrix.mat - m.P.matrix.mat) <= 1e-12);
  CHECK(std::abs(response::hall_conductivity_marker(moved, m.d, m.g) - sigma) <= 1e-12);
}

TEST_CASE("momentum-space chern numbers follow the diophantine pattern") {
  CHECK(response::chern_number_momentum({1, 3}, 1) == 1);
  CHECK(response::chern_number_momentum({1, 3}, 2) == -1);
  CHECK(response::chern_number_momentum({2, 3}, 2) == 1);
  CHECK(response::chern_number_momentum({3, 5}, 3) == 1);
  CHECK(response::chern_number_momentum({1, 3}, 3) == 0);

  CHECK_THROWS_AS(response::chern_number_momentum({1, 2}, 1), GaplessAtFilling);
  CHECK_THROWS_AS(response::chern_number_momentum({1, 3}, 0), ConfigError);
  CHECK_THROWS_AS(response::chern_number_momentum({1, 3}, 1, {0.1, 0.2}), ConfigError);
}

TEST_CASE("driven state carries the measured hall current") {
  const Model& m = model();
  const NeassState st = neass::neass_state(m.gen2, m.P, m.H, m.d, 0.05);
  const Real j = response::hall_current_density(m.H, m.d, st, m.g);
  CHECK(std::abs(j - 0.008101857915271) <= 1e-9);
  const Real rel = std::abs(j - 0.05 * kSigma) / (0.05 * kSigma);
  CHECK(std::abs(rel - 2.807263e-2) <= 1e-4);
}

TEST_CASE("kubo defect grows with the frozen power of the drive") {
  const Model& m = model();
  const PowerLawFit f =
      response::kubo_defect_scaling(m.H, m.gen2, m.P, m.d, m.g, eps_grid(), 0.32);
  CHECK(std::abs(f.slope - 0.766676909) <= 1e-5);

  const std::vector<Real> four(4, 0.1);
  CHECK_THROWS_AS(response::kubo_defect_scaling(m.H, m.gen2, m.P, m.d, m.g, four, 0.32),
                  ConfigError);
  const std::vector<Real> bad = {0.32, 0.1, 0.1, 0.1, 0.1};
  CHECK_THROWS_AS(response::kubo_defect_scaling(m.H, m.gen2, m.P, m.d, m.g, bad, 0.32),
                  ConfigError);
}

TEST_CASE("dressed and bare chern-simons traces stay within the drive window") {
  const Model& m = model();

  const auto same = response::chern_simons_check(m.P, Matrix::Identity(144, 144), m.d, m.g);
  CHECK(std::abs(same.first - same.second) <= 1e-13);
  // The bare branch is minus the marker: sigma = Re(i tr) = -Im(tr).
  CHECK(std::abs(same.second + response::hall_conductivity_marker(m.P, m.d, m.g)) <= 1e-15);
  CHECK(std::abs(same.second + kSigma) <= 1e-9);

  const NeassState st = neass::neass_state(m.gen2, m.P, m.H, m.d, 0.05);
  const auto moved = response::chern_simons_check(m.P, st.U, m.d, m.g);
  CHECK(std::abs(moved.first + 0.157539428124484) <= 1e-9);
  CHECK(std::abs(moved.second + kSigma) <= 1e-9);
  CHECK(std::abs(std::abs(moved.first - moved.second) - 7.313162444e-5) <= 1e-9);

  CHECK_THROWS_AS(
      response::chern_simons_check(m.P, Matrix(2.0 * Matrix::Identity(144, 144)), m.d, m.g),
      ConfigError);

  // exp(i c J) for the all-ones J is unitary but flat ranged, so the decay
  // screen must reject it.
  const Complex lift = (std::polar(1.0, 0.01 * 144.0) - Complex(1, 0)) / 144.0;
  const Matrix flat =
      Matrix::Identity(144, 144) + lift * Matrix::Constant(144, 144, Complex(1, 0));
  CHECK(unitarity_defect(flat) <= 1e-10);
  CHECK_THROWS_AS(response::chern_simons_check(m.P, flat, m.d, m.g), ConfigError);
}

TEST_CASE("trace identities hold at the kernel level") {
  const Model& m = model();
  std::mt19937 rng(5);
  const OperatorMatrix T1 = lattice::random_mp_operator(m.g, rng);
  const OperatorMatrix T2 = lattice::random_mp_operator(m.g, rng);

  CHECK(response::cyclicity_defect(T1.mat, T2.mat, m.g) <= 1e-13);

  CHECK(response::vanishing_trace_check(m.P, m.H.mat, m.d, 1, m.g) <= 1e-10);
  CHECK(response::vanishing_trace_check(m.P, m.H.mat, m.d, 2, m.g) <= 1e-10);
  // A generic short-ranged draw leaves the finite-size seam tail: complex
  // amplitudes along e1 thread flux through the torus handle, so the value
  // sits well above round-off yet far below any O(1) violation.
  CHECK(response::vanishing_trace_check(m.P, T1.mat, m.d, 1, m.g) <= 5e-3);
  CHECK(response::vanishing_trace_check(m.P, T1.mat, m.d, 2, m.g) <= 5e-3);

  const auto two = response::commutator_trace_two_ways(m.P, m.d, m.g);
  CHECK(std::abs(two.first - two.second) <= 1e-12);
  CHECK(std::abs(two.first.real()) <= 1e-13);
  CHECK(std::abs(two.second.real()) <= 1e-13);
  CHECK(std::abs((Complex(0, 1) * two.second).real() -
                 response::hall_conductivity_marker(m.P, m.d, m.g)) <= 1e-12);
}
