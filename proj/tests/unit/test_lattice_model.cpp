#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qhall/errors.hpp"
#include "qhall/lattice_model.hpp"

using namespace qhall;

namespace {

LatticeGeometry geom12() { return lattice::build_geometry(12, 12, {1, 3}); }

}  // namespace

TEST_CASE("geometry accepts only commensurate tori and reduced flux") {
  const LatticeGeometry g = geom12();
  CHECK(g.sites() == 144);
  CHECK(g.q == 3);
  CHECK(std::abs(g.flux() - 2.0 * kPi / 3.0) <= 1e-15);
  CHECK(g.cell_area == doctest::Approx(3.0));

  CHECK_THROWS_AS(lattice::build_geometry(10, 12, {1, 3}), NonCommensurateTorus);
  CHECK_THROWS_AS(lattice::build_geometry(12, 12, {3, 3}), ConfigError);
  CHECK_THROWS_AS(lattice::build_geometry(12, 12, {2, 4}), ConfigError);
  CHECK_THROWS_AS(lattice::build_geometry(12, 12, {-1, 3}), ConfigError);
  CHECK_THROWS_AS(lattice::build_geometry(0, 12, {1, 3}), ConfigError);
  CHECK_THROWS_AS(lattice::build_geometry(12, 12, {1, 3}, 0.0), ConfigError);
}

TEST_CASE("site indexing wraps both directions") {
  const LatticeGeometry g = geom12();
  CHECK(lattice::site_index(g, 5, 2) == 29);
  CHECK(lattice::site_index(g, -1, 0) == 11);
  CHECK(lattice::site_index(g, 12, 1) == 12);
  CHECK(lattice::site_index(g, 3, -1) == lattice::site_index(g, 3, 11));
}

TEST_CASE("hamiltonian entries follow the stored sign and phase convention") {
  const LatticeGeometry g = geom12();
  const Real phi = g.flux();
  const OperatorMatrix H = lattice::build_hamiltonian(g);
  CHECK(H.hermitian);
  CHECK(H.magnetic_periodic);
  CHECK(hermiticity_defect(H.mat) <= 1e-15);

  auto at = [&](int x1, int x2) { return lattice::site_index(g, x1, x2); };
  // Row index is the hop destination in H(x, x+e_j).
  CHECK(std::abs(H.mat(at(2, 5), at(3, 5)) - Complex(-1, 0)) <= 1e-15);
  CHECK(std::abs(H.mat(at(11, 0), at(0, 0)) - Complex(-1, 0)) <= 1e-15);
  CHECK(std::abs(H.mat(at(2, 5), at(2, 6)) + std::exp(Complex(0, -phi * 2))) <= 1e-15);
  CHECK(std::abs(H.mat(at(4, 11), at(4, 0)) + std::exp(Complex(0, -phi * 4))) <= 1e-15);
  CHECK(std::abs(H.mat(at(0, 0), at(0, 0))) == 0.0);
  CHECK(std::abs(H.mat(at(0, 0), at(2, 0))) == 0.0);

  PotentialConfig pot;
  pot.v = {0.5, -0.2, 0.1};
  pot.a1 = {0.3, 0.0, 0.0};
  pot.a2 = {0.0, 0.25, 0.0};
  const OperatorMatrix Hp = lattice::build_hamiltonian(g, pot);
  CHECK(std::abs(Hp.mat(at(4, 7), at(4, 7)) - Complex(-0.2, 0)) <= 1e-15);
  CHECK(std::abs(Hp.mat(at(0, 2), at(1, 2)) + std::exp(Complex(0, -0.3))) <= 1e-15);
  CHECK(std::abs(Hp.mat(at(1, 2), at(1, 3)) + std::exp(Complex(0, -(phi * 1 + 0.25)))) <= 1e-15);

  PotentialConfig bad;
  bad.v = {0.5, -0.2};
  CHECK_THROWS_AS(lattice::build_hamiltonian(g, bad), ConfigError);
}

TEST_CASE("q-periodic bond phases act as a gauge transformation") {
  // Conjugating by diag(exp(i theta(x1 mod q))) shifts the e1 phases by the
  // discrete gradient of theta and leaves the e2 phases alone, so the two
  // constructions must agree entrywise.
  const LatticeGeometry g = geom12();
  const std::vector<Real> theta = {0.7, -0.4, 0.2};
  const OperatorMatrix H = lattice::build_hamiltonian(g);

  PotentialConfig pot;
  pot.a1 = {theta[1] - theta[0], theta[2] - theta[1], theta[0] - theta[2]};
  const OperatorMatrix Hg = lattice::build_hamiltonian(g, pot);

  Matrix U = Matrix::Zero(g.sites(), g.sites());
  for (int i = 0; i < g.sites(); ++i) {
    U(i, i) = std::exp(Complex(0, theta[static_cast<std::size_t>((i % g.L1) % g.q)]));
  }
  const Matrix conj = U * H.mat * U.adjoint();
  CHECK((conj - Hg.mat).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("magnetic translations commute exactly and compose") {
  const LatticeGeometry g = geom12();
  const OperatorMatrix H = lattice::build_hamiltonian(g);
  const OperatorMatrix T1 = lattice::magnetic_translation(g, 3, 0);
  const OperatorMatrix T2 = lattice::magnetic_translation(g, 0, 1);

  for (const auto* T : {&T1, &T2}) {
    CHECK(unitarity_defect(T->mat) <= 1e-15);
    CHECK(operator_norm(commutator(H.mat, T->mat)) <= 1e-14);
    // Permutation matrix: every entry is 0 or 1.
    CHECK((T->mat.cwiseAbs().array() * (1.0 - T->mat.cwiseAbs().array())).abs().maxCoeff() <=
          1e-15);
  }
  const OperatorMatrix T12 = lattice::magnetic_translation(g, 3, 1);
  CHECK((T1.mat * T2.mat - T12.mat).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(lattice::magnetic_translation(g, 1, 0), ConfigError);
  CHECK_THROWS_AS(lattice::magnetic_translation(g, 2, 1), ConfigError);
}

TEST_CASE("displacement table folds into the symmetric window") {
  const LatticeGeometry g = geom12();
  const DisplacementTable d = lattice::displacement_table(g);
  CHECK(d.L1 == 12);
  CHECK(d.a == 1.0);

  // Antisymmetry is exact because the antipodal tie maps to zero.
  CHECK((d.d1 + d.d1.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d.d2 + d.d2.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.d1.cwiseAbs().maxCoeff() == 5.0);

  const int a0 = lattice::site_index(g, 0, 0);
  const int a5 = lattice::site_index(g, 5, 0);
  const int a6 = lattice::site_index(g, 6, 0);
  const int a7 = lattice::site_index(g, 7, 0);
  CHECK(d.d1(a5, a0) == 5.0);
  CHECK(d.d1(a7, a0) == -5.0);
  CHECK(d.d1(a6, a0) == 0.0);
  CHECK(d.dist(a6, a0) == 6.0);
  CHECK(d.dist(lattice::site_index(g, 3, 4), a0) == doctest::Approx(5.0));

  const LatticeGeometry gh = lattice::build_geometry(12, 12, {1, 3}, 0.5);
  const DisplacementTable dh = lattice::displacement_table(gh);
  CHECK(dh.d1(a5, a0) == doctest::Approx(2.5));
  CHECK(dh.dist(a6, a0) == doctest::Approx(3.0));
}

TEST_CASE("perturbed hamiltonian tilts the centered coordinate branch") {
  const LatticeGeometry g = geom12();
  const OperatorMatrix H = lattice::build_hamiltonian(g);
  const DisplacementTable d = lattice::displacement_table(g);
  const Real eps = 0.07;
  const OperatorMatrix He = lattice::perturbed_hamiltonian(H, eps, d);
  CHECK(He.hermitian);
  CHECK_FALSE(He.magnetic_periodic);

  Matrix expected = H.mat;
  for (int i = 0; i < g.sites(); ++i) {
    expected(i, i) -= eps * (i / g.L1 - g.L2 / 2);
  }
  CHECK((He.mat - expected).cwiseAbs().maxCoeff() == 0.0);

  const OperatorMatrix H0 = lattice::perturbed_hamiltonian(H, 0.0, d);
  CHECK(H0.magnetic_periodic);
  CHECK((H0.mat - H.mat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random test operator is Hermitian, short ranged, translation covariant") {
  const LatticeGeometry g = geom12();
  const DisplacementTable d = lattice::displacement_table(g);
  std::mt19937 rng(42);
  const OperatorMatrix T = lattice::random_mp_operator(g, rng);
  CHECK(T.hermitian);
  CHECK(T.magnetic_periodic);
  CHECK(hermiticity_defect(T.mat) <= 1e-15);
  CHECK(lattice::mp_defect(T.mat, g) <= 1e-13);

  Real beyond = 0.0;
  for (int i = 0; i < g.sites(); ++i)
    for (int j = 0; j < g.sites(); ++j)
      if (d.dist(i, j) > 2.0) beyond = std::max(beyond, std::abs(T.mat(i, j)));
  CHECK(beyond == 0.0);

  std::mt19937 rng2(42);
  const OperatorMatrix T2 = lattice::random_mp_operator(g, rng2);
  CHECK((T.mat - T2.mat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("displacement product is the entrywise commutator kernel") {
  const LatticeGeometry g = geom12();
  const DisplacementTable d = lattice::displacement_table(g);
  std::mt19937 rng(3);
  const OperatorMatrix T = lattice::random_mp_operator(g, rng);

  const Matrix K1 = lattice::displacement_product(d, T.mat, 1);
  const Matrix K2 = lattice::displacement_product(d, T.mat, 2);
  CHECK((K1 - Matrix(d.d1.cast<Complex>().cwiseProduct(T.mat))).cwiseAbs().maxCoeff() == 0.0);
  CHECK((K2 - Matrix(d.d2.cast<Complex>().cwiseProduct(T.mat))).cwiseAbs().maxCoeff() == 0.0);
  // [X_j, T] is anti-Hermitian for Hermitian T.
  CHECK((K1 + Matrix(K1.adjoint())).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(lattice::displacement_product(d, T.mat, 3), ConfigError);
}
