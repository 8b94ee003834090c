#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jnr/spin_chains.hpp"

using namespace jnr;
using Catch::Approx;

TEST_CASE("site operators") {
  SECTION("first site of two") {
    const auto op = site_operator(2, 1, 'z');
    CHECK((op.mat() - kron(paulis::z(), Matrix::Identity(2, 2)))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SECTION("second site of two") {
    const auto op = site_operator(2, 2, 'x');
    CHECK((op.mat() - kron(Matrix::Identity(2, 2), paulis::x()))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SECTION("Pauli involution on a middle site") {
    const auto op = site_operator(3, 2, 'z');
    CHECK((op.mat() * op.mat() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SECTION("bounds checking") {
    CHECK_THROWS_AS(site_operator(3, 0, 'z'), IndexOutOfRange);
    CHECK_THROWS_AS(site_operator(3, 4, 'z'), IndexOutOfRange);
    CHECK_THROWS_AS(site_operator(13, 1, 'z'), DimensionLimit);
    CHECK_THROWS_AS(site_operator(1, 1, 'z'), InvalidArgument);
  }
}

TEST_CASE("ising observables") {
  SECTION("two-site coupling is sigma_z x sigma_z") {
    const ObservableSet set = ising_observables(2);
    CHECK((set.op(0).mat() - kron(paulis::z(), paulis::z()))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SECTION("coupling extreme is exactly 1 for N = 2..8") {
    for (int sites = 2; sites <= 8; ++sites) {
      const ObservableSet set = ising_observables(sites);
      const RealVector vals = eigvals_hermitian(set.op(0));
      CHECK(vals(vals.size() - 1) == 1.0);
    }
  }
  SECTION("magnetization bounds") {
    const ObservableSet set = ising_observables(4);
    const RealVector vals = eigvals_hermitian(set.op(1));
    CHECK(vals(vals.size() - 1) == Approx(1.0).margin(1e-14));
    CHECK(vals(0) == Approx(-1.0).margin(1e-14));
  }
}

TEST_CASE("xx/zz/total-spin observables") {
  SECTION("two-site total spin spectrum {0, 4/3}") {
    const ObservableSet set = xxzz_spin_observables(2);
    const RealVector vals = eigvals_hermitian(set.op(2));
    CHECK(vals(0) == Approx(0.0).margin(1e-13));
    for (int i = 1; i < 4; ++i)
      CHECK(vals(i) == Approx(4.0 / 3.0).margin(1e-13));
  }
  SECTION("xx coupling extreme matches the rotated argument") {
    for (int sites : {2, 3, 4, 5}) {
      const ObservableSet set = xxzz_spin_observables(sites);
      const RealVector vals = eigvals_hermitian(set.op(0));
      CHECK(vals(vals.size() - 1) == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("translation invariance of all chain terms") {
  for (int sites = 2; sites <= 6; ++sites) {
    const Matrix shift = cyclic_shift(sites);
    for (const ObservableSet& set :
         {ising_observables(sites), xxzz_spin_observables(sites)}) {
      for (int i = 0; i < set.k(); ++i) {
        const Matrix& h = set.op(i).mat();
        CHECK((shift * h - h * shift).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }
}

TEST_CASE("two-qubit example sets") {
  const TwoQubitExamples examples = two_qubit_examples();
  SECTION("field term is diag(2, 0, 0, -2)") {
    Eigen::Vector4d expected(2, 0, 0, -2);
    CHECK((examples.bicone.op(1).mat() -
           Matrix(expected.cast<Complex>().asDiagonal()))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SECTION("all operators Hermitian of dim 4") {
    for (const ObservableSet* set :
         {&examples.bicone, &examples.ellipse_segment}) {
      CHECK(set->dim() == 4);
      CHECK(set->k() == 3);
    }
  }
  SECTION("bicone is symmetric about the H2 = 0 plane") {
    // conjugation by sx x sx flips H2 and fixes H1, H3
    const Matrix flip = kron(paulis::x(), paulis::x());
    const auto& set = examples.bicone;
    CHECK((flip * set.op(0).mat() * flip - set.op(0).mat())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((flip * set.op(1).mat() * flip + set.op(1).mat())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((flip * set.op(2).mat() * flip - set.op(2).mat())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
}
