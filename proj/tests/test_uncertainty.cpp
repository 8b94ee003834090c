#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "jnr/random.hpp"
#include "jnr/uncertainty.hpp"

using namespace jnr;
using Catch::Approx;

namespace {

// independent check: minimize the variance sum over seeded random pure
// states; the sampled minimum can only sit above the true bound
double brute_force_variance_sum_min(const HermitianOperator& x,
                                    const HermitianOperator& y, int samples,
                                    std::uint64_t seed) {
  const Matrix xx = x.mat() * x.mat();
  const Matrix yy = y.mat() * y.mat();
  SplitMix64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < samples; ++t) {
    const Vector v = random_unit_vector(x.dim(), rng);
    const double ex = (v.adjoint() * x.mat() * v)(0).real();
    const double ey = (v.adjoint() * y.mat() * v)(0).real();
    const double exx = (v.adjoint() * xx * v)(0).real();
    const double eyy = (v.adjoint() * yy * v)(0).real();
    best = std::min(best, exx - ex * ex + eyy - ey * ey);
  }
  return best;
}

}  // namespace

TEST_CASE("variance map") {
  Eigen::VectorXd moments(2);
  moments << 0.5, 0.5;
  CHECK(variance_map(moments)(0) == Approx(0.25));
  moments << 1.0, 1.0;
  CHECK(variance_map(moments)(0) == Approx(0.0).margin(1e-15));
  moments << -1.0, 1.0;
  CHECK(variance_map(moments)(0) == Approx(0.0).margin(1e-15));
  moments << 0.0, 1.0;
  CHECK(variance_map(moments)(0) == Approx(1.0));
  moments << 0.0, -1e-8;  // slack below zero is clamped
  CHECK(variance_map(moments)(0) == 0.0);
  moments << 1.0, 0.5;  // genuinely invalid moment pair
  CHECK_THROWS_AS(variance_map(moments), InvalidMomentPair);
}

TEST_CASE("uncertainty lifting") {
  const auto [x, y] = fixtures::nontrivial_uncertainty_pair();
  SECTION("k = 2 sum reduces to three operators") {
    const auto problem =
        uncertainty_lifted({x, y}, UncertaintyKind::sum_of_variances);
    CHECK(problem.reduced_3d);
    CHECK(problem.lifted.k() == 3);
    CHECK((problem.lifted.op(2).mat() -
           (x.mat() * x.mat() + y.mat() * y.mat()))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  SECTION("squares are exact") {
    const HermitianOperator sz(paulis::z());
    const auto problem =
        uncertainty_lifted({sz}, UncertaintyKind::sum_of_variances);
    CHECK((problem.lifted.op(1).mat() - Matrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SECTION("product kind keeps the four-operator lift") {
    const auto problem =
        uncertainty_lifted({x, y}, UncertaintyKind::product_of_variances);
    CHECK_FALSE(problem.reduced_3d);
    CHECK(problem.lifted.k() == 4);
  }
}

TEST_CASE("trivial pair: common eigenvector collapses the bound") {
  const auto [x, y] = fixtures::trivial_uncertainty_pair();
  const auto bracket = maccone_pati_bounds(x, y, 500);
  CHECK(bracket.upper <= 1e-9);
  CHECK(bracket.lower <= bracket.upper);
  const auto problem =
      uncertainty_lifted({x, y}, UncertaintyKind::sum_of_variances);
  const auto minimum = min_uncertainty_point(problem, bracket);
  CHECK(minimum.variances(0) == Approx(0.0).margin(1e-9));
  CHECK(minimum.variances(1) == Approx(0.0).margin(1e-9));
  CHECK((minimum.moment_point - Eigen::Vector3d(0, -1, 1)).norm() <= 1e-6);
}

TEST_CASE("nontrivial pair brackets 15/32") {
  const auto [x, y] = fixtures::nontrivial_uncertainty_pair();
  const double target = 15.0 / 32.0;
  const auto bracket = maccone_pati_bounds(x, y, 1082);
  CAPTURE(bracket.lower, bracket.upper);
  CHECK(bracket.lower <= target);
  CHECK(bracket.upper >= target);
  CHECK(bracket.upper - bracket.lower <= 3e-3);
  const auto problem =
      uncertainty_lifted({x, y}, UncertaintyKind::sum_of_variances);
  const auto minimum = min_uncertainty_point(problem, bracket);
  CHECK(minimum.value >= bracket.lower - 1e-12);
  CHECK(minimum.value <= bracket.upper + 1e-12);
}

TEST_CASE("qubit pair has the flat lifted range and bound 1") {
  const HermitianOperator sx(paulis::x());
  const HermitianOperator sz(paulis::z());
  const auto bracket = maccone_pati_bounds(sx, sz, 256);
  CHECK(bracket.lower <= 1.0 + 1e-12);
  CHECK(bracket.upper >= 1.0 - 1e-12);
  CHECK(bracket.upper - bracket.lower <= 2e-3);
  // Bloch-ball oracle: 2 - x^2 - z^2 over the sphere, minimum 1 at y = 0
  const double oracle = brute_force_variance_sum_min(sx, sz, 200000, 5);
  CHECK(oracle >= bracket.lower - 1e-9);
  CHECK(oracle <= bracket.upper + 1e-2);
}

TEST_CASE("bracket against the brute-force state oracle") {
  const auto [x2, y2] = fixtures::nontrivial_uncertainty_pair();
  const auto bracket = maccone_pati_bounds(x2, y2, 700);
  const double oracle = brute_force_variance_sum_min(x2, y2, 1000000, 11);
  CHECK(oracle >= bracket.lower - 1e-9);
  CHECK(oracle <= bracket.upper + 1e-3 * (1.0 + std::abs(bracket.upper)));
}

TEST_CASE("growing the direction family only tightens the bracket") {
  const auto [x, y] = fixtures::nontrivial_uncertainty_pair();
  const auto all_dirs =
      sample_directions(3, 1600, DirectionStrategy::seeded_uniform, 17);
  const std::vector<Direction> half(all_dirs.begin(), all_dirs.begin() + 800);
  const auto coarse = maccone_pati_bounds_with_directions(x, y, half);
  const auto fine = maccone_pati_bounds_with_directions(x, y, all_dirs);
  CHECK(fine.upper <= coarse.upper + 1e-9);
  CHECK(fine.lower >= coarse.lower - 1e-9);
}

TEST_CASE("shift covariance of the bracket") {
  const auto [x, y] = fixtures::nontrivial_uncertainty_pair();
  const HermitianOperator shifted(x.mat() + 3.7 * Matrix::Identity(3, 3));
  const auto base = maccone_pati_bounds(x, y, 400);
  const auto moved = maccone_pati_bounds(shifted, y, 400);
  CHECK(moved.lower == Approx(base.lower).margin(1e-8));
  CHECK(moved.upper == Approx(base.upper).margin(1e-8));
}

TEST_CASE("variance-sum objective is concave in the lifted coordinates") {
  // finite-difference Hessian of z - x^2 - y^2 at random points
  SplitMix64 rng(131);
  const double h = 1e-4;
  auto u = [](const Eigen::Vector3d& p) {
    return p(2) - p(0) * p(0) - p(1) * p(1);
  };
  for (int t = 0; t < 10; ++t) {
    Eigen::Vector3d p(rng.next_gaussian(), rng.next_gaussian(),
                      rng.next_gaussian());
    Eigen::Matrix3d hessian;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d ei = Eigen::Vector3d::Zero();
        Eigen::Vector3d ej = Eigen::Vector3d::Zero();
        ei(i) = h;
        ej(j) = h;
        hessian(i, j) = (u(p + ei + ej) - u(p + ei - ej) - u(p - ei + ej) +
                         u(p - ei - ej)) /
                        (4.0 * h * h);
      }
    const Eigen::Vector3d eigs =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(hessian).eigenvalues();
    CHECK(eigs.maxCoeff() <= 1e-6);
  }
}

TEST_CASE("variance product bracket on a qubit pair") {
  const HermitianOperator sx(paulis::x());
  const HermitianOperator sz(paulis::z());
  const auto bracket = variance_product_bounds(sx, sz, 2000);
  // eigenstates of either observable reach a zero product
  CHECK(bracket.lower <= 1e-12);
  CHECK(bracket.upper >= -1e-12);
  CHECK(bracket.upper <= 0.05);
  const auto problem =
      uncertainty_lifted({sx, sz}, UncertaintyKind::product_of_variances);
  const auto minimum = min_uncertainty_point(problem, bracket);
  CHECK(minimum.value == Approx(bracket.upper).margin(1e-9));
}
