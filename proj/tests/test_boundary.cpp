#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/hermitian.hpp"
#include "jnr/random.hpp"

using namespace jnr;
using Catch::Approx;

namespace {

Matrix mat3(std::initializer_list<double> vals) {
  Matrix m(3, 3);
  int i = 0;
  for (double v : vals) {
    m(i / 3, i % 3) = v;
    ++i;
  }
  return m;
}

ObservableSet first_order_pair() {
  return ObservableSet({HermitianOperator(mat3({0, 1, 0, 1, 0, 0, 0, 0, -2})),
                        HermitianOperator(mat3({1, 0, 0, 0, -1, 0, 0, 0, 0}))});
}

ObservableSet flat_face_pair() {
  return ObservableSet({HermitianOperator(mat3({0, 0, 0, 0, 0, 0, 0, 0, 1})),
                        HermitianOperator(mat3({0, 1, 0, 1, 0, 1, 0, 1, 0}))});
}

ObservableSet pauli_triple() {
  return ObservableSet({HermitianOperator(paulis::x()),
                        HermitianOperator(paulis::y()),
                        HermitianOperator(paulis::z())});
}

Direction dir2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return Direction::normalized(v);
}

}  // namespace

TEST_CASE("support function") {
  SECTION("Pauli triple has unit support in every direction") {
    const ObservableSet set = pauli_triple();
    SplitMix64 rng(31);
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd n(3);
      for (int i = 0; i < 3; ++i) n(i) = rng.next_gaussian();
      const auto eval = support_function(set, Direction::normalized(n));
      CHECK(eval.value == Approx(1.0).margin(1e-12));
    }
  }
  SECTION("block example supports") {
    const ObservableSet set = first_order_pair();
    CHECK(support_function(set, dir2(1, 0)).value == Approx(1.0).margin(1e-12));
    CHECK(support_function(set, dir2(-1, 0)).value == Approx(2.0).margin(1e-12));
  }
  SECTION("scale equivariance") {
    SplitMix64 rng(37);
    const HermitianOperator a(random_hermitian_matrix(4, rng));
    const HermitianOperator b(random_hermitian_matrix(4, rng));
    const Direction n = dir2(0.6, -0.8);
    const double base =
        support_function(ObservableSet({a, b}), n).value;
    const double scaled = support_function(
        ObservableSet({a.scaled(2.5), b.scaled(2.5)}), n).value;
    CHECK(scaled == Approx(2.5 * base).epsilon(1e-12));
  }
}

TEST_CASE("2-operator sweep") {
  SECTION("flat-face pair emits the exact segment at theta = pi") {
    const ObservableSet set = flat_face_pair();
    const auto points = boundary_sweep_2d(set.op(0), set.op(1), 8);
    // theta = pi is grid index 4; the top eigenspace of -H0 is two-fold
    std::vector<Eigen::VectorXd> face;
    for (const auto& bp : points) {
      if (bp.direction_index == 4) face.push_back(bp.point);
    }
    REQUIRE(face.size() == 2);
    CHECK(face[0](0) == Approx(0.0).margin(1e-12));
    CHECK(face[1](0) == Approx(0.0).margin(1e-12));
    const double lo = std::min(face[0](1), face[1](1));
    const double hi = std::max(face[0](1), face[1](1));
    CHECK(lo == Approx(-1.0).margin(1e-12));
    CHECK(hi == Approx(1.0).margin(1e-12));
  }
  SECTION("qubit pair traces the unit circle") {
    const auto points = boundary_sweep_2d(HermitianOperator(paulis::x()),
                                          HermitianOperator(paulis::z()), 181);
    CHECK(points.size() == 181);
    for (const auto& bp : points) CHECK(bp.point.norm() == Approx(1.0).margin(1e-9));
  }
  SECTION("commuting pair stays on the joint-eigenvalue segment") {
    Matrix a(2, 2), b(2, 2);
    a << 0, 0, 0, 1;
    b << 1, 0, 0, 0;
    const auto points =
        boundary_sweep_2d(HermitianOperator(a), HermitianOperator(b), 64);
    for (const auto& bp : points) {
      CHECK(bp.point(0) + bp.point(1) == Approx(1.0).margin(1e-9));
      CHECK(bp.point(0) >= -1e-9);
      CHECK(bp.point(1) >= -1e-9);
    }
  }
  SECTION("support consistency") {
    const ObservableSet set = first_order_pair();
    const auto points = boundary_sweep_2d(set.op(0), set.op(1), 97);
    for (const auto& bp : points) {
      CHECK(bp.direction.vec().dot(bp.point) ==
            Approx(bp.support_value).margin(1e-9 * (1 + std::abs(bp.support_value))));
    }
  }
}

TEST_CASE("general boundary") {
  SECTION("Pauli triple on 200 Fibonacci directions") {
    const auto dirs =
        sample_directions(3, 200, DirectionStrategy::fibonacci3d);
    const auto result = boundary_general(pauli_triple(), dirs);
    CHECK(result.points.size() == 200);
    CHECK(result.budget_exceeded.empty());
    for (const auto& bp : result.points)
      CHECK(bp.point.norm() == Approx(1.0).margin(1e-9));
  }
  SECTION("commuting triple lands on the probability simplex") {
    const ObservableSet set(
        {HermitianOperator(mat3({1, 0, 0, 0, 0, 0, 0, 0, 0})),
         HermitianOperator(mat3({0, 0, 0, 0, 1, 0, 0, 0, 0})),
         HermitianOperator(mat3({0, 0, 0, 0, 0, 0, 0, 0, 1}))});
    const auto dirs = sample_directions(3, 150, DirectionStrategy::fibonacci3d);
    const auto result = boundary_general(set, dirs);
    for (const auto& bp : result.points) {
      CHECK(bp.point.sum() == Approx(1.0).margin(1e-9));
      for (int i = 0; i < 3; ++i) CHECK(bp.point(i) >= -1e-9);
    }
  }
  SECTION("k = 2 general path matches the sweep") {
    const ObservableSet set = flat_face_pair();
    const int num = 32;
    const auto sweep = boundary_sweep_2d(set.op(0), set.op(1), num);
    const auto dirs = sample_directions(2, num, DirectionStrategy::grid2d);
    const auto general = boundary_general(set, dirs);
    for (const auto& bp : sweep) {
      if (bp.multiplicity > 1) continue;  // compared via face extremes below
      bool matched = false;
      for (const auto& gp : general.points) {
        if (gp.direction_index == bp.direction_index &&
            (gp.point - bp.point).norm() <= 1e-9)
          matched = true;
      }
      CHECK(matched);
    }
    // the degenerate direction: sweep endpoints must bracket the general
    // points and the extremes must agree
    double sweep_lo = 1e300, sweep_hi = -1e300;
    double gen_lo = 1e300, gen_hi = -1e300;
    for (const auto& bp : sweep) {
      if (bp.multiplicity == 1) continue;
      sweep_lo = std::min(sweep_lo, bp.point(1));
      sweep_hi = std::max(sweep_hi, bp.point(1));
    }
    for (const auto& gp : general.points) {
      if (gp.multiplicity == 1) continue;
      gen_lo = std::min(gen_lo, gp.point(1));
      gen_hi = std::max(gen_hi, gp.point(1));
    }
    CHECK(gen_lo == Approx(sweep_lo).margin(1e-9));
    CHECK(gen_hi == Approx(sweep_hi).margin(1e-9));
  }
  SECTION("translation equivariance") {
    SplitMix64 rng(41);
    const Matrix a = random_hermitian_matrix(4, rng);
    const Matrix b = random_hermitian_matrix(4, rng);
    const ObservableSet base({HermitianOperator(a), HermitianOperator(b)});
    const ObservableSet shifted(
        {HermitianOperator(a + 0.7 * Matrix::Identity(4, 4)),
         HermitianOperator(b - 1.3 * Matrix::Identity(4, 4))});
    const auto dirs = sample_directions(2, 48, DirectionStrategy::grid2d);
    const auto r0 = boundary_general(base, dirs);
    const auto r1 = boundary_general(shifted, dirs);
    REQUIRE(r0.points.size() == r1.points.size());
    Eigen::VectorXd shift(2);
    shift << 0.7, -1.3;
    for (std::size_t i = 0; i < r0.points.size(); ++i) {
      CHECK((r1.points[i].point - r0.points[i].point - shift).norm() <=
            1e-9);
    }
  }
}

TEST_CASE("direction sampling") {
  SECTION("grid2d hits the four axes") {
    const auto dirs = sample_directions(2, 4, DirectionStrategy::grid2d);
    REQUIRE(dirs.size() == 4);
    CHECK((dirs[0].vec() - Eigen::Vector2d(1, 0)).norm() < 1e-15);
    CHECK((dirs[1].vec() - Eigen::Vector2d(0, 1)).norm() < 1e-15);
    CHECK((dirs[2].vec() - Eigen::Vector2d(-1, 0)).norm() < 1e-12);
    CHECK((dirs[3].vec() - Eigen::Vector2d(0, -1)).norm() < 1e-12);
  }
  SECTION("fibonacci3d gives distinct unit vectors") {
    const auto dirs = sample_directions(3, 100, DirectionStrategy::fibonacci3d);
    REQUIRE(dirs.size() == 100);
    for (const auto& d : dirs) CHECK(d.vec().norm() == Approx(1.0).margin(1e-12));
    for (std::size_t i = 0; i < dirs.size(); ++i)
      for (std::size_t j = i + 1; j < dirs.size(); ++j)
        CHECK((dirs[i].vec() - dirs[j].vec()).norm() > 1e-6);
  }
  SECTION("seeded_uniform is deterministic") {
    const auto a = sample_directions(5, 50, DirectionStrategy::seeded_uniform, 7);
    const auto b = sample_directions(5, 50, DirectionStrategy::seeded_uniform, 7);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK((a[i].vec() - b[i].vec()).norm() == 0.0);
  }
  SECTION("strategy/dimension mismatch") {
    CHECK_THROWS_AS(sample_directions(3, 10, DirectionStrategy::grid2d),
                    StrategyDimensionMismatch);
    CHECK_THROWS_AS(sample_directions(2, 10, DirectionStrategy::fibonacci3d),
                    StrategyDimensionMismatch);
  }
}

TEST_CASE("inner polytope") {
  SECTION("diamond from axis points") {
    std::vector<Eigen::VectorXd> pts;
    for (auto [x, y] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}) {
      Eigen::VectorXd p(2);
      p << x, y;
      pts.push_back(p);
    }
    const Polytope poly = inner_polytope(pts);
    CHECK_FALSE(poly.degenerate);
    CHECK(poly.vertices.size() == 4);
    CHECK(poly.facets.size() == 4);
    for (const auto& v : pts) CHECK(poly.contains(v, 1e-9));
  }
  SECTION("sphere samples keep unit norm vertices") {
    const auto dirs = sample_directions(3, 200, DirectionStrategy::fibonacci3d);
    const auto result = boundary_general(pauli_triple(), dirs);
    std::vector<Eigen::VectorXd> pts;
    for (const auto& bp : result.points) pts.push_back(bp.point);
    const Polytope poly = inner_polytope(pts);
    CHECK_FALSE(poly.degenerate);
    for (const auto& v : poly.vertices) CHECK(v.norm() == Approx(1.0).margin(1e-9));
  }
  SECTION("degenerate flat input flagged") {
    std::vector<Eigen::VectorXd> pts;
    for (double t : {0.0, 0.5, 1.0}) {
      Eigen::VectorXd p(2);
      p << t, 2 * t;
      pts.push_back(p);
    }
    const Polytope poly = inner_polytope(pts);
    CHECK(poly.degenerate);
    CHECK(poly.vertices.size() == 2);
  }
}

TEST_CASE("outer polytope") {
  SECTION("unit disk boxed by four axis supports") {
    std::vector<std::pair<Direction, double>> supports;
    for (const auto& d : sample_directions(2, 4, DirectionStrategy::grid2d))
      supports.emplace_back(d, 1.0);
    const Polytope poly = outer_polytope(supports, Eigen::VectorXd::Zero(2));
    REQUIRE(poly.vertices.size() == 4);
    for (const auto& v : poly.vertices) {
      CHECK(std::abs(v(0)) == Approx(1.0).margin(1e-9));
      CHECK(std::abs(v(1)) == Approx(1.0).margin(1e-9));
    }
  }
  SECTION("unit sphere boxed by six axis supports") {
    std::vector<std::pair<Direction, double>> supports;
    for (int axis = 0; axis < 3; ++axis)
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd n = Eigen::VectorXd::Zero(3);
        n(axis) = sign;
        supports.emplace_back(Direction(n), 1.0);
      }
    const Polytope poly = outer_polytope(supports, Eigen::VectorXd::Zero(3));
    CHECK(poly.vertices.size() == 8);
    for (const auto& v : poly.vertices)
      for (int i = 0; i < 3; ++i) CHECK(std::abs(v(i)) == Approx(1.0).margin(1e-9));
  }
  SECTION("64-gon around the qubit disk") {
    const ObservableSet set({HermitianOperator(paulis::x()),
                             HermitianOperator(paulis::z())});
    const auto dirs = sample_directions(2, 64, DirectionStrategy::grid2d);
    const auto result = boundary_general(set, dirs);
    std::vector<std::pair<Direction, double>> supports;
    for (int i = 0; i < 64; ++i)
      supports.emplace_back(dirs[i], result.support_values[i]);
    const Polytope poly = outer_polytope(supports, maximally_mixed_point(set));
    CHECK(poly.vertices.size() == 64);
    const double circum = 1.0 / std::cos(std::numbers::pi / 64.0);
    for (const auto& v : poly.vertices) {
      CHECK(v.norm() >= 1.0 - 1e-9);
      CHECK(v.norm() <= circum + 1e-9);
    }
  }
  SECTION("half-space coverage failures are reported") {
    std::vector<std::pair<Direction, double>> supports;
    supports.emplace_back(dir2(1, 0), 1.0);
    supports.emplace_back(dir2(0, 1), 1.0);
    CHECK_THROWS_AS(outer_polytope(supports, Eigen::VectorXd::Zero(2)),
                    UnboundedIntersection);
    supports.emplace_back(dir2(-1, 0), 1.0);
    supports.emplace_back(dir2(0, -1), -2.0);
    CHECK_THROWS_AS(outer_polytope(supports, Eigen::VectorXd::Zero(2)),
                    InteriorPointInvalid);
  }
}

TEST_CASE("membership and nesting of the two approximations") {
  SplitMix64 rng(53);
  const int d = 4;
  std::vector<HermitianOperator> ops;
  for (int i = 0; i < 3; ++i)
    ops.emplace_back(random_hermitian_matrix(d, rng));
  const ObservableSet set(ops);
  const auto dirs = sample_directions(3, 300, DirectionStrategy::fibonacci3d);
  const auto result = boundary_general(set, dirs);

  std::vector<std::pair<Direction, double>> supports;
  for (int i = 0; i < static_cast<int>(dirs.size()); ++i)
    supports.emplace_back(dirs[i], result.support_values[i]);
  const Polytope outer = outer_polytope(supports, maximally_mixed_point(set));

  SECTION("random states satisfy every outer facet") {
    for (int t = 0; t < 100; ++t) {
      const DensityMatrix rho =
          DensityMatrix::unchecked(random_density_entries(d, rng));
      CHECK(outer.max_violation(set.expectation_point(rho)) <= 1e-9);
    }
  }
  SECTION("inner vertices satisfy every outer facet") {
    std::vector<Eigen::VectorXd> pts;
    for (const auto& bp : result.points) pts.push_back(bp.point);
    const Polytope inner = inner_polytope(pts);
    REQUIRE_FALSE(inner.degenerate);
    for (const auto& v : inner.vertices)
      CHECK(outer.max_violation(v) <= 1e-9);
  }
  SECTION("support consistency on emitted points") {
    for (const auto& bp : result.points) {
      CHECK(bp.direction.vec().dot(bp.point) ==
            Approx(bp.support_value)
                .margin(1e-9 * (1 + std::abs(bp.support_value))));
    }
  }
}
