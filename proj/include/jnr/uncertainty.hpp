#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/errors.hpp"
#include "jnr/hermitian.hpp"

namespace jnr {

enum class UncertaintyKind { sum_of_variances, product_of_variances };

/// A variance-based uncertainty relation posed on the lifted range of the
/// observables and their squares. For the sum of two variances the
/// three-operator reduction (X, Y, X^2 + Y^2) replaces the four-dimensional
/// lift, since Var X + Var Y = <X^2 + Y^2> - <X>^2 - <Y>^2.
struct UncertaintyProblem {
  UncertaintyKind kind;
  std::vector<HermitianOperator> observables;
  ObservableSet lifted;
  bool reduced_3d = false;
};

inline UncertaintyProblem uncertainty_lifted(
    std::vector<HermitianOperator> observables, UncertaintyKind kind) {
  if (observables.empty())
    throw InvalidArgument("uncertainty_lifted needs k >= 1 observables");
  const int d = observables.front().dim();
  for (const auto& f : observables)
    if (f.dim() != d) throw DimensionMismatch("observable dims differ");

  if (kind == UncertaintyKind::sum_of_variances && observables.size() == 2) {
    const Matrix sum_sq = observables[0].mat() * observables[0].mat() +
                          observables[1].mat() * observables[1].mat();
    ObservableSet lifted({observables[0], observables[1],
                          HermitianOperator(sum_sq)},
                         {"X", "Y", "X2+Y2"});
    return {kind, std::move(observables), std::move(lifted), true};
  }
  std::vector<HermitianOperator> ops;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    ops.push_back(observables[i]);
    ops.emplace_back(observables[i].mat() * observables[i].mat());
    labels.push_back("F" + std::to_string(i + 1));
    labels.push_back("F" + std::to_string(i + 1) + "^2");
  }
  ObservableSet lifted(std::move(ops), std::move(labels));
  return {kind, std::move(observables), std::move(lifted), false};
}

/// (f_1, f'_1, ..., f_k, f'_k) -> (f'_1 - f_1^2, ...). Rounding slack below
/// zero is clamped; a genuinely negative second moment signals a point
/// outside any valid range.
inline Eigen::VectorXd variance_map(const Eigen::VectorXd& moments) {
  if (moments.size() % 2 != 0)
    throw InvalidArgument("variance_map expects an even-length moment vector");
  const int k = static_cast<int>(moments.size()) / 2;
  Eigen::VectorXd variances(k);
  for (int i = 0; i < k; ++i) {
    const double f = moments(2 * i);
    const double fp = moments(2 * i + 1);
    const double v = fp - f * f;
    if (v < -1e-6)
      throw InvalidMomentPair("second moment " + std::to_string(fp) +
                              " below the square of the first moment " +
                              std::to_string(f * f));
    variances(i) = std::max(v, 0.0);
  }
  return variances;
}

/// Two-sided bound on the minimum of a concave function over the range:
/// sampled boundary points (a subset) bound the minimum from above, outer
/// polytope vertices (a superset) bound it from below.
struct BoundBracket {
  double lower = 0.0;
  double upper = 0.0;
  int num_directions = 0;
  Eigen::VectorXd argmin_point;  // lifted coordinates of the attaining sample
  Direction argmin_direction;    // its generating direction
  enum class Side { inner_vertices, outer_vertices };
  Side argmin_side = Side::inner_vertices;
};

namespace uncertainty_detail {

struct CenteredSumLift {
  ObservableSet lifted;
  double x_mean = 0.0;
  double y_mean = 0.0;
};

/// Trace-centering X and Y leaves every variance unchanged but makes the
/// computed bracket exactly invariant under constant shifts of the input.
inline CenteredSumLift centered_sum_lift(const HermitianOperator& x,
                                         const HermitianOperator& y) {
  const int d = x.dim();
  const double xm = x.mat().trace().real() / d;
  const double ym = y.mat().trace().real() / d;
  const Matrix xc = x.mat() - xm * Matrix::Identity(d, d);
  const Matrix yc = y.mat() - ym * Matrix::Identity(d, d);
  ObservableSet lifted({HermitianOperator(xc), HermitianOperator(yc),
                        HermitianOperator(xc * xc + yc * yc)},
                       {"X", "Y", "X2+Y2"});
  return {std::move(lifted), xm, ym};
}

inline double paraboloid_value(const Eigen::VectorXd& p) {
  return p(2) - p(0) * p(0) - p(1) * p(1);
}

struct PlanarDependence {
  bool planar = false;
  // X^2 + Y^2 = a I + b X + c Y (centered operators)
  double a = 0.0, b = 0.0, c = 0.0;
};

/// Detects an affinely dependent sum of squares, which flattens the lifted
/// range into a plane (always the case for qubit observables).
inline PlanarDependence planar_dependence(const Matrix& xc, const Matrix& yc,
                                          const Matrix& zc) {
  const int d = static_cast<int>(xc.rows());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix* basis[3] = {&id, &xc, &yc};
  Eigen::Matrix3d gram;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      gram(i, j) = (basis[i]->adjoint() * (*basis[j])).trace().real();
    rhs(i) = (basis[i]->adjoint() * zc).trace().real();
  }
  const Eigen::Vector3d coeffs =
      gram.completeOrthogonalDecomposition().solve(rhs);
  const Matrix residual =
      zc - coeffs(0) * id - coeffs(1) * xc - coeffs(2) * yc;
  PlanarDependence out;
  out.planar = residual.cwiseAbs().maxCoeff() <=
               1e-10 * (1.0 + zc.cwiseAbs().maxCoeff());
  out.a = coeffs(0);
  out.b = coeffs(1);
  out.c = coeffs(2);
  return out;
}

}  // namespace uncertainty_detail

namespace uncertainty_detail {

inline BoundBracket bracket_from_boundary(
    const CenteredSumLift& lift, const std::vector<Direction>& directions,
    const std::vector<BoundaryPoint>& points,
    const std::vector<double>& support_values) {
  double upper = std::numeric_limits<double>::infinity();
  const BoundaryPoint* argmin = nullptr;
  for (const auto& bp : points) {
    const double value = paraboloid_value(bp.point);
    if (value < upper) {
      upper = value;
      argmin = &bp;
    }
  }

  std::vector<std::pair<Direction, double>> supports;
  supports.reserve(directions.size());
  for (std::size_t i = 0; i < directions.size(); ++i)
    supports.emplace_back(directions[i], support_values[i]);
  const Polytope outer =
      outer_polytope(supports, maximally_mixed_point(lift.lifted));
  double lower = std::numeric_limits<double>::infinity();
  for (const auto& v : outer.vertices)
    lower = std::min(lower, paraboloid_value(v));

  // report the attaining sample in the original (uncentered) coordinates
  const Eigen::VectorXd& c = argmin->point;
  Eigen::VectorXd original(3);
  original << c(0) + lift.x_mean, c(1) + lift.y_mean,
      c(2) + 2.0 * lift.x_mean * c(0) + 2.0 * lift.y_mean * c(1) +
          lift.x_mean * lift.x_mean + lift.y_mean * lift.y_mean;
  return {std::min(lower, upper),
          upper,
          static_cast<int>(directions.size()),
          original,
          argmin->direction,
          BoundBracket::Side::inner_vertices};
}

/// Fibonacci lattice restricted to the spherical cap of the given angular
/// radius around `center`.
inline std::vector<Direction> cap_directions(const Eigen::Vector3d& center,
                                             double radius, int count) {
  const double golden_angle = std::numbers::pi * (std::sqrt(5.0) - 1.0);
  const double z_min = std::cos(radius);
  // rotation taking e_z onto the cap center
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  const double cos_angle = std::clamp(center.dot(ez), -1.0, 1.0);
  if (cos_angle < 1.0 - 1e-15) {
    Eigen::Vector3d axis = ez.cross(center);
    const double axis_norm = axis.norm();
    if (axis_norm < 1e-12) {
      rot = Eigen::AngleAxisd(std::numbers::pi, Eigen::Vector3d::UnitX())
                .toRotationMatrix();
    } else {
      rot = Eigen::AngleAxisd(std::acos(cos_angle), axis / axis_norm)
                .toRotationMatrix();
    }
  }
  std::vector<Direction> dirs;
  dirs.reserve(count);
  for (int j = 0; j < count; ++j) {
    const double z = 1.0 - (1.0 - z_min) * (2.0 * j + 1.0) / (2.0 * count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * j;
    const Eigen::Vector3d p(r * std::cos(phi), r * std::sin(phi), z);
    dirs.push_back(Direction::normalized(rot * p));
  }
  return dirs;
}

}  // namespace uncertainty_detail

/// Variance-sum bracket over an explicit direction family (directions must
/// be unit 3-vectors for the reduced lift).
inline BoundBracket maccone_pati_bounds_with_directions(
    const HermitianOperator& x, const HermitianOperator& y,
    const std::vector<Direction>& directions,
    double gap_tol = kDefaultGapTol) {
  using namespace uncertainty_detail;
  if (x.dim() != y.dim()) throw DimensionMismatch("maccone_pati_bounds dims");
  if (directions.empty())
    throw InvalidArgument("maccone_pati_bounds needs directions");
  const CenteredSumLift lift = centered_sum_lift(x, y);
  const BoundaryResult boundary =
      boundary_general(lift.lifted, directions, gap_tol);
  return bracket_from_boundary(lift, directions, boundary.points,
                               boundary.support_values);
}

namespace uncertainty_detail {

/// Planar case: the paraboloid gap restricted to the plane
/// z = a + b x + c y is still concave, so the bracket runs on the
/// two-dimensional range L(X, Y) with an angular direction grid.
inline BoundBracket planar_sum_bracket(const CenteredSumLift& lift,
                                       const PlanarDependence& plane,
                                       int num_directions, double gap_tol) {
  const ObservableSet plane_set({lift.lifted.op(0), lift.lifted.op(1)},
                                {"X", "Y"});
  const auto directions =
      sample_directions(2, num_directions, DirectionStrategy::grid2d);
  const BoundaryResult boundary =
      boundary_general(plane_set, directions, gap_tol);

  const auto value_at = [&](const Eigen::VectorXd& p) {
    return plane.a + plane.b * p(0) + plane.c * p(1) - p(0) * p(0) -
           p(1) * p(1);
  };

  double upper = std::numeric_limits<double>::infinity();
  const BoundaryPoint* argmin = nullptr;
  for (const auto& bp : boundary.points) {
    const double value = value_at(bp.point);
    if (value < upper) {
      upper = value;
      argmin = &bp;
    }
  }
  std::vector<std::pair<Direction, double>> supports;
  for (std::size_t i = 0; i < directions.size(); ++i)
    supports.emplace_back(directions[i], boundary.support_values[i]);
  const Polytope outer =
      outer_polytope(supports, maximally_mixed_point(plane_set));
  double lower = std::numeric_limits<double>::infinity();
  for (const auto& v : outer.vertices) lower = std::min(lower, value_at(v));

  Eigen::VectorXd dir3 = Eigen::VectorXd::Zero(3);
  dir3.head(2) = argmin->direction.vec();
  const Eigen::VectorXd& c = argmin->point;
  const double zc = plane.a + plane.b * c(0) + plane.c * c(1);
  Eigen::VectorXd original(3);
  original << c(0) + lift.x_mean, c(1) + lift.y_mean,
      zc + 2.0 * lift.x_mean * c(0) + 2.0 * lift.y_mean * c(1) +
          lift.x_mean * lift.x_mean + lift.y_mean * lift.y_mean;
  return {std::min(lower, upper),
          upper,
          num_directions,
          original,
          Direction(dir3),
          BoundBracket::Side::inner_vertices};
}

}  // namespace uncertainty_detail

/// Bracket for the variance-sum bound c_+(X, Y): builds boundary samples and
/// supporting halfspaces of L(X, Y, X^2+Y^2) and minimizes the concave
/// paraboloid gap z - x^2 - y^2 on both polytope approximations. The
/// direction budget is spent in two deterministic stages: a coarse Fibonacci
/// sweep locates the low-uncertainty boundary regions, then cap lattices
/// concentrate the remaining directions around their supporting normals,
/// which is where polytope slack actually costs bracket width. Both sides
/// stay certified regardless of where the caps land. When the sum of squares
/// is affinely dependent on {1, X, Y} (every qubit pair), the lifted range
/// is flat and the bracket runs on L(X, Y) instead.
inline BoundBracket maccone_pati_bounds(const HermitianOperator& x,
                                        const HermitianOperator& y,
                                        int num_directions = 1082,
                                        double gap_tol = kDefaultGapTol,
                                        std::uint64_t seed = 0) {
  using namespace uncertainty_detail;
  if (num_directions < 50)
    throw InvalidArgument("maccone_pati_bounds needs >= 50 directions");
  (void)seed;  // every direction family used here is deterministic
  const CenteredSumLift lift = centered_sum_lift(x, y);
  const PlanarDependence plane = planar_dependence(
      lift.lifted.op(0).mat(), lift.lifted.op(1).mat(), lift.lifted.op(2).mat());
  if (plane.planar)
    return planar_sum_bracket(lift, plane, num_directions, gap_tol);

  const int coarse_count = num_directions / 2;
  std::vector<Direction> directions =
      sample_directions(3, coarse_count, DirectionStrategy::fibonacci3d);
  const BoundaryResult coarse =
      boundary_general(lift.lifted, directions, gap_tol);

  // one u value per coarse direction (faces may emit several points)
  std::vector<double> coarse_u(coarse_count,
                               std::numeric_limits<double>::infinity());
  for (const auto& bp : coarse.points) {
    coarse_u[bp.direction_index] = std::min(
        coarse_u[bp.direction_index], paraboloid_value(bp.point));
  }
  std::vector<int> order(coarse_count);
  for (int i = 0; i < coarse_count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return coarse_u[a] < coarse_u[b]; });

  // greedy cluster centers among the lowest-u directions
  const double spacing = 2.0 * std::sqrt(4.0 * std::numbers::pi / coarse_count);
  const double cap_radius = 1.5 * spacing;
  const double u_min = coarse_u[order.front()];
  const double u_band =
      u_min + 0.1 * (coarse_u[order[coarse_count / 2]] - u_min) + 1e-12;
  std::vector<Eigen::Vector3d> centers;
  for (int idx : order) {
    if (coarse_u[idx] > u_band || centers.size() >= 4) break;
    const Eigen::Vector3d n = directions[idx].vec();
    bool covered = false;
    for (const auto& c : centers)
      if ((n - c).norm() < cap_radius) covered = true;
    if (!covered) centers.push_back(n);
  }
  if (centers.empty()) centers.push_back(directions[order.front()].vec());

  const int fine_total = num_directions - coarse_count;
  const int per_cap = fine_total / static_cast<int>(centers.size());
  std::vector<BoundaryPoint> points = coarse.points;
  std::vector<double> support_values = coarse.support_values;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    int count = per_cap;
    if (c == 0) count += fine_total - per_cap * static_cast<int>(centers.size());
    if (count <= 0) continue;
    const std::vector<Direction> cap =
        cap_directions(centers[c], cap_radius, count);
    const BoundaryResult fine = boundary_general(lift.lifted, cap, gap_tol);
    const int base = static_cast<int>(directions.size());
    for (const auto& bp : fine.points) {
      BoundaryPoint shifted = bp;
      shifted.direction_index += base;
      points.push_back(std::move(shifted));
    }
    directions.insert(directions.end(), cap.begin(), cap.end());
    support_values.insert(support_values.end(), fine.support_values.begin(),
                          fine.support_values.end());
  }
  return bracket_from_boundary(lift, directions, points, support_values);
}

struct UncertaintyMinimum {
  Eigen::VectorXd variances;     // per-observable variances at the argmin
  double value = 0.0;            // the uncertainty function there
  Eigen::VectorXd moment_point;  // lifted coordinates of the argmin state
};

/// Re-derives the state generating the bracket's argmin sample and evaluates
/// the variances there. The returned point is attainable, so its value
/// witnesses the upper side of the bracket.
inline UncertaintyMinimum min_uncertainty_point(const UncertaintyProblem& problem,
                                                const BoundBracket& bracket) {
  using namespace uncertainty_detail;
  if (problem.kind == UncertaintyKind::sum_of_variances && problem.reduced_3d) {
    const CenteredSumLift lift =
        centered_sum_lift(problem.observables[0], problem.observables[1]);
    const SupportEvaluation eval =
        support_function(lift.lifted, bracket.argmin_direction);
    const Vector state = eval.projector.basis.col(0);
    const HermitianOperator& x = problem.observables[0];
    const HermitianOperator& y = problem.observables[1];
    const double ex = expectation(x, state);
    const double ey = expectation(y, state);
    const double exx = expectation(HermitianOperator(x.mat() * x.mat()), state);
    const double eyy = expectation(HermitianOperator(y.mat() * y.mat()), state);
    UncertaintyMinimum out;
    out.variances = Eigen::Vector2d(exx - ex * ex, eyy - ey * ey).cwiseMax(0.0);
    out.value = out.variances.sum();
    out.moment_point = Eigen::Vector3d(ex, ey, exx + eyy);
    return out;
  }
  // general lift: evaluate all (F_i, F_i^2) moments on the argmin state
  const SupportEvaluation eval =
      support_function(problem.lifted, bracket.argmin_direction);
  const Vector state = eval.projector.basis.col(0);
  const int k = static_cast<int>(problem.observables.size());
  Eigen::VectorXd moments(2 * k);
  for (int i = 0; i < k; ++i) {
    const HermitianOperator& f = problem.observables[i];
    moments(2 * i) = expectation(f, state);
    moments(2 * i + 1) =
        expectation(HermitianOperator(f.mat() * f.mat()), state);
  }
  UncertaintyMinimum out;
  out.variances = variance_map(moments);
  out.value = problem.kind == UncertaintyKind::sum_of_variances
                  ? out.variances.sum()
                  : out.variances.prod();
  out.moment_point = moments;
  return out;
}

/// Bracket for the variance-product bound c_x(X, Y) on the four-operator
/// lift. No vertex enumeration exists in four dimensions, so the upper side
/// minimizes over sampled boundary points directly and the lower side is an
/// interval bound over the axis-aligned support box, which is a certified
/// superset of the lifted range.
inline BoundBracket variance_product_bounds(const HermitianOperator& x,
                                            const HermitianOperator& y,
                                            int num_directions = 2000,
                                            double gap_tol = kDefaultGapTol,
                                            std::uint64_t seed = 0) {
  if (num_directions < 50)
    throw InvalidArgument("variance_product_bounds needs >= 50 directions");
  UncertaintyProblem problem = uncertainty_lifted(
      {x, y}, UncertaintyKind::product_of_variances);
  const auto directions = sample_directions(
      4, num_directions, DirectionStrategy::seeded_uniform, seed);
  const BoundaryResult boundary =
      boundary_general(problem.lifted, directions, gap_tol);

  double upper = std::numeric_limits<double>::infinity();
  const BoundaryPoint* argmin = nullptr;
  for (const auto& bp : boundary.points) {
    const Eigen::VectorXd v = variance_map(bp.point);
    const double value = v(0) * v(1);
    if (value < upper) {
      upper = value;
      argmin = &bp;
    }
  }

  // axis-aligned bounding box from exact support values
  Eigen::VectorXd box_lo(4), box_hi(4);
  for (int i = 0; i < 4; ++i) {
    const RealVector vals = eigvals_hermitian(problem.lifted.op(i));
    box_lo(i) = vals(0);
    box_hi(i) = vals(vals.size() - 1);
  }
  auto variance_interval = [&](int f_idx, int sq_idx) {
    const double abs_lo = std::max(
        0.0, std::max(box_lo(f_idx), -box_hi(f_idx)));  // min |f| over the box
    const double abs_hi = std::max(std::abs(box_lo(f_idx)),
                                   std::abs(box_hi(f_idx)));
    return std::pair<double, double>(box_lo(sq_idx) - abs_hi * abs_hi,
                                     box_hi(sq_idx) - abs_lo * abs_lo);
  };
  const auto [v1_lo, v1_hi] = variance_interval(0, 1);
  const auto [v2_lo, v2_hi] = variance_interval(2, 3);
  const double lower =
      std::min(std::min(v1_lo * v2_lo, v1_lo * v2_hi),
               std::min(v1_hi * v2_lo, v1_hi * v2_hi));

  BoundBracket bracket{std::min(lower, upper),
                       upper,
                       num_directions,
                       argmin->point,
                       argmin->direction,
                       BoundBracket::Side::inner_vertices};
  return bracket;
}

}  // namespace jnr
