#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jnr/errors.hpp"
#include "jnr/hermitian.hpp"
#include "jnr/hull.hpp"
#include "jnr/parallel.hpp"
#include "jnr/random.hpp"

namespace jnr {

/// Ordered collection of k same-dimension Hermitian operators; the tuple
/// (F_1, ..., F_k) whose attainable expectation vectors form the joint
/// numerical range.
class ObservableSet {
 public:
  explicit ObservableSet(std::vector<HermitianOperator> ops,
                         std::vector<std::string> labels = {})
      : ops_(std::move(ops)), labels_(std::move(labels)) {
    if (ops_.empty()) throw InvalidArgument("ObservableSet requires k >= 1");
    for (const auto& op : ops_) {
      if (op.dim() != ops_.front().dim())
        throw DimensionMismatch("ObservableSet operators must share one dim");
    }
    if (labels_.empty()) {
      for (std::size_t i = 0; i < ops_.size(); ++i)
        labels_.push_back("F" + std::to_string(i + 1));
    }
    if (labels_.size() != ops_.size())
      throw InvalidArgument("ObservableSet labels must match operator count");
  }

  int k() const { return static_cast<int>(ops_.size()); }
  int dim() const { return ops_.front().dim(); }
  const HermitianOperator& op(int i) const { return ops_.at(i); }
  const std::vector<HermitianOperator>& ops() const { return ops_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// sum_i c_i F_i
  HermitianOperator combine(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != k())
      throw DimensionMismatch("coefficient count must equal k");
    Matrix acc = Matrix::Zero(dim(), dim());
    for (int i = 0; i < k(); ++i) acc += coeffs(i) * ops_[i].mat();
    return HermitianOperator(std::move(acc));
  }

  Eigen::VectorXd expectation_point(const DensityMatrix& rho) const {
    Eigen::VectorXd p(k());
    for (int i = 0; i < k(); ++i) p(i) = expectation(ops_[i], rho);
    return p;
  }

  Eigen::VectorXd expectation_point(const Vector& psi) const {
    Eigen::VectorXd p(k());
    for (int i = 0; i < k(); ++i) p(i) = expectation(ops_[i], psi);
    return p;
  }

  /// Restriction of every operator to span(basis).
  ObservableSet compressed(const Matrix& basis) const {
    std::vector<HermitianOperator> cs;
    cs.reserve(ops_.size());
    for (const auto& op : ops_) cs.push_back(compress(op, basis));
    return ObservableSet(std::move(cs), labels_);
  }

 private:
  std::vector<HermitianOperator> ops_;
  std::vector<std::string> labels_;
};

/// Unit vector in R^k selecting a supporting hyperplane.
class Direction {
 public:
  explicit Direction(Eigen::VectorXd n) : n_(std::move(n)) {
    if (n_.size() < 1) throw InvalidArgument("direction must have k >= 1");
    if (std::abs(n_.norm() - 1.0) > 1e-12)
      throw InvalidArgument("direction must be a unit vector");
  }

  static Direction normalized(Eigen::VectorXd v) {
    const double norm = v.norm();
    if (norm <= 0.0)
      throw InvalidArgument("cannot normalize a zero direction");
    return Direction(v / norm);
  }

  const Eigen::VectorXd& vec() const { return n_; }
  int k() const { return static_cast<int>(n_.size()); }

 private:
  Eigen::VectorXd n_;
};

struct BoundaryPoint {
  Eigen::VectorXd point;     // expectation vector
  Direction direction;       // generating top-level direction
  double support_value;      // lambda_max(n . F) at the top level
  int multiplicity = 1;      // top eigenspace dimension for that direction
  int depth = 0;             // 0 = direct image, >0 = degenerate-face recursion
  int direction_index = -1;  // position in the generating direction list
};

struct SupportEvaluation {
  double value = 0.0;
  EigenspaceProjector projector;
};

/// h(n) = lambda_max(sum n_i F_i) together with the top eigenspace.
inline SupportEvaluation support_function(const ObservableSet& set,
                                          const Direction& n,
                                          double gap_tol = kDefaultGapTol) {
  if (n.k() != set.k())
    throw DimensionMismatch("direction dimension must equal k");
  const HermitianOperator h = set.combine(n.vec());
  SupportEvaluation eval;
  eval.projector = lambda_max_projector(h, gap_tol);
  eval.value = eval.projector.eigenvalue;
  return eval;
}

enum class DirectionStrategy { grid2d, fibonacci3d, seeded_uniform };

/// Deterministic direction families on S^{k-1}.
inline std::vector<Direction> sample_directions(
    int k, int count, DirectionStrategy strategy, std::uint64_t seed = 0) {
  if (count < 1) throw InvalidArgument("direction count must be >= 1");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  std::vector<Direction> dirs;
  dirs.reserve(count);
  switch (strategy) {
    case DirectionStrategy::grid2d: {
      if (k != 2)
        throw StrategyDimensionMismatch("grid2d requires k = 2, got k = " +
                                        std::to_string(k));
      for (int j = 0; j < count; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / count;
        Eigen::VectorXd n(2);
        n << std::cos(theta), std::sin(theta);
        dirs.push_back(Direction::normalized(n));
      }
      break;
    }
    case DirectionStrategy::fibonacci3d: {
      if (k != 3)
        throw StrategyDimensionMismatch("fibonacci3d requires k = 3, got k = " +
                                        std::to_string(k));
      const double golden_angle = std::numbers::pi * (std::sqrt(5.0) - 1.0);
      for (int j = 0; j < count; ++j) {
        const double z = count == 1 ? 0.0 : -1.0 + (2.0 * j + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * j;
        Eigen::VectorXd n(3);
        n << r * std::cos(phi), r * std::sin(phi), z;
        dirs.push_back(Direction::normalized(n));
      }
      break;
    }
    case DirectionStrategy::seeded_uniform: {
      SplitMix64 rng(derive_seed(seed, "sample_directions", 0));
      while (static_cast<int>(dirs.size()) < count) {
        Eigen::VectorXd n(k);
        for (int i = 0; i < k; ++i) n(i) = rng.next_gaussian();
        const double norm = n.norm();
        if (norm < 1e-8) continue;
        dirs.push_back(Direction::normalized(n));
      }
      break;
    }
  }
  return dirs;
}

/// Default strategy per dimension: angular grid for curves, Fibonacci
/// lattice for surfaces, seeded Gaussians above.
inline std::vector<Direction> default_directions(int k, int count,
                                                 std::uint64_t seed = 0) {
  if (k == 1) {
    std::vector<Direction> dirs;
    Eigen::VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    dirs.push_back(Direction(plus));
    if (count > 1) dirs.push_back(Direction(minus));
    return dirs;
  }
  if (k == 2) return sample_directions(2, count, DirectionStrategy::grid2d);
  if (k == 3) return sample_directions(3, count, DirectionStrategy::fibonacci3d);
  return sample_directions(k, count, DirectionStrategy::seeded_uniform, seed);
}

/// Boundary of L(X, Y) by sweeping the supporting angle. For a degenerate top
/// eigenspace the exposed face is a segment; its endpoints are the extreme
/// eigenvalues of the second (tangential) operator compressed to the
/// eigenspace, which is exact and needs no sub-sampling.
inline std::vector<BoundaryPoint> boundary_sweep_2d(
    const HermitianOperator& x, const HermitianOperator& y, int num_angles,
    double gap_tol = kDefaultGapTol) {
  if (x.dim() != y.dim()) throw DimensionMismatch("boundary_sweep_2d dims");
  if (num_angles < 3) throw InvalidArgument("num_angles must be >= 3");
  std::vector<BoundaryPoint> points;
  points.reserve(num_angles);
  for (int j = 0; j < num_angles; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / num_angles;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::VectorXd nvec(2);
    nvec << c, s;
    const Direction n(nvec);
    const HermitianOperator h(c * x.mat() + s * y.mat());
    const EigenspaceProjector proj = lambda_max_projector(h, gap_tol);
    if (proj.multiplicity == 1) {
      const Vector state = proj.basis.col(0);
      Eigen::VectorXd p(2);
      p << expectation(x, state), expectation(y, state);
      points.push_back({p, n, proj.eigenvalue, 1, 0, j});
    } else {
      // tangential operator on the face
      const HermitianOperator t(-s * x.mat() + c * y.mat());
      const HermitianOperator ct = compress(t, proj.basis);
      const RealVector tvals = eigvals_hermitian(ct);
      Eigen::VectorXd tangent(2);
      tangent << -s, c;
      for (const double extreme : {tvals(0), tvals(tvals.size() - 1)}) {
        const Eigen::VectorXd p = proj.eigenvalue * nvec + extreme * tangent;
        points.push_back({p, n, proj.eigenvalue, proj.multiplicity, 0, j});
      }
    }
  }
  return points;
}

struct BoundaryResult {
  std::vector<BoundaryPoint> points;     // ordered by direction index
  std::vector<double> support_values;    // one per input direction
  std::vector<int> budget_exceeded;      // direction indices that ran out of
                                         // recursion depth on a degenerate face
};

namespace boundary_detail {

/// Boundary points of L(set) in expectation coordinates. Points of a
/// compressed face problem are already points of the parent range, so
/// recursion lifts back by identity.
inline void gather_boundary(const ObservableSet& set,
                            const std::vector<Direction>& dirs, double gap_tol,
                            int depth_budget, int depth,
                            std::vector<std::pair<Eigen::VectorXd, int>>& out,
                            bool& exhausted) {
  const int k = set.k();
  for (const Direction& n : dirs) {
    const SupportEvaluation eval = support_function(set, n, gap_tol);
    const EigenspaceProjector& proj = eval.projector;
    if (proj.multiplicity == 1) {
      out.emplace_back(set.expectation_point(Vector(proj.basis.col(0))), depth);
      continue;
    }
    if (proj.multiplicity >= set.dim()) {
      // n . F is a multiple of the identity: the whole sub-range lies in
      // this supporting hyperplane and the sibling directions trace it, so
      // only the centroid is recorded
      const DensityMatrix mixed = DensityMatrix::unchecked(proj.projector);
      out.emplace_back(set.expectation_point(mixed), depth);
      continue;
    }
    if (depth_budget <= 0) {
      // face centroid (the normalized projector is a valid state on the
      // face), with the unexplored degeneracy reported
      const DensityMatrix mixed = DensityMatrix::unchecked(proj.projector);
      out.emplace_back(set.expectation_point(mixed), depth);
      exhausted = true;
      continue;
    }
    const ObservableSet face_set = set.compressed(proj.basis);
    const int sub_count =
        std::max(k + 1, static_cast<int>(dirs.size()) / 4);
    const std::vector<Direction> sub_dirs = default_directions(k, sub_count);
    gather_boundary(face_set, sub_dirs, gap_tol, depth_budget - 1, depth + 1,
                    out, exhausted);
  }
}

}  // namespace boundary_detail

/// Boundary generation for arbitrary k: one support evaluation per direction,
/// recursing into compressed operators on degenerate faces. Directions are
/// independent, so they may be evaluated on several threads; the output
/// order is by direction index either way.
inline BoundaryResult boundary_general(const ObservableSet& set,
                                       const std::vector<Direction>& directions,
                                       double gap_tol = kDefaultGapTol,
                                       int max_depth = 2, int threads = 1) {
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  struct Slot {
    std::vector<std::pair<Eigen::VectorXd, int>> face_points;
    double support = 0.0;
    int multiplicity = 1;
    bool exhausted = false;
  };
  const int n_dirs = static_cast<int>(directions.size());
  std::vector<Slot> slots(n_dirs);

  parallel_for(n_dirs, threads, [&](int di) {
    const Direction& n = directions[di];
    const SupportEvaluation eval = support_function(set, n, gap_tol);
    const EigenspaceProjector& proj = eval.projector;
    Slot& slot = slots[di];
    slot.support = eval.value;
    slot.multiplicity = proj.multiplicity;
    if (proj.multiplicity == 1) {
      slot.face_points.emplace_back(
          set.expectation_point(Vector(proj.basis.col(0))), 0);
      return;
    }
    if (proj.multiplicity >= set.dim()) {
      const DensityMatrix mixed = DensityMatrix::unchecked(proj.projector);
      slot.face_points.emplace_back(set.expectation_point(mixed), 0);
      return;
    }
    const ObservableSet face_set = set.compressed(proj.basis);
    const int sub_count = std::max(set.k() + 1, n_dirs / 4);
    const std::vector<Direction> sub_dirs =
        default_directions(set.k(), sub_count);
    boundary_detail::gather_boundary(face_set, sub_dirs, gap_tol,
                                     max_depth - 1, 1, slot.face_points,
                                     slot.exhausted);
  });

  BoundaryResult result;
  result.support_values.resize(n_dirs);
  for (int di = 0; di < n_dirs; ++di) {
    Slot& slot = slots[di];
    result.support_values[di] = slot.support;
    if (slot.exhausted) result.budget_exceeded.push_back(di);
    for (auto& [p, depth] : slot.face_points) {
      result.points.push_back({std::move(p), directions[di], slot.support,
                               slot.multiplicity, depth, di});
    }
  }
  return result;
}

struct PolytopeFacet {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

/// Vertex plus facet description of a convex polytope in R^k.
struct Polytope {
  std::vector<Eigen::VectorXd> vertices;
  std::vector<PolytopeFacet> facets;
  bool degenerate = false;  // affine dimension below k

  bool contains(const Eigen::VectorXd& p, double tol = 1e-9) const {
    for (const auto& f : facets) {
      if (f.normal.dot(p) > f.offset + tol) return false;
    }
    return true;
  }

  double max_violation(const Eigen::VectorXd& p) const {
    double worst = 0.0;
    for (const auto& f : facets)
      worst = std::max(worst, f.normal.dot(p) - f.offset);
    return worst;
  }
};

/// Convex hull of sampled boundary points: an inner (subset) approximation of
/// the range. Vertex enumeration covers k <= 3; higher k works directly on
/// the sample set instead of a hull.
inline Polytope inner_polytope(const std::vector<Eigen::VectorXd>& points,
                               double merge_eps = 1e-9) {
  if (points.empty()) throw InvalidArgument("inner_polytope: no points");
  const int k = static_cast<int>(points.front().size());
  Polytope poly;
  if (k == 1) {
    double lo = points.front()(0), hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    Eigen::VectorXd vlo(1), vhi(1), nplus(1), nminus(1);
    vlo << lo;
    vhi << hi;
    nplus << 1.0;
    nminus << -1.0;
    poly.degenerate = (hi - lo) <= merge_eps * (1.0 + std::abs(hi));
    poly.vertices = poly.degenerate ? std::vector<Eigen::VectorXd>{vlo}
                                    : std::vector<Eigen::VectorXd>{vlo, vhi};
    poly.facets = {{nplus, hi}, {nminus, -lo}};
    return poly;
  }
  if (k == 2) {
    std::vector<Eigen::Vector2d> pts(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) pts[i] = points[i];
    const std::vector<int> hull = convex_hull_2d(pts, merge_eps);
    if (hull.size() <= 2) {
      poly.degenerate = true;
      for (int idx : hull) poly.vertices.push_back(points[idx]);
      return poly;
    }
    for (int idx : hull) poly.vertices.push_back(points[idx]);
    const int m = static_cast<int>(hull.size());
    for (int i = 0; i < m; ++i) {
      const Eigen::Vector2d a = pts[hull[i]];
      const Eigen::Vector2d b = pts[hull[(i + 1) % m]];
      Eigen::Vector2d edge = b - a;
      Eigen::VectorXd normal(2);
      normal << edge.y(), -edge.x();  // outward for CCW order
      normal.normalize();
      poly.facets.push_back({normal, normal.dot(a)});
    }
    return poly;
  }
  if (k == 3) {
    std::vector<Eigen::Vector3d> pts(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) pts[i] = points[i];
    const Hull3D hull = convex_hull_3d(pts, merge_eps);
    if (hull.dim != Hull3D::Dim::full) {
      poly.degenerate = true;
      std::vector<int> support = hull.support_indices;
      std::sort(support.begin(), support.end());
      for (int idx : support) poly.vertices.push_back(points[idx]);
      return poly;
    }
    std::vector<int> vertex_ids;
    for (const auto& f : hull.faces) {
      for (int v : f) vertex_ids.push_back(v);
      const Eigen::Vector3d a = pts[f[0]];
      Eigen::Vector3d n = (pts[f[1]] - a).cross(pts[f[2]] - a);
      n.normalize();
      Eigen::VectorXd normal(3);
      normal << n.x(), n.y(), n.z();
      poly.facets.push_back({normal, n.dot(a)});
    }
    std::sort(vertex_ids.begin(), vertex_ids.end());
    vertex_ids.erase(std::unique(vertex_ids.begin(), vertex_ids.end()),
                     vertex_ids.end());
    for (int idx : vertex_ids) poly.vertices.push_back(points[idx]);
    return poly;
  }
  throw InvalidArgument(
      "inner_polytope vertex enumeration supports k <= 3; minimize over the "
      "sampled points directly for higher k");
}

/// Intersection of supporting halfspaces { x : n_i . x <= h_i }: an outer
/// (superset) approximation. Vertices are enumerated by polar duality about
/// a strictly interior point: facets of hull{ n_i / (h_i - n_i . c) } map to
/// vertices c + m / o.
inline Polytope outer_polytope(
    const std::vector<std::pair<Direction, double>>& supports,
    const Eigen::VectorXd& interior_point, double merge_eps = 1e-9) {
  if (supports.empty()) throw InvalidArgument("outer_polytope: no halfspaces");
  const int k = static_cast<int>(interior_point.size());
  Polytope poly;
  double scale = 0.0;
  for (const auto& [n, h] : supports) {
    if (n.k() != k) throw DimensionMismatch("outer_polytope direction dim");
    poly.facets.push_back({n.vec(), h});
    scale = std::max(scale, std::abs(h));
  }

  std::vector<Eigen::VectorXd> duals;
  duals.reserve(supports.size());
  for (const auto& [n, h] : supports) {
    const double margin = h - n.vec().dot(interior_point);
    if (margin <= 1e-9)
      throw InteriorPointInvalid(
          "interior point violates a halfspace (margin " +
          std::to_string(margin) + ")");
    duals.push_back(n.vec() / margin);
  }

  auto push_vertex = [&](const Eigen::VectorXd& v) {
    // guard against sliver facets of the dual hull: a genuine vertex
    // satisfies every halfspace
    for (const auto& f : poly.facets) {
      if (f.normal.dot(v) > f.offset + 1e-7 * (1.0 + scale)) return;
    }
    for (const auto& existing : poly.vertices) {
      if ((existing - v).norm() <= merge_eps * (1.0 + scale)) return;
    }
    poly.vertices.push_back(v);
  };

  if (k == 1) {
    bool has_plus = false, has_minus = false;
    double hi = 0.0, lo = 0.0;
    for (const auto& [n, h] : supports) {
      const double bound = h / n.vec()(0);
      if (n.vec()(0) > 0) {
        hi = has_plus ? std::min(hi, bound) : bound;
        has_plus = true;
      } else {
        lo = has_minus ? std::max(lo, bound) : bound;
        has_minus = true;
      }
    }
    if (!has_plus || !has_minus)
      throw UnboundedIntersection("k = 1 needs both direction signs");
    Eigen::VectorXd vlo(1), vhi(1);
    vlo << lo;
    vhi << hi;
    poly.vertices = {vlo, vhi};
    return poly;
  }
  if (k == 2) {
    std::vector<Eigen::Vector2d> pts(duals.size());
    for (std::size_t i = 0; i < duals.size(); ++i) pts[i] = duals[i];
    const std::vector<int> hull = convex_hull_2d(pts, 1e-12);
    if (hull.size() <= 2)
      throw UnboundedIntersection(
          "support directions do not positively span R^2");
    const int m = static_cast<int>(hull.size());
    for (int i = 0; i < m; ++i) {
      const Eigen::Vector2d a = pts[hull[i]];
      const Eigen::Vector2d b = pts[hull[(i + 1) % m]];
      const Eigen::Vector2d edge = b - a;
      Eigen::Vector2d normal(edge.y(), -edge.x());
      const double len = normal.norm();
      if (len <= 1e-14) continue;
      normal /= len;
      const double offset = normal.dot(a);
      if (offset <= 1e-10)
        throw UnboundedIntersection(
            "support directions do not positively span R^2");
      push_vertex(interior_point + Eigen::VectorXd(normal / offset));
    }
    return poly;
  }
  if (k == 3) {
    std::vector<Eigen::Vector3d> pts(duals.size());
    for (std::size_t i = 0; i < duals.size(); ++i) pts[i] = duals[i];
    const Hull3D hull = convex_hull_3d(pts, 1e-12);
    if (hull.dim != Hull3D::Dim::full)
      throw UnboundedIntersection(
          "support directions do not positively span R^3");
    for (const auto& f : hull.faces) {
      const Eigen::Vector3d a = pts[f[0]];
      Eigen::Vector3d n = (pts[f[1]] - a).cross(pts[f[2]] - a);
      const double len = n.norm();
      if (len <= 1e-18) continue;
      n /= len;
      const double offset = n.dot(a);
      if (offset <= 1e-10)
        throw UnboundedIntersection(
            "support directions do not positively span R^3");
      push_vertex(interior_point + Eigen::VectorXd(n / offset));
    }
    return poly;
  }
  throw InvalidArgument("outer_polytope vertex enumeration supports k <= 3");
}

/// Default interior point for outer_polytope: the image of the maximally
/// mixed state, (Tr F_i / d)_i, which every numerical range contains.
inline Eigen::VectorXd maximally_mixed_point(const ObservableSet& set) {
  Eigen::VectorXd p(set.k());
  for (int i = 0; i < set.k(); ++i)
    p(i) = set.op(i).mat().trace().real() / set.dim();
  return p;
}

}  // namespace jnr
