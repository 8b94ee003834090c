#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "jnr/boundary.hpp"
#include "jnr/errors.hpp"
#include "jnr/hermitian.hpp"

namespace jnr {

enum class FlatPartKind { segment, ellipse, filled_ellipse_degenerate };

/// A positive-dimensional exposed face of the range: the image of a
/// degenerate top eigenspace. For a two-level eigenspace this image is the
/// affine image of the Bloch sphere, an ellipse possibly collapsed to a
/// segment. Faces of higher-multiplicity eigenspaces are reported with their
/// affine carrier and bounding extents under the degenerate kind.
struct FlatPart {
  FlatPartKind kind;
  Eigen::VectorXd center;
  std::vector<Eigen::VectorXd> semi_axes;  // 1 for segment, 2 otherwise
  Direction direction;                     // supporting direction
  int multiplicity = 2;

  Eigen::VectorXd endpoint_a() const { return center - semi_axes.at(0); }
  Eigen::VectorXd endpoint_b() const { return center + semi_axes.at(0); }
};

inline constexpr double kSegmentRankTol = 1e-7;
inline constexpr double kFlatDedupTol = 1e-7;

namespace classify_detail {

inline std::vector<double> spectral_widths(const ObservableSet& set) {
  std::vector<double> widths(set.k());
  for (int i = 0; i < set.k(); ++i) {
    const RealVector vals = eigvals_hermitian(set.op(i));
    const double w = vals(vals.size() - 1) - vals(0);
    widths[i] = w > 1e-14 * (1.0 + std::abs(vals(0))) ? w : 1.0;
  }
  return widths;
}

inline ObservableSet normalized_set(const ObservableSet& set,
                                    const std::vector<double>& widths) {
  std::vector<HermitianOperator> ops;
  ops.reserve(set.k());
  for (int i = 0; i < set.k(); ++i) ops.push_back(set.op(i).scaled(1.0 / widths[i]));
  return ObservableSet(std::move(ops), set.labels());
}

/// lambda_1 - lambda_2 of n . F (top spectral gap).
inline double top_gap(const ObservableSet& set, const Eigen::VectorXd& n) {
  const RealVector vals = eigvals_hermitian(set.combine(n));
  const int d = static_cast<int>(vals.size());
  if (d < 2) return std::numeric_limits<double>::infinity();
  return vals(d - 1) - vals(d - 2);
}

/// Extracts the face geometry for an eigenspace basis. Coordinates are
/// reported for the original operators; the rank decision uses the
/// width-normalized map. Returns nothing when the image is a point or when
/// the map has full rank (not a supporting-face image).
inline std::optional<FlatPart> face_from_basis(
    const ObservableSet& set, const std::vector<double>& widths,
    const Matrix& basis, const Direction& support_direction,
    double rank_tol = kSegmentRankTol) {
  const int k = set.k();
  const int m = static_cast<int>(basis.cols());
  std::vector<Matrix> compressed;
  compressed.reserve(k);
  for (int i = 0; i < k; ++i)
    compressed.push_back(compress(set.op(i), basis).mat());

  Eigen::VectorXd center(k);
  for (int i = 0; i < k; ++i) center(i) = compressed[i].trace().real() / m;

  if (m == 2) {
    // exact Bloch-sphere image: C_i = a_i I + r_i . sigma
    Eigen::MatrixXd map(k, 3);
    for (int i = 0; i < k; ++i) {
      map(i, 0) = compressed[i](0, 1).real();
      map(i, 1) = compressed[i](0, 1).imag();
      map(i, 2) = 0.5 * (compressed[i](0, 0) - compressed[i](1, 1)).real();
    }
    Eigen::MatrixXd normalized = map;
    for (int i = 0; i < k; ++i) normalized.row(i) /= widths[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> nsvd(normalized);
    int rank = 0;
    for (int i = 0; i < nsvd.singularValues().size(); ++i)
      if (nsvd.singularValues()(i) > rank_tol) ++rank;
    if (rank == 0 || rank >= 3) return std::nullopt;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(map, Eigen::ComputeThinU);
    FlatPart part{rank == 1 ? FlatPartKind::segment : FlatPartKind::ellipse,
                  center,
                  {},
                  support_direction,
                  2};
    for (int i = 0; i < rank; ++i)
      part.semi_axes.push_back(svd.singularValues()(i) *
                               Eigen::VectorXd(svd.matrixU().col(i)));
    return part;
  }

  // multiplicity above two: carrier from the Gram matrix of the traceless
  // compressed operators, extents from support values along the carrier
  Eigen::MatrixXd gram(k, k);
  std::vector<Matrix> traceless(compressed);
  for (int i = 0; i < k; ++i)
    traceless[i] -= center(i) * Matrix::Identity(m, m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      gram(i, j) = (traceless[i].adjoint() * traceless[j]).trace().real();
  Eigen::MatrixXd gram_normalized = gram;
  for (int i = 0; i < k; ++i) {
    gram_normalized.row(i) /= widths[i];
    gram_normalized.col(i) /= widths[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(gram_normalized);
  std::vector<int> carrier_ids;
  for (int i = k - 1; i >= 0; --i) {
    if (ges.eigenvalues()(i) > rank_tol * rank_tol) carrier_ids.push_back(i);
  }
  const int rank = static_cast<int>(carrier_ids.size());
  if (rank == 0 || rank >= 3) return std::nullopt;

  FlatPart part{rank == 1 ? FlatPartKind::segment
                          : FlatPartKind::filled_ellipse_degenerate,
                center,
                {},
                support_direction,
                m};
  Eigen::VectorXd midpoint = center;
  for (int idx : carrier_ids) {
    // carrier direction back in original coordinates
    Eigen::VectorXd dir_normalized = ges.eigenvectors().col(idx);
    Eigen::VectorXd dir(k);
    for (int i = 0; i < k; ++i) dir(i) = dir_normalized(i) * widths[i];
    dir.normalize();
    // face coordinate along dir is Tr(sigma T); its range is the spectrum
    Matrix t = Matrix::Zero(m, m);
    for (int i = 0; i < k; ++i) t += dir(i) * traceless[i];
    const RealVector tvals = eigvals_hermitian(HermitianOperator(t));
    const double lo = tvals(0);
    const double hi = tvals(tvals.size() - 1);
    midpoint += 0.5 * (hi + lo) * dir;
    part.semi_axes.push_back(0.5 * (hi - lo) * dir);
  }
  if (rank == 1) part.center = midpoint;
  return part;
}

/// The same face is reached from many sweep directions; parts whose
/// geometry coincides within tol (in width-normalized coordinates) collapse.
inline bool same_flat_part(const FlatPart& a, const FlatPart& b,
                           const std::vector<double>& widths, double tol) {
  if (a.kind != b.kind) return false;
  const int k = static_cast<int>(a.center.size());
  auto normalize = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(k);
    for (int i = 0; i < k; ++i) out(i) = v(i) / widths[i];
    return out;
  };
  if (a.kind == FlatPartKind::segment) {
    const Eigen::VectorXd a0 = normalize(a.endpoint_a());
    const Eigen::VectorXd a1 = normalize(a.endpoint_b());
    const Eigen::VectorXd b0 = normalize(b.endpoint_a());
    const Eigen::VectorXd b1 = normalize(b.endpoint_b());
    const double direct = std::max((a0 - b0).norm(), (a1 - b1).norm());
    const double swapped = std::max((a0 - b1).norm(), (a1 - b0).norm());
    return std::min(direct, swapped) <= tol;
  }
  if ((normalize(a.center) - normalize(b.center)).norm() > tol) return false;
  // rotation-invariant shape comparison: sum of outer products of the axes
  Eigen::MatrixXd sa = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(k, k);
  for (const auto& ax : a.semi_axes) {
    const Eigen::VectorXd n = normalize(ax);
    sa += n * n.transpose();
  }
  for (const auto& ax : b.semi_axes) {
    const Eigen::VectorXd n = normalize(ax);
    sb += n * n.transpose();
  }
  return (sa - sb).norm() <= tol * (1.0 + sa.norm());
}

/// Golden-section minimization of the top gap over a bracket of sweep
/// angles. The gap is V-shaped around an isolated degeneracy, which
/// golden-section handles without derivatives.
inline double refine_angle_minimum(const ObservableSet& set, double lo,
                                   double hi) {
  const auto gap_at = [&](double theta) {
    Eigen::VectorXd n(2);
    n << std::cos(theta), std::sin(theta);
    return top_gap(set, n);
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double gc = gap_at(c);
  double gd = gap_at(d);
  while (b - a > 1e-12) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = gap_at(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = gap_at(d);
    }
  }
  return 0.5 * (a + b);
}

/// Compass search on the sphere: descend the top gap in the tangent plane
/// with a halving step. Converges linearly on the conical landscape around a
/// degeneracy.
inline Eigen::Vector3d refine_sphere_minimum(const ObservableSet& set,
                                             Eigen::Vector3d n,
                                             double initial_step) {
  double g = top_gap(set, n);
  double h = initial_step;
  int budget = 600;
  while (h > 1e-13 && budget-- > 0) {
    // tangent frame
    Eigen::Vector3d e = std::abs(n.x()) < 0.7 ? Eigen::Vector3d::UnitX()
                                              : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d u = (e - e.dot(n) * n).normalized();
    const Eigen::Vector3d v = n.cross(u);
    Eigen::Vector3d best = n;
    double best_g = g;
    for (const Eigen::Vector3d& cand :
         {(n + h * u).normalized(), (n - h * u).normalized(),
          (n + h * v).normalized(), (n - h * v).normalized()}) {
      const double cg = top_gap(set, cand);
      if (cg < best_g) {
        best_g = cg;
        best = cand;
      }
    }
    if (best_g < g) {
      n = best;
      g = best_g;
    } else {
      h *= 0.5;
    }
  }
  return n;
}

}  // namespace classify_detail

/// Image of the Bloch sphere of a two-dimensional eigenspace under the
/// expectation map: an ellipse, possibly degenerated to a segment. Returns
/// nothing when the image map has full rank (cannot be a supporting-face
/// image) or collapses to a point.
inline std::optional<FlatPart> ellipse_from_eigenspace(
    const ObservableSet& set, const Matrix& basis,
    double rank_tol = kSegmentRankTol) {
  if (basis.cols() != 2)
    throw InvalidArgument("ellipse_from_eigenspace expects 2 basis columns");
  const Matrix gram = basis.adjoint() * basis;
  if ((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10)
    throw NonOrthonormalBasis("eigenspace basis is not orthonormal");
  const std::vector<double> widths = classify_detail::spectral_widths(set);
  Eigen::VectorXd fallback = Eigen::VectorXd::Zero(set.k());
  fallback(0) = 1.0;
  return classify_detail::face_from_basis(set, widths, basis,
                                          Direction(fallback), rank_tol);
}

/// Scans the direction list for degenerate top eigenspaces, refines nearby
/// local minima of the spectral gap down to machine degeneracy, and maps
/// each two-level eigenspace analytically. Sampling-based: a flat part whose
/// supporting direction lies between refinement basins can be missed.
inline std::vector<FlatPart> detect_flat_parts(
    const ObservableSet& set, const std::vector<Direction>& directions,
    double gap_tol = kDefaultGapTol) {
  using namespace classify_detail;
  const int k = set.k();
  const std::vector<double> widths = spectral_widths(set);
  const ObservableSet nset = normalized_set(set, widths);

  std::vector<Eigen::VectorXd> candidates;

  const int n_dirs = static_cast<int>(directions.size());
  std::vector<double> gaps(n_dirs);
  std::vector<double> gap_scale(n_dirs);
  for (int i = 0; i < n_dirs; ++i) {
    const RealVector vals = eigvals_hermitian(nset.combine(directions[i].vec()));
    const int d = static_cast<int>(vals.size());
    gaps[i] = d < 2 ? std::numeric_limits<double>::infinity()
                    : vals(d - 1) - vals(d - 2);
    gap_scale[i] = 1.0 + vals(d - 1) - vals(0);
  }

  // gate for refinement: anything plausibly adjacent to a degeneracy
  const double refine_gate = 0.2;

  if (k == 2) {
    // order directions by angle for a cyclic neighbor structure
    std::vector<int> order(n_dirs);
    for (int i = 0; i < n_dirs; ++i) order[i] = i;
    std::vector<double> angles(n_dirs);
    for (int i = 0; i < n_dirs; ++i)
      angles[i] = std::atan2(directions[i].vec()(1), directions[i].vec()(0));
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return angles[a] < angles[b]; });
    for (int pos = 0; pos < n_dirs; ++pos) {
      const int i = order[pos];
      const int prev = order[(pos + n_dirs - 1) % n_dirs];
      const int next = order[(pos + 1) % n_dirs];
      if (gaps[i] > refine_gate * gap_scale[i]) continue;
      if (gaps[i] > gaps[prev] || gaps[i] > gaps[next]) continue;
      double span_prev = angles[i] - angles[prev];
      if (span_prev <= 0.0) span_prev += 2.0 * std::numbers::pi;
      double span_next = angles[next] - angles[i];
      if (span_next <= 0.0) span_next += 2.0 * std::numbers::pi;
      const double theta = refine_angle_minimum(nset, angles[i] - span_prev,
                                                angles[i] + span_next);
      Eigen::VectorXd n(2);
      n << std::cos(theta), std::sin(theta);
      candidates.push_back(n);
    }
  } else if (k == 3) {
    const double spacing = 2.0 / std::sqrt(static_cast<double>(n_dirs)) * 1.8;
    // seed refinement from the smallest-gap directions that are local minima
    // among their grid neighbors
    std::vector<int> by_gap(n_dirs);
    for (int i = 0; i < n_dirs; ++i) by_gap[i] = i;
    std::sort(by_gap.begin(), by_gap.end(),
              [&](int a, int b) { return gaps[a] < gaps[b]; });
    const int seed_count = std::min(n_dirs, 512);
    for (int pos = 0; pos < seed_count; ++pos) {
      const int i = by_gap[pos];
      if (gaps[i] > refine_gate * gap_scale[i]) break;
      std::vector<std::pair<double, int>> nearest;
      nearest.reserve(n_dirs - 1);
      for (int j = 0; j < n_dirs; ++j) {
        if (j == i) continue;
        nearest.emplace_back(
            (directions[i].vec() - directions[j].vec()).squaredNorm(), j);
      }
      const int neighbor_count =
          static_cast<int>(std::min<std::size_t>(8, nearest.size()));
      std::partial_sort(nearest.begin(), nearest.begin() + neighbor_count,
                        nearest.end());
      bool is_min = true;
      for (int t = 0; t < neighbor_count; ++t)
        if (gaps[nearest[t].second] < gaps[i]) is_min = false;
      if (!is_min) continue;
      const Eigen::Vector3d refined = refine_sphere_minimum(
          nset, Eigen::Vector3d(directions[i].vec()), spacing);
      candidates.push_back(refined);
    }
  } else {
    // no refinement structure beyond k = 3: direct degenerate hits only
    for (int i = 0; i < n_dirs; ++i) {
      if (gaps[i] <= gap_tol * gap_scale[i])
        candidates.push_back(directions[i].vec());
    }
  }

  std::vector<FlatPart> parts;
  for (const Eigen::VectorXd& n : candidates) {
    const EigenspaceProjector proj =
        lambda_max_projector(nset.combine(n), gap_tol);
    if (proj.multiplicity < 2) continue;  // refined to a positive minimum
    // supporting direction in original (unscaled) coordinates
    Eigen::VectorXd n_orig(k);
    for (int i = 0; i < k; ++i) n_orig(i) = n(i) / widths[i];
    auto part = face_from_basis(set, widths, proj.basis,
                                Direction::normalized(n_orig));
    if (!part) continue;
    bool duplicate = false;
    for (const FlatPart& existing : parts) {
      if (same_flat_part(*part, existing, widths, kFlatDedupTol)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) parts.push_back(std::move(*part));
  }
  return parts;
}

/// Defaults used by the classification entry points and the CLI.
inline std::vector<Direction> default_classify_directions(int k) {
  if (k == 2) return sample_directions(2, 2048, DirectionStrategy::grid2d);
  if (k == 3) return sample_directions(3, 8192, DirectionStrategy::fibonacci3d);
  return sample_directions(k, 4096, DirectionStrategy::seeded_uniform, 0);
}

inline std::vector<FlatPart> detect_flat_parts(
    const ObservableSet& set, double gap_tol = kDefaultGapTol) {
  return detect_flat_parts(set, default_classify_directions(set.k()), gap_tol);
}

enum class K2Class {
  oval_class0 = 0,
  one_flat_class1 = 1,
  two_segments_class2 = 2,
  triangle_class3 = 3,
};

struct JnrClass {
  int k = 0;
  std::optional<K2Class> k2_label;
  int ellipse_count = 0;   // e
  int segment_count = 0;   // s as reported
  bool infinite_segments = false;
  bool polytope_degenerate = false;
  int flat_part_intersections = 0;
  std::vector<FlatPart> flat_parts;
};

namespace classify_detail {

inline bool commute(const HermitianOperator& a, const HermitianOperator& b) {
  const double scale =
      (1.0 + detail::max_abs(a.mat())) * (1.0 + detail::max_abs(b.mat()));
  return (a.mat() * b.mat() - b.mat() * a.mat()).cwiseAbs().maxCoeff() <=
         1e-10 * scale;
}

/// Euclidean projection onto a flat part viewed as a convex set (segment or
/// filled ellipse).
inline Eigen::VectorXd project_onto_part(const FlatPart& part,
                                         const Eigen::VectorXd& p) {
  if (part.kind == FlatPartKind::segment) {
    const Eigen::VectorXd a = part.endpoint_a();
    const Eigen::VectorXd b = part.endpoint_b();
    const Eigen::VectorXd ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return a;
    const double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
    return a + t * ab;
  }
  // filled ellipse { c + x1 A1 + x2 A2 : x1^2 + x2^2 <= 1 }
  const Eigen::VectorXd& a1 = part.semi_axes.at(0);
  const Eigen::VectorXd& a2 = part.semi_axes.at(1);
  const double s1 = a1.norm();
  const double s2 = a2.norm();
  const Eigen::VectorXd u1 = a1 / s1;
  const Eigen::VectorXd u2 = a2 / s2;
  const Eigen::VectorXd r = p - part.center;
  const double y1 = u1.dot(r);
  const double y2 = u2.dot(r);
  double q1, q2;
  if ((y1 / s1) * (y1 / s1) + (y2 / s2) * (y2 / s2) <= 1.0) {
    q1 = y1;
    q2 = y2;
  } else {
    // multiplier equation for the closest boundary point
    double lo = 0.0, hi = std::max(s1, s2) * (std::hypot(y1, y2) + s1 + s2);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double t1 = s1 * y1 / (s1 * s1 + mid);
      const double t2 = s2 * y2 / (s2 * s2 + mid);
      if (t1 * t1 + t2 * t2 > 1.0)
        lo = mid;
      else
        hi = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    q1 = s1 * s1 * y1 / (s1 * s1 + lambda);
    q2 = s2 * s2 * y2 / (s2 * s2 + lambda);
  }
  return part.center + (q1 / s1) * a1 + (q2 / s2) * a2;
}

/// Distance between two flat parts by alternating projections.
inline double flat_part_distance(const FlatPart& a, const FlatPart& b) {
  Eigen::VectorXd p = a.center;
  Eigen::VectorXd q = b.center;
  for (int it = 0; it < 300; ++it) {
    q = project_onto_part(b, p);
    p = project_onto_part(a, q);
  }
  return (p - q).norm();
}

inline int count_intersections(const std::vector<FlatPart>& parts) {
  int count = 0;
  double scale = 0.0;
  for (const auto& part : parts)
    scale = std::max(scale, part.center.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (flat_part_distance(parts[i], parts[j]) <= 1e-6 * (1.0 + scale))
        ++count;
  return count;
}

}  // namespace classify_detail

/// Qutrit pair classification: the boundary of L(X, Y) carries 0, 1, 2 or 3
/// segments; three segments means a triangle, which is exactly the commuting
/// case (detected directly and possibly degenerate).
inline JnrClass classify_k2_qutrit(const HermitianOperator& x,
                                   const HermitianOperator& y,
                                   double gap_tol = kDefaultGapTol) {
  if (x.dim() != 3 || y.dim() != 3)
    throw WrongDimension("classify_k2_qutrit requires d = 3");
  JnrClass result;
  result.k = 2;
  if (classify_detail::commute(x, y)) {
    result.k2_label = K2Class::triangle_class3;
    result.segment_count = 3;
    result.polytope_degenerate = true;
    return result;
  }
  const ObservableSet set({x, y});
  result.flat_parts = detect_flat_parts(set, gap_tol);
  int segments = 0;
  for (const auto& part : result.flat_parts)
    if (part.kind == FlatPartKind::segment) ++segments;
  result.segment_count = std::min(segments, 3);
  result.k2_label = static_cast<K2Class>(result.segment_count);
  result.flat_part_intersections =
      classify_detail::count_intersections(result.flat_parts);
  return result;
}

/// Qutrit triple classification into the (e, s) configuration table. Two or
/// more detected segments imply an infinite family, reported as s = 1 with
/// the flag set; three or four ellipses exclude segments entirely.
inline JnrClass classify_k3_qutrit(const HermitianOperator& f1,
                                   const HermitianOperator& f2,
                                   const HermitianOperator& f3,
                                   double gap_tol = kDefaultGapTol) {
  if (f1.dim() != 3 || f2.dim() != 3 || f3.dim() != 3)
    throw WrongDimension("classify_k3_qutrit requires d = 3");
  JnrClass result;
  result.k = 3;
  if (classify_detail::commute(f1, f2) && classify_detail::commute(f1, f3) &&
      classify_detail::commute(f2, f3)) {
    result.polytope_degenerate = true;
    return result;
  }
  const ObservableSet set({f1, f2, f3});
  result.flat_parts = detect_flat_parts(set, gap_tol);
  int segments = 0;
  for (const auto& part : result.flat_parts) {
    if (part.kind == FlatPartKind::segment) ++segments;
    if (part.kind == FlatPartKind::ellipse) ++result.ellipse_count;
  }
  if (result.ellipse_count >= 3) {
    // three or more boundary ellipses leave no room for a segment; any
    // leftover detection is spurious
    segments = 0;
    std::erase_if(result.flat_parts, [](const FlatPart& p) {
      return p.kind == FlatPartKind::segment;
    });
  }
  if (segments >= 2) {
    result.segment_count = 1;
    result.infinite_segments = true;
  } else {
    result.segment_count = segments;
  }
  result.flat_part_intersections =
      classify_detail::count_intersections(result.flat_parts);
  return result;
}

}  // namespace jnr
