#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "jnr/errors.hpp"

namespace jnr {

/// Planar convex hull (monotone chain). Returns indices into `pts` in
/// counterclockwise order. Points closer than `merge_eps` collapse to one
/// vertex and collinear chain points are absorbed.
inline std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& pts,
                                       double merge_eps = 1e-9) {
  const int n = static_cast<int>(pts.size());
  if (n == 0) return {};
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = merge_eps * (1.0 + scale);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    if (pts[a].y() != pts[b].y()) return pts[a].y() < pts[b].y();
    return a < b;
  });
  // drop near-duplicates (keep the first in sorted order)
  std::vector<int> uniq;
  for (int idx : order) {
    bool dup = false;
    for (int kept : uniq) {
      if ((pts[idx] - pts[kept]).norm() <= eps) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(idx);
  }
  if (uniq.size() <= 2) return uniq;

  const auto cross = [&](int o, int a, int b) {
    const Eigen::Vector2d u = pts[a] - pts[o];
    const Eigen::Vector2d v = pts[b] - pts[o];
    return u.x() * v.y() - u.y() * v.x();
  };
  // strictly convex turns only; the tolerance absorbs collinear points
  const double turn_eps = eps * (1.0 + scale);
  std::vector<int> hull(2 * uniq.size());
  int h = 0;
  for (int idx : uniq) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], idx) <= turn_eps) --h;
    hull[h++] = idx;
  }
  const int lower_end = h + 1;
  for (int i = static_cast<int>(uniq.size()) - 2; i >= 0; --i) {
    const int idx = uniq[i];
    while (h >= lower_end && cross(hull[h - 2], hull[h - 1], idx) <= turn_eps)
      --h;
    hull[h++] = idx;
  }
  hull.resize(h - 1);
  if (hull.size() <= 2) return {uniq.front(), uniq.back()};
  return hull;
}

/// Triangulated boundary of a 3-D convex hull.
struct Hull3D {
  enum class Dim { point, segment, planar, full };
  Dim dim = Dim::full;
  /// For full hulls: outward-oriented triangles indexing the input points.
  std::vector<std::array<int, 3>> faces;
  /// For degenerate inputs: the extreme input indices (2 for a segment) or a
  /// spanning set for the planar case (all non-duplicate indices).
  std::vector<int> support_indices;
  /// Unit normal of the common plane in the planar case.
  Eigen::Vector3d plane_normal = Eigen::Vector3d::Zero();
};

namespace hull_detail {

inline std::uint64_t edge_key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;  // unit, outward; zero for degenerate slivers
  double offset = 0.0;
  bool alive = true;
  bool sliver = false;
};

}  // namespace hull_detail

/// Incremental 3-D convex hull with tolerance-based visibility. Points within
/// eps of a face plane are treated as interior ("absorbed"), which keeps the
/// facet planes stable when many input points are coplanar.
inline Hull3D convex_hull_3d(const std::vector<Eigen::Vector3d>& pts,
                             double merge_eps = 1e-9) {
  using hull_detail::Face;
  using hull_detail::edge_key;

  Hull3D result;
  const int n = static_cast<int>(pts.size());
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = merge_eps * (1.0 + scale);

  // deduplicate
  std::vector<int> uniq;
  for (int i = 0; i < n; ++i) {
    bool dup = false;
    for (int kept : uniq) {
      if ((pts[i] - pts[kept]).norm() <= eps) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(i);
  }

  if (uniq.size() == 1) {
    result.dim = Hull3D::Dim::point;
    result.support_indices = uniq;
    return result;
  }

  // initial extent: farthest pair from an extreme point
  int p0 = uniq[0];
  for (int idx : uniq)
    if (pts[idx].x() < pts[p0].x()) p0 = idx;
  int p1 = p0;
  double best = -1.0;
  for (int idx : uniq) {
    const double d = (pts[idx] - pts[p0]).norm();
    if (d > best) {
      best = d;
      p1 = idx;
    }
  }
  if (best <= eps) {
    result.dim = Hull3D::Dim::point;
    result.support_indices = {p0};
    return result;
  }

  const Eigen::Vector3d axis = (pts[p1] - pts[p0]).normalized();
  int p2 = -1;
  best = -1.0;
  for (int idx : uniq) {
    const Eigen::Vector3d r = pts[idx] - pts[p0];
    const double d = (r - axis.dot(r) * axis).norm();
    if (d > best) {
      best = d;
      p2 = idx;
    }
  }
  if (best <= eps) {
    // collinear: report the two extremes along the axis
    int lo = p0, hi = p0;
    for (int idx : uniq) {
      const double t = axis.dot(pts[idx] - pts[p0]);
      if (t < axis.dot(pts[lo] - pts[p0])) lo = idx;
      if (t > axis.dot(pts[hi] - pts[p0])) hi = idx;
    }
    result.dim = Hull3D::Dim::segment;
    result.support_indices = {lo, hi};
    return result;
  }

  Eigen::Vector3d plane_n =
      (pts[p1] - pts[p0]).cross(pts[p2] - pts[p0]).normalized();
  int p3 = -1;
  best = -1.0;
  for (int idx : uniq) {
    const double d = std::abs(plane_n.dot(pts[idx] - pts[p0]));
    if (d > best) {
      best = d;
      p3 = idx;
    }
  }
  if (best <= eps) {
    result.dim = Hull3D::Dim::planar;
    result.support_indices = uniq;
    result.plane_normal = plane_n;
    return result;
  }

  // orient the seed tetrahedron so p3 lies below (p0, p1, p2)
  if (plane_n.dot(pts[p3] - pts[p0]) > 0.0) std::swap(p1, p2);

  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edge_to_face;
  const Eigen::Vector3d interior =
      0.25 * (pts[p0] + pts[p1] + pts[p2] + pts[p3]);

  auto add_face = [&](int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    Eigen::Vector3d cr = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double area2 = cr.norm();
    if (area2 <= 1e-14 * (1.0 + scale) * (1.0 + scale)) {
      f.sliver = true;
      f.normal.setZero();
      f.offset = 0.0;
    } else {
      f.normal = cr / area2;
      f.offset = f.normal.dot(pts[a]);
      if (f.normal.dot(interior) > f.offset) {  // keep outward orientation
        std::swap(f.v[1], f.v[2]);
        f.normal = -f.normal;
        f.offset = f.normal.dot(pts[f.v[0]]);
      }
    }
    const int id = static_cast<int>(faces.size());
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(f.v[e], f.v[(e + 1) % 3]);
      if (!edge_to_face.emplace(key, id).second)
        throw Error("HullInconsistency", "duplicate directed edge in 3-D hull");
    }
    faces.push_back(f);
  };

  auto drop_face = [&](int id) {
    Face& f = faces[id];
    f.alive = false;
    for (int e = 0; e < 3; ++e)
      edge_to_face.erase(edge_key(f.v[e], f.v[(e + 1) % 3]));
  };

  add_face(p0, p1, p2);
  add_face(p0, p2, p3);
  add_face(p2, p1, p3);
  add_face(p1, p0, p3);

  for (int idx : uniq) {
    if (idx == p0 || idx == p1 || idx == p2 || idx == p3) continue;
    const Eigen::Vector3d& p = pts[idx];

    std::vector<int> visible;
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
      const Face& f = faces[fi];
      if (!f.alive || f.sliver) continue;
      if (f.normal.dot(p) - f.offset > eps) visible.push_back(fi);
    }
    if (visible.empty()) continue;

    std::vector<char> is_visible(faces.size(), 0);
    for (int fi : visible) is_visible[fi] = 1;
    // slivers adjacent to the visible patch go with it; keeping them would
    // leave interior walls behind
    bool grew = true;
    while (grew) {
      grew = false;
      for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
        const Face& f = faces[fi];
        if (!f.alive || !f.sliver || is_visible[fi]) continue;
        for (int e = 0; e < 3; ++e) {
          const auto it =
              edge_to_face.find(edge_key(f.v[(e + 1) % 3], f.v[e]));
          if (it != edge_to_face.end() && is_visible[it->second]) {
            is_visible[fi] = 1;
            visible.push_back(fi);
            grew = true;
            break;
          }
        }
      }
    }

    std::vector<std::array<int, 2>> horizon;
    for (int fi : visible) {
      const Face& f = faces[fi];
      for (int e = 0; e < 3; ++e) {
        const int u = f.v[e];
        const int v = f.v[(e + 1) % 3];
        const auto it = edge_to_face.find(edge_key(v, u));
        if (it == edge_to_face.end())
          throw Error("HullInconsistency", "open edge in 3-D hull");
        if (!is_visible[it->second]) horizon.push_back({u, v});
      }
    }
    if (horizon.empty())
      throw Error("HullInconsistency", "visible region covers entire hull");

    for (int fi : visible) drop_face(fi);
    for (const auto& [u, v] : horizon) add_face(u, v, idx);
  }

  for (const Face& f : faces) {
    if (f.alive && !f.sliver) result.faces.push_back(f.v);
  }
  result.dim = Hull3D::Dim::full;
  return result;
}

}  // namespace jnr
