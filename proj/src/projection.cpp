#include "saf/projection.hpp"

#include <cmath>

namespace saf {

namespace {

// Solve q = c1 e1 + c2 e2 for an in-plane q via the 2x2 Gram system.
std::array<double, 2> decompose_in_plane(const Vec3& q, const Vec3& e1, const Vec3& e2) {
  const double g11 = dot(e1, e1), g12 = dot(e1, e2), g22 = dot(e2, e2);
  const double det = g11 * g22 - g12 * g12;  // (2 * area)^2 > 0 for valid triangles
  const double b1 = dot(q, e1), b2 = dot(q, e2);
  return {(g22 * b1 - g12 * b2) / det, (g11 * b2 - g12 * b1) / det};
}

}  // namespace

std::array<double, 2> edge_basis_coefficients(const std::array<Vec3, 3>& verts, int slot,
                                              const Vec3& direction, const Vec3& face_normal) {
  const Vec3 e1 = verts[(slot + 1) % 3] - verts[slot];
  const Vec3 e2 = verts[(slot + 2) % 3] - verts[slot];
  const Vec3 q = direction - dot(direction, face_normal) * face_normal;
  return decompose_in_plane(q, e1, e2);
}

AlignedTriangle align_vertex_normals(const std::array<Vec3, 3>& verts,
                                     const std::array<Vec3, 3>& normals, const Vec3& face_normal,
                                     int face) {
  AlignedTriangle out;
  out.face = face;
  out.verts = verts;
  out.face_normal = face_normal;
  for (int i = 0; i < 3; ++i) {
    if (dot(normals[i], face_normal) <= 0.0)
      throw mesh_error("align_vertex_normals: vertex normal not acute with the face normal");
    const Vec3 e1 = verts[(i + 1) % 3] - verts[i];
    const Vec3 e2 = verts[(i + 2) % 3] - verts[i];
    // In-plane offset of the normal tip, decomposed in the edge basis; only
    // positive coefficients (the inward wedge) are removed.
    const Vec3 q = normals[i] - dot(normals[i], face_normal) * face_normal;
    const auto c = decompose_in_plane(q, e1, e2);
    const Vec3 aligned =
        normals[i] - std::max(0.0, c[0]) * e1 - std::max(0.0, c[1]) * e2;
    // The component along the face normal is untouched, so this cannot vanish.
    out.aligned_normals[i] = normalized(aligned);
  }
  return out;
}

AlignedTriangle make_aligned_triangle(const TriMesh& mesh, int face, bool inverted) {
  const Face& t = mesh.faces[face];
  const double sign = inverted ? -1.0 : 1.0;
  return align_vertex_normals(
      mesh.face_points(face),
      {sign * mesh.vertex_normals[t[0]], sign * mesh.vertex_normals[t[1]],
       sign * mesh.vertex_normals[t[2]]},
      sign * mesh.face_normals[face], face);
}

ParallelHit parallel_triangle_barycentric(const Vec3& x, const AlignedTriangle& tri,
                                          double bary_eps) {
  ParallelHit hit;
  hit.plane_offset = dot(x - tri.verts[0], tri.face_normal);
  if (hit.plane_offset <= 0.0) {
    hit.status = ParallelStatus::BelowPlane;
    return hit;
  }
  std::array<Vec3, 3> parallel;
  for (int i = 0; i < 3; ++i) {
    const double cosine = dot(tri.aligned_normals[i], tri.face_normal);
    parallel[i] = tri.verts[i] + (hit.plane_offset / cosine) * tri.aligned_normals[i];
  }
  const PlaneBary bary = barycentric_coords(x, parallel[0], parallel[1], parallel[2]);
  if (bary.degenerate) {
    hit.status = ParallelStatus::Degenerate;
    return hit;
  }
  hit.bary = bary.bary;
  const double min_bary = std::min({bary.bary[0], bary.bary[1], bary.bary[2]});
  hit.status = min_bary >= -bary_eps ? ParallelStatus::Hit : ParallelStatus::NotContained;
  return hit;
}

Vec3 interpolated_normal(const AlignedTriangle& tri, const std::array<double, 3>& bary) {
  Vec3 n{0, 0, 0};
  for (int i = 0; i < 3; ++i)
    n += (bary[i] / dot(tri.aligned_normals[i], tri.face_normal)) * tri.aligned_normals[i];
  return normalized(n);
}

namespace {

// Faces containing the nearest point: topology decides, with kBaryEps
// classifying which barycentrics count as zero.
int collect_cofaces(const TriMesh& mesh, const SurfacePoint& sp, int* out, int cap) {
  int zero_slots[2];
  int zeros = 0;
  for (int s = 0; s < 3; ++s)
    if (sp.bary[s] <= kBaryEps && zeros < 2) zero_slots[zeros++] = s;

  if (zeros == 0) {
    out[0] = sp.face;
    return 1;
  }
  if (zeros == 1) {
    const Face& t = mesh.faces[sp.face];
    const int a = t[(zero_slots[0] + 1) % 3], b = t[(zero_slots[0] + 2) % 3];
    const EdgeInfo* e = mesh.edge(a, b);
    int n = 0;
    if (e) {
      for (int i = 0; i < std::min(e->count, 2); ++i) out[n++] = e->faces[i];
    }
    if (n == 0) out[n++] = sp.face;
    return n;
  }
  // Vertex hit: the slot with bary ~ 1 names the vertex; take its one-ring.
  int vslot = 0;
  for (int s = 0; s < 3; ++s)
    if (s != zero_slots[0] && s != zero_slots[1]) vslot = s;
  auto [begin, end] = mesh.one_ring(mesh.faces[sp.face][vslot]);
  int n = 0;
  for (const int* it = begin; it != end && n < cap; ++it) out[n++] = *it;
  return n;
}

template <class AlignedGetter>
ProjectionResult dispersed_from_nearest(const TriMesh& mesh, const Vec3& x,
                                        const SurfacePoint& near_sp, double near_dist,
                                        AlignedGetter&& aligned) {
  const double scale = 1.0 + norm(x);

  if (near_dist <= 1e-13 * scale) {
    // On the surface: s = x, h = 0, direction from the interpolated normal.
    const AlignedTriangle& tri = aligned(near_sp.face, false);
    return {near_sp, 0.0, interpolated_normal(tri, near_sp.bary), false};
  }

  const bool inside = side_with_nearest(mesh, x, near_sp, near_dist) == Side::Inside;

  constexpr int kMaxCofaces = 16;
  int cofaces[kMaxCofaces];
  const int n_cofaces = collect_cofaces(mesh, near_sp, cofaces, kMaxCofaces);

  int best_face = -1;
  std::array<double, 3> best_bary{};
  Vec3 best_point;
  double best_d2 = std::numeric_limits<double>::max();

  for (const double eps : {kBaryEps, kBaryEps * 1e3}) {
    for (int i = 0; i < n_cofaces; ++i) {
      const int f = cofaces[i];
      const AlignedTriangle& tri = aligned(f, inside);
      const ParallelHit hit = parallel_triangle_barycentric(x, tri, eps);
      if (hit.status != ParallelStatus::Hit) continue;
      const Vec3 s =
          hit.bary[0] * tri.verts[0] + hit.bary[1] * tri.verts[1] + hit.bary[2] * tri.verts[2];
      const double d2 = dist_sq(x, s);
      if (d2 < best_d2 || (d2 == best_d2 && f < best_face)) {
        best_d2 = d2;
        best_face = f;
        best_bary = hit.bary;
        best_point = s;
      }
    }
    if (best_face >= 0) break;  // slack retry only when the first pass empties
  }

  ProjectionResult result;
  if (best_face < 0) {
    // Candidate set emptied even with slack: degrade to the nearest-point
    // projection and flag it.
    result.surface = near_sp;
    result.height = inside ? -near_dist : near_dist;
    result.normal_dir = (x - near_sp.position) / near_dist * (inside ? -1.0 : 1.0);
    result.fallback = true;
    return result;
  }

  // Containment slack admits slightly negative coordinates; clamp them so
  // stored barycentrics stay valid (the sum moves by at most the slack).
  for (double& b : best_bary) b = std::max(b, 0.0);

  const double h = std::sqrt(best_d2);
  result.surface = {best_face, best_bary, best_point};
  result.height = inside ? -h : h;
  result.normal_dir = h > 0.0 ? (x - best_point) / h * (inside ? -1.0 : 1.0)
                              : interpolated_normal(aligned(best_face, false), best_bary);
  result.fallback = false;
  return result;
}

template <class AlignedGetter>
ProjectionResult dispersed_impl(const Bvh& bvh, const TriMesh& mesh, const Vec3& x,
                                AlignedGetter&& aligned) {
  double near_d2 = 0.0;
  const SurfacePoint near_sp = nearest_surface_point(bvh, mesh, x, &near_d2);
  return dispersed_from_nearest(mesh, x, near_sp, std::sqrt(near_d2), aligned);
}

}  // namespace

ProjectionResult dispersed_project(const Bvh& bvh, const TriMesh& mesh, const Vec3& x) {
  return dispersed_impl(bvh, mesh, x, [&](int face, bool inverted) {
    return make_aligned_triangle(mesh, face, inverted);
  });
}

Vec3 unproject(const TriMesh& mesh, int face, const std::array<double, 3>& bary, double h) {
  const double min_bary = std::min({bary[0], bary[1], bary[2]});
  if (min_bary <= kBaryEps)
    throw std::invalid_argument("unproject: barycentric on an edge/vertex is ambiguous");
  const double sum = bary[0] + bary[1] + bary[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("unproject: barycentric coordinates must sum to 1");

  const auto p = mesh.face_points(face);
  const Vec3 s = bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2];
  if (h == 0.0) return s;
  const AlignedTriangle tri = make_aligned_triangle(mesh, face, h < 0.0);
  // For h < 0 the inverted-normal field points into the mesh, so offsetting
  // by |h| lands inside either way.
  return s + std::abs(h) * interpolated_normal(tri, bary);
}

Projector::Projector(const TriMesh& mesh, const Bvh& bvh) : mesh_(mesh), bvh_(bvh) {
  outward_.reserve(mesh.faces.size());
  inverted_.reserve(mesh.faces.size());
  for (int f = 0; f < mesh.face_count(); ++f) {
    outward_.push_back(make_aligned_triangle(mesh, f, false));
    inverted_.push_back(make_aligned_triangle(mesh, f, true));
  }
}

ProjectionResult Projector::project(const Vec3& x) const {
  return dispersed_impl(bvh_, mesh_, x,
                        [this](int face, bool inverted) -> const AlignedTriangle& {
                          return aligned(face, inverted);
                        });
}

std::optional<ProjectionResult> Projector::project_within(const Vec3& x,
                                                          double max_abs_height) const {
  double d2 = 0.0;
  const SurfacePoint near_sp = nearest_surface_point(bvh_, mesh_, x, &d2);
  if (d2 > max_abs_height * max_abs_height) return std::nullopt;  // |h| >= distance
  return dispersed_from_nearest(mesh_, x, near_sp, std::sqrt(d2),
                                [this](int face, bool inverted) -> const AlignedTriangle& {
                                  return aligned(face, inverted);
                                });
}

Vec3 Projector::unproject(int face, const std::array<double, 3>& bary, double h) const {
  const double min_bary = std::min({bary[0], bary[1], bary[2]});
  if (min_bary <= kBaryEps)
    throw std::invalid_argument("unproject: barycentric on an edge/vertex is ambiguous");
  const auto p = mesh_.face_points(face);
  const Vec3 s = bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2];
  if (h == 0.0) return s;
  return s + std::abs(h) * interpolated_normal(aligned(face, h < 0.0), bary);
}

}  // namespace saf
