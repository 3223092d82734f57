#pragma once

#include <optional>

#include "saf/bvh.hpp"
#include "saf/mesh.hpp"

namespace saf {

// Barycentric coordinates closer to zero than this count as lying on an
// edge/vertex of a face.
inline constexpr double kBaryEps = 1e-9;

// One triangle with per-triangle aligned vertex normals. Alignment removes
// the inward in-plane component of each vertex normal, so the triangles
// parallel to the face swept along these normals cover the face itself.
// The same mesh vertex may end up with different aligned normals in
// different triangles.
struct AlignedTriangle {
  int face = -1;
  std::array<Vec3, 3> verts;
  std::array<Vec3, 3> aligned_normals;  // unit, outward or edge-parallel in-plane
  Vec3 face_normal;
};

// Vertex normal alignment for one triangle. Preconditions: the triangle is
// non-degenerate and every <normals[i], face_normal> > 0; both also hold for
// the output normals.
AlignedTriangle align_vertex_normals(const std::array<Vec3, 3>& verts,
                                     const std::array<Vec3, 3>& normals, const Vec3& face_normal,
                                     int face = -1);

// Aligned triangle for a mesh face. When `inverted` is set, face and vertex
// normals are negated before alignment (the configuration used for queries
// inside the mesh).
AlignedTriangle make_aligned_triangle(const TriMesh& mesh, int face, bool inverted);

// Coefficients (c1, c2) of the in-plane component of `direction` at corner
// `slot`, expressed in the two edge directions leaving that corner. Both
// non-positive means the direction points outward.
std::array<double, 2> edge_basis_coefficients(const std::array<Vec3, 3>& verts, int slot,
                                              const Vec3& direction, const Vec3& face_normal);

enum class ParallelStatus { Hit, BelowPlane, NotContained, Degenerate };

struct ParallelHit {
  ParallelStatus status = ParallelStatus::NotContained;
  std::array<double, 3> bary{0, 0, 0};
  double plane_offset = 0.0;  // signed distance l from the face plane to x
};

// Barycentric interpolated projection against one aligned triangle: build
// the parallel triangle through x by intersecting the plane through x with
// the three aligned vertex normals, and return the barycentric coordinates
// of x inside it. Fails with BelowPlane for l <= 0, NotContained when some
// coordinate < -bary_eps, Degenerate when the parallel triangle collapses.
ParallelHit parallel_triangle_barycentric(const Vec3& x, const AlignedTriangle& tri,
                                          double bary_eps = kBaryEps);

// Unit direction of sum_i bary[i] / <n'_i, n_T> * n'_i: the direction from a
// surface point to every spatial point projecting onto it.
Vec3 interpolated_normal(const AlignedTriangle& tri, const std::array<double, 3>& bary);

struct ProjectionResult {
  SurfacePoint surface;  // the projected point s
  double height = 0.0;   // signed; > 0 outside the mesh
  Vec3 normal_dir;       // unit, x == surface.position + height * normal_dir
  bool fallback = false; // true when the dispersed candidate set emptied and
                         // the nearest-point projection was returned instead
};

// Dispersed projection of x onto the mesh:
//   1. nearest surface point s~
//   2. collect all faces containing s~ (1 / 2 / one-ring for interior,
//      edge and vertex hits)
//   3. align vertex normals per face (negated normals for inside points)
//   4. drop faces whose parallel triangle does not contain x
//   5. barycentric-interpolate the survivors
//   6. keep the candidate nearest to x (ties: lowest face index)
// If step 4 empties the set, containment is retried with slack 1e3 * kBaryEps;
// if it still fails the nearest-point projection is returned with the
// fallback flag set. The mesh must pass validate() with no findings.
ProjectionResult dispersed_project(const Bvh& bvh, const TriMesh& mesh, const Vec3& x);

// Inverse map: s + |h| * n_s with n_s interpolated from the (possibly
// inverted) aligned normals. Exact inverse of dispersed_project for strictly
// interior barycentrics. Throws std::invalid_argument when some bary[i] <=
// kBaryEps (edge/vertex points, where the face is ambiguous).
Vec3 unproject(const TriMesh& mesh, int face, const std::array<double, 3>& bary, double h);

// Precomputed alignment tables for batch projection; builds both normal
// orientations for every face once so concurrent queries share read-only
// state.
class Projector {
 public:
  Projector(const TriMesh& mesh, const Bvh& bvh);

  ProjectionResult project(const Vec3& x) const;

  // Render fast path: nullopt when the unsigned distance to the mesh already
  // exceeds max_abs_height (which bounds |h| from below), skipping the side
  // classification entirely.
  std::optional<ProjectionResult> project_within(const Vec3& x, double max_abs_height) const;

  Vec3 unproject(int face, const std::array<double, 3>& bary, double h) const;

  const AlignedTriangle& aligned(int face, bool inverted) const {
    return inverted ? inverted_[face] : outward_[face];
  }
  const TriMesh& mesh() const { return mesh_; }
  const Bvh& bvh() const { return bvh_; }

 private:
  const TriMesh& mesh_;
  const Bvh& bvh_;
  std::vector<AlignedTriangle> outward_;
  std::vector<AlignedTriangle> inverted_;
};

}  // namespace saf
