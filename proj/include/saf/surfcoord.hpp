#pragma once

#include <span>
#include <vector>

#include "saf/projection.hpp"

namespace saf {

// A deformed mesh together with the shared rest-pose (canonical) mesh of
// identical topology. Surface points transfer between the two by face index
// and barycentric coordinates.
struct MeshPair {
  TriMesh posed;
  TriMesh canonical;
};

// Validates shared topology (same vertex count, same face index triples).
MeshPair make_mesh_pair(TriMesh posed, TriMesh canonical);

// Surface-aligned coordinates of a spatial point: the corresponding
// canonical surface position plus the signed height in posed space.
struct SurfCoord {
  Vec3 canonical_pos;  // on the canonical mesh surface
  double height = 0.0; // meters, > 0 outside the posed mesh

  std::array<double, 4> as_array() const {
    return {canonical_pos.x, canonical_pos.y, canonical_pos.z, height};
  }
};

struct SurfaceAligned {
  SurfCoord coord;
  SurfacePoint posed_point;  // projection on the posed mesh, for frames
  bool fallback = false;
};

// Dispersed projection on the posed mesh followed by barycentric transfer of
// the surface point to the canonical mesh. Height stays in posed space.
SurfaceAligned to_surface_aligned(const MeshPair& pair, const Bvh& posed_bvh, const Vec3& x);
SurfaceAligned to_surface_aligned(const MeshPair& pair, const Projector& projector,
                                  const Vec3& x);

// Barycentric interpolation of (face, bary) on the canonical mesh.
Vec3 canonical_point(const MeshPair& pair, int face, const std::array<double, 3>& bary);

// Orthonormal right-handed frame on the posed surface: face normal, first
// edge direction, and their cross product.
struct LocalFrame {
  Vec3 normal, tangent, bitangent;
};

LocalFrame local_frame(const TriMesh& mesh, const SurfacePoint& sp);

// View direction feature: the world direction followed by its coordinates in
// the local frame, (d, <d,t>, <d,b>, <d,n>). Expects a unit d.
std::array<double, 6> view_feature(const Vec3& d, const LocalFrame& frame);

// Sinusoidal positional encoding: per input component u, frequency-major
// (sin(2^0 pi u), cos(2^0 pi u), ..., sin(2^(L-1) pi u), cos(2^(L-1) pi u)).
// Output size is 2 * frequencies * v.size().
std::vector<double> positional_encoding(std::span<const double> v, int frequencies);

}  // namespace saf
