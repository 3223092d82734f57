#include "saf/surfcoord.hpp"

#include <cmath>
#include <stdexcept>

namespace saf {

MeshPair make_mesh_pair(TriMesh posed, TriMesh canonical) {
  if (posed.vertices.size() != canonical.vertices.size())
    throw mesh_error("mesh pair: vertex counts differ");
  if (posed.faces != canonical.faces)
    throw mesh_error("mesh pair: face lists differ");
  return {std::move(posed), std::move(canonical)};
}

Vec3 canonical_point(const MeshPair& pair, int face, const std::array<double, 3>& bary) {
  const auto p = pair.canonical.face_points(face);
  return bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2];
}

static SurfaceAligned transfer(const MeshPair& pair, const ProjectionResult& r) {
  SurfaceAligned out;
  out.coord.canonical_pos = canonical_point(pair, r.surface.face, r.surface.bary);
  out.coord.height = r.height;
  out.posed_point = r.surface;
  out.fallback = r.fallback;
  return out;
}

SurfaceAligned to_surface_aligned(const MeshPair& pair, const Bvh& posed_bvh, const Vec3& x) {
  return transfer(pair, dispersed_project(posed_bvh, pair.posed, x));
}

SurfaceAligned to_surface_aligned(const MeshPair& pair, const Projector& projector,
                                  const Vec3& x) {
  return transfer(pair, projector.project(x));
}

LocalFrame local_frame(const TriMesh& mesh, const SurfacePoint& sp) {
  const auto p = mesh.face_points(sp.face);
  const Vec3 edge = p[1] - p[0];
  const double len = norm(edge);
  if (len == 0.0) throw mesh_error("local_frame: degenerate face");
  LocalFrame frame;
  frame.normal = mesh.face_normals[sp.face];
  frame.tangent = edge / len;
  frame.bitangent = cross(frame.normal, frame.tangent);
  return frame;
}

std::array<double, 6> view_feature(const Vec3& d, const LocalFrame& frame) {
  return {d.x, d.y, d.z, dot(d, frame.tangent), dot(d, frame.bitangent), dot(d, frame.normal)};
}

std::vector<double> positional_encoding(std::span<const double> v, int frequencies) {
  if (frequencies < 1) throw std::invalid_argument("positional_encoding: frequencies must be >= 1");
  constexpr double pi = 3.14159265358979323846;
  std::vector<double> out;
  out.reserve(v.size() * 2 * frequencies);
  for (const double u : v) {
    double scaled = pi * u;
    for (int k = 0; k < frequencies; ++k) {
      out.push_back(std::sin(scaled));
      out.push_back(std::cos(scaled));
      scaled *= 2.0;
    }
  }
  return out;
}

}  // namespace saf
