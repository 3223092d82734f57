#include "saf/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace saf {

SurfaceSampler::SurfaceSampler(const TriMesh& mesh) : mesh_(mesh) {
  cumulative_area_.reserve(mesh.faces.size());
  double total = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto p = mesh.face_points(f);
    total += triangle_area(p[0], p[1], p[2]);
    cumulative_area_.push_back(total);
  }
  if (total <= 0.0) throw mesh_error("SurfaceSampler: mesh has no area");
}

SurfacePoint SurfaceSampler::sample(std::mt19937_64& rng) const {
  const double pick = uniform01(rng) * cumulative_area_.back();
  const auto it = std::upper_bound(cumulative_area_.begin(), cumulative_area_.end(), pick);
  const int f = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_area_.begin(),
                                                          cumulative_area_.size() - 1));
  const auto bary = uniform_bary(rng);
  const auto p = mesh_.face_points(f);
  return {f, bary, bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2]};
}

std::vector<Vec3> sample_shell(const TriMesh& mesh, const Bvh& bvh, double h_min, double h_max,
                               int count, std::uint64_t seed) {
  if (h_max <= 0.0 || h_min > h_max) throw std::invalid_argument("sample_shell: bad height band");
  const double pad = std::max(std::abs(h_min), h_max);
  const Aabb box = mesh.aabb().padded(pad);
  const Vec3 ext = box.extent();

  std::mt19937_64 rng(seed);
  std::vector<Vec3> points;
  points.reserve(count);
  long long attempts = 0;
  const long long max_attempts = 10000LL * std::max(count, 1) + 1000000LL;
  while (static_cast<int>(points.size()) < count) {
    if (++attempts > max_attempts)
      throw std::runtime_error("sample_shell: rejection sampling failed to converge");
    const Vec3 x = box.lo + Vec3{uniform01(rng) * ext.x, uniform01(rng) * ext.y,
                                 uniform01(rng) * ext.z};
    double d2 = 0.0;
    const SurfacePoint sp = nearest_surface_point(bvh, mesh, x, &d2);
    const double d = std::sqrt(d2);
    if (d > pad) continue;
    const bool inside = side_with_nearest(mesh, x, sp, d) == Side::Inside;
    const double h = inside ? -d : d;
    if (h < h_min || h > h_max) continue;
    points.push_back(x);
  }
  return points;
}

namespace {

struct OffsetPiece {
  enum class Kind { FaceSheet, EdgeWedge, VertexCone } kind;
  int a = 0, b = 0;       // face index, or edge endpoints, or vertex in `a`
  int f0 = -1, f1 = -1;   // incident faces for edges
  double weight = 0.0;
};

}  // namespace

std::vector<Vec3> sample_offset_surface(const TriMesh& mesh, const Bvh& bvh, double height,
                                        int count, std::uint64_t seed) {
  if (height <= 0.0) throw std::invalid_argument("sample_offset_surface: height must be > 0");

  std::vector<OffsetPiece> pieces;

  // Face sheets keep their area when translated along the face normal.
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto p = mesh.face_points(f);
    const double area = triangle_area(p[0], p[1], p[2]);
    if (area > 0.0) pieces.push_back({OffsetPiece::Kind::FaceSheet, f, 0, -1, -1, area});
  }

  // Convex edges sweep a cylindrical wedge: length * height * exterior angle.
  for (const auto& [key, e] : mesh.edges) {
    if (e.count != 2) continue;
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    const Vec3 n0 = mesh.face_normals[e.faces[0]];
    const Vec3 n1 = mesh.face_normals[e.faces[1]];
    // Convex iff the opposite vertex of the second face lies below the first
    // face's plane.
    const Face& t1 = mesh.faces[e.faces[1]];
    int opp = t1[0];
    for (int s = 0; s < 3; ++s)
      if (t1[s] != a && t1[s] != b) opp = t1[s];
    const double side = dot(mesh.vertices[opp] - mesh.vertices[a], n0);
    if (side >= 0.0) continue;  // flat or reflex: no exterior wedge
    const double angle = std::atan2(norm(cross(n0, n1)), dot(n0, n1));
    const double len = dist(mesh.vertices[a], mesh.vertices[b]);
    if (angle > 1e-12)
      pieces.push_back(
          {OffsetPiece::Kind::EdgeWedge, a, b, e.faces[0], e.faces[1], len * angle * height});
  }

  // Vertices sweep a spherical polygon with solid angle 2*pi minus the sum of
  // the incident corner angles (clamped; saddles have no exterior cone).
  constexpr double two_pi = 2.0 * 3.14159265358979323846;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    double angle_sum = 0.0;
    auto [begin, end] = mesh.one_ring(v);
    if (begin == end) continue;
    for (const int* it = begin; it != end; ++it) {
      const Face& t = mesh.faces[*it];
      int s = 0;
      while (t[s] != v) ++s;
      const auto p = mesh.face_points(*it);
      angle_sum += corner_angle(p[s], p[(s + 1) % 3], p[(s + 2) % 3]);
    }
    const double cone = two_pi - angle_sum;
    if (cone > 1e-12)
      pieces.push_back({OffsetPiece::Kind::VertexCone, v, 0, -1, -1, cone * height * height});
  }

  std::vector<double> cumulative(pieces.size());
  double total = 0.0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    total += pieces[i].weight;
    cumulative[i] = total;
  }
  if (total <= 0.0) throw mesh_error("sample_offset_surface: empty offset surface");

  std::mt19937_64 rng(seed);
  std::vector<Vec3> points;
  points.reserve(count);
  const double tolerance = 1e-9 * (1.0 + height);
  long long attempts = 0;
  const long long max_attempts = 10000LL * std::max(count, 1) + 1000000LL;
  while (static_cast<int>(points.size()) < count) {
    if (++attempts > max_attempts)
      throw std::runtime_error("sample_offset_surface: rejection sampling failed to converge");
    const double pick = uniform01(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const OffsetPiece& piece =
        pieces[std::min<size_t>(it - cumulative.begin(), pieces.size() - 1)];

    Vec3 x;
    switch (piece.kind) {
      case OffsetPiece::Kind::FaceSheet: {
        const auto bary = uniform_bary(rng);
        const auto p = mesh.face_points(piece.a);
        x = bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2] +
            height * mesh.face_normals[piece.a];
        break;
      }
      case OffsetPiece::Kind::EdgeWedge: {
        const Vec3 base = lerp(mesh.vertices[piece.a], mesh.vertices[piece.b], uniform01(rng));
        const Vec3 n0 = mesh.face_normals[piece.f0];
        const Vec3 n1 = mesh.face_normals[piece.f1];
        const double angle = std::atan2(norm(cross(n0, n1)), dot(n0, n1));
        const double u = uniform01(rng) * angle;
        const double s = std::sin(angle);
        const Vec3 dir = (std::sin(angle - u) * n0 + std::sin(u) * n1) / s;
        x = base + height * dir;
        break;
      }
      case OffsetPiece::Kind::VertexCone: {
        // Directions are drawn from the full sphere, so retry within the
        // piece until one lands in the vertex's normal cone; bouncing back
        // to the piece picker would undersample vertex caps by Omega/(4 pi).
        const Vec3 v = mesh.vertices[piece.a];
        bool found = false;
        for (int tries = 0; tries < 100000 && !found; ++tries) {
          x = v + height * uniform_unit_vector(rng);
          double d2 = 0.0;
          const SurfacePoint sp = nearest_surface_point(bvh, mesh, x, &d2);
          const double d = std::sqrt(d2);
          found = std::abs(d - height) <= tolerance && dist(sp.position, v) <= tolerance &&
                  side_with_nearest(mesh, x, sp, d) == Side::Outside;
        }
        if (!found) continue;
        points.push_back(x);
        continue;
      }
    }

    // Global verification: kills candidates shadowed by other geometry.
    double d2 = 0.0;
    const SurfacePoint sp = nearest_surface_point(bvh, mesh, x, &d2);
    const double d = std::sqrt(d2);
    if (std::abs(d - height) > tolerance) continue;
    if (side_with_nearest(mesh, x, sp, d) != Side::Outside) continue;
    points.push_back(x);
  }
  return points;
}

}  // namespace saf
