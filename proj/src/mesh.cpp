#include "saf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace saf {

std::vector<Vec3> compute_face_normals(const std::vector<Vec3>& vertices,
                                       const std::vector<Face>& faces) {
  std::vector<Vec3> normals(faces.size());
  for (size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    const Vec3 n = triangle_raw_normal(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    const double len = norm(n);
    normals[f] = len > 0.0 ? n / len : Vec3{0, 0, 0};  // zero-area faces keep a zero normal
  }
  return normals;
}

std::vector<Vec3> angle_weighted_vertex_normals(const std::vector<Vec3>& vertices,
                                                const std::vector<Face>& faces,
                                                const std::vector<Vec3>& face_normals,
                                                std::vector<int>* isolated) {
  std::vector<Vec3> normals(vertices.size(), Vec3{0, 0, 0});
  for (size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (int s = 0; s < 3; ++s) {
      const double w = corner_angle(vertices[t[s]], vertices[t[(s + 1) % 3]],
                                    vertices[t[(s + 2) % 3]]);
      normals[t[s]] += w * face_normals[f];
    }
  }
  for (size_t v = 0; v < normals.size(); ++v) {
    const double len = norm(normals[v]);
    if (len > 0.0) {
      normals[v] /= len;
    } else {
      normals[v] = Vec3{0, 0, 0};
      if (isolated) isolated->push_back(static_cast<int>(v));
    }
  }
  return normals;
}

TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                  std::vector<Vec3> vertex_normals) {
  const int nv = static_cast<int>(vertices.size());
  for (size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (int s = 0; s < 3; ++s) {
      if (t[s] < 0 || t[s] >= nv)
        throw mesh_error("face " + std::to_string(f) + " references vertex " +
                         std::to_string(t[s]) + " of " + std::to_string(nv));
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw mesh_error("face " + std::to_string(f) + " has a repeated vertex index");
  }

  TriMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.faces = std::move(faces);
  mesh.face_normals = compute_face_normals(mesh.vertices, mesh.faces);

  if (!vertex_normals.empty()) {
    if (vertex_normals.size() != mesh.vertices.size())
      throw mesh_error("vertex normal count does not match vertex count");
    for (Vec3& n : vertex_normals) {
      const double len = norm(n);
      if (len == 0.0) throw mesh_error("supplied vertex normal has zero length");
      n /= len;
    }
    mesh.vertex_normals = std::move(vertex_normals);
  } else {
    mesh.vertex_normals =
        angle_weighted_vertex_normals(mesh.vertices, mesh.faces, mesh.face_normals);
  }

  // One-ring CSR.
  mesh.ring_offsets.assign(mesh.vertices.size() + 1, 0);
  for (const Face& t : mesh.faces)
    for (int s = 0; s < 3; ++s) ++mesh.ring_offsets[t[s] + 1];
  for (size_t v = 1; v < mesh.ring_offsets.size(); ++v)
    mesh.ring_offsets[v] += mesh.ring_offsets[v - 1];
  mesh.ring_faces.resize(mesh.ring_offsets.back());
  {
    std::vector<int> cursor(mesh.ring_offsets.begin(), mesh.ring_offsets.end() - 1);
    for (size_t f = 0; f < mesh.faces.size(); ++f)
      for (int s = 0; s < 3; ++s)
        mesh.ring_faces[cursor[mesh.faces[f][s]]++] = static_cast<int>(f);
  }

  // Edge table with orientation counts.
  mesh.edges.reserve(mesh.faces.size() * 2);
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    for (int s = 0; s < 3; ++s) {
      const int a = t[s], b = t[(s + 1) % 3];
      EdgeInfo& e = mesh.edges[TriMesh::edge_key(a, b)];
      if (e.count < 2) e.faces[e.count] = static_cast<int>(f);
      ++e.count;
      if (a < b)
        ++e.forward;
      else
        ++e.backward;
    }
  }
  return mesh;
}

ValidationReport validate(const TriMesh& mesh, double area_eps) {
  ValidationReport report;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto p = mesh.face_points(f);
    if (triangle_area(p[0], p[1], p[2]) < area_eps) report.zero_area_faces.push_back(f);
    for (int s = 0; s < 3; ++s) {
      if (dot(mesh.vertex_normals[mesh.faces[f][s]], mesh.face_normals[f]) <= 0.0)
        report.acute_violations.push_back({f, s});
    }
  }
  for (const auto& [key, e] : mesh.edges) {
    if (e.count != 2 || e.forward != 1 || e.backward != 1) {
      const int a = static_cast<int>(key >> 32);
      const int b = static_cast<int>(key & 0xffffffffu);
      report.edge_defects.push_back({a, b});
    }
  }
  std::sort(report.edge_defects.begin(), report.edge_defects.end());
  report.watertight = report.edge_defects.empty();
  return report;
}

static void append_json_pairs(std::ostringstream& out,
                              const std::vector<std::array<int, 2>>& pairs) {
  out << '[';
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (i) out << ',';
    out << '[' << pairs[i][0] << ',' << pairs[i][1] << ']';
  }
  out << ']';
}

std::string ValidationReport::to_json() const {
  std::ostringstream out;
  out << "{\"watertight\":" << (watertight ? "true" : "false") << ",\"zero_area_faces\":[";
  for (size_t i = 0; i < zero_area_faces.size(); ++i) {
    if (i) out << ',';
    out << zero_area_faces[i];
  }
  out << "],\"acute_violations\":";
  append_json_pairs(out, acute_violations);
  out << ",\"edge_defects\":";
  append_json_pairs(out, edge_defects);
  out << '}';
  return out.str();
}

double winding_number(const TriMesh& mesh, const Vec3& x) {
  double total = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto p = mesh.face_points(f);
    total += triangle_solid_angle(x, p[0], p[1], p[2]);
  }
  return total / (4.0 * 3.14159265358979323846);
}

// Exhaustive nearest-point scan; only used on the ambiguous near-surface path.
static SurfacePoint local_nearest(const TriMesh& mesh, const Vec3& x, double& best_d2) {
  SurfacePoint best;
  best_d2 = std::numeric_limits<double>::max();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto p = mesh.face_points(f);
    const TriClosest c = closest_point_on_triangle(x, p[0], p[1], p[2]);
    if (c.dist_sq < best_d2) {
      best_d2 = c.dist_sq;
      best = {f, c.bary, c.point};
    }
  }
  return best;
}

Vec3 angle_weighted_pseudonormal(const TriMesh& mesh, const SurfacePoint& sp) {
  constexpr double eps = 1e-9;
  const Face& t = mesh.faces[sp.face];
  int zero_slots[2];
  int zeros = 0;
  for (int s = 0; s < 3; ++s)
    if (sp.bary[s] <= eps && zeros < 2) zero_slots[zeros++] = s;

  if (zeros == 0) return mesh.face_normals[sp.face];

  if (zeros == 1) {
    const int a = t[(zero_slots[0] + 1) % 3], b = t[(zero_slots[0] + 2) % 3];
    const EdgeInfo* e = mesh.edge(a, b);
    if (e && e->count == 2)
      return normalized(mesh.face_normals[e->faces[0]] + mesh.face_normals[e->faces[1]]);
    return mesh.face_normals[sp.face];
  }

  // Vertex case: angle-weighted blend over the one-ring.
  int vslot = 0;
  for (int s = 0; s < 3; ++s)
    if (s != zero_slots[0] && s != zero_slots[1]) vslot = s;
  const int v = t[vslot];
  Vec3 n{0, 0, 0};
  auto [begin, end] = mesh.one_ring(v);
  for (const int* it = begin; it != end; ++it) {
    const Face& ft = mesh.faces[*it];
    int s = 0;
    while (ft[s] != v) ++s;
    const auto p = mesh.face_points(*it);
    n += corner_angle(p[s], p[(s + 1) % 3], p[(s + 2) % 3]) * mesh.face_normals[*it];
  }
  const double len = norm(n);
  return len > 0.0 ? n / len : mesh.face_normals[sp.face];
}

Side side_with_nearest(const TriMesh& mesh, const Vec3& x, const SurfacePoint& nearest,
                       double distance) {
  if (distance <= 1e-9 * (1.0 + norm(x))) {
    const Vec3 pn = angle_weighted_pseudonormal(mesh, nearest);
    return dot(x - nearest.position, pn) >= 0.0 ? Side::Outside : Side::Inside;
  }
  return winding_number(mesh, x) < 0.5 ? Side::Outside : Side::Inside;
}

Side classify_side(const TriMesh& mesh, const Vec3& x) {
  const double w = winding_number(mesh, x);
  if (std::abs(w - 0.5) > 0.01) return w < 0.5 ? Side::Outside : Side::Inside;
  // Near-ambiguous winding: the point may be (numerically) on the surface.
  double d2 = 0.0;
  const SurfacePoint sp = local_nearest(mesh, x, d2);
  return side_with_nearest(mesh, x, sp, std::sqrt(d2));
}

}  // namespace saf
