#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "saf/geometry.hpp"

namespace saf {

// Malformed input data (parse failures carry a line number in the message).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid mesh data (bad indices, topology mismatch, ...).
struct mesh_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Face = std::array<int, 3>;

struct EdgeInfo {
  int faces[2] = {-1, -1};  // first two incident faces
  int count = 0;            // total incident faces
  int forward = 0;          // traversals as (min, max)
  int backward = 0;         // traversals as (max, min)
};

// Indexed triangle mesh with per-face and per-vertex unit normals and
// precomputed adjacency. Treated as immutable after construction; all
// operations on it are pure and safe to call concurrently.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> vertex_normals;  // unit, oriented inside -> outside
  std::vector<Vec3> face_normals;    // unit, normalize((v2-v1) x (v3-v1))

  // Adjacency, built once by make_mesh.
  std::vector<int> ring_offsets;  // CSR offsets into ring_faces, size V+1
  std::vector<int> ring_faces;    // faces incident to each vertex
  std::unordered_map<std::uint64_t, EdgeInfo> edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  std::array<Vec3, 3> face_points(int f) const {
    const Face& t = faces[f];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }

  static std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

  const EdgeInfo* edge(int a, int b) const {
    auto it = edges.find(edge_key(a, b));
    return it == edges.end() ? nullptr : &it->second;
  }

  // Faces incident to vertex v, in construction order.
  std::pair<const int*, const int*> one_ring(int v) const {
    return {ring_faces.data() + ring_offsets[v], ring_faces.data() + ring_offsets[v + 1]};
  }

  Aabb aabb() const {
    Aabb box;
    for (const Vec3& v : vertices) box.expand(v);
    return box;
  }
};

// Builds a mesh from raw data: checks face indices, computes face normals and
// adjacency. If vertex_normals is empty they are computed by angle-weighted
// averaging, otherwise the supplied ones are used after normalization.
TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                  std::vector<Vec3> vertex_normals = {});

std::vector<Vec3> compute_face_normals(const std::vector<Vec3>& vertices,
                                       const std::vector<Face>& faces);

// Angle-weighted average of incident face normals, normalized. Isolated
// vertices get a zero normal and are appended to *isolated when given.
std::vector<Vec3> angle_weighted_vertex_normals(const std::vector<Vec3>& vertices,
                                                const std::vector<Face>& faces,
                                                const std::vector<Vec3>& face_normals,
                                                std::vector<int>* isolated = nullptr);

struct ValidationReport {
  bool watertight = false;
  std::vector<int> zero_area_faces;
  std::vector<std::array<int, 2>> acute_violations;  // (face, corner slot)
  std::vector<std::array<int, 2>> edge_defects;      // undirected (a, b), a < b

  bool clean() const {
    return watertight && zero_area_faces.empty() && acute_violations.empty();
  }
  std::string to_json() const;
};

// Checks the projection preconditions: watertightness (every edge shared by
// exactly two consistently wound faces), absence of zero-area faces, and the
// acute-angle condition <n_v, n_T> > 0 for every face corner.
ValidationReport validate(const TriMesh& mesh, double area_eps = 1e-12);

enum class Side { Outside, Inside };

// Generalized winding number: ~1 inside a watertight mesh, ~0 outside.
double winding_number(const TriMesh& mesh, const Vec3& x);

// Outside iff winding number < 0.5. Points within 1e-9 of the surface are
// decided by the sign of <x - nearest, angle-weighted pseudonormal> instead,
// where the winding number is numerically meaningless.
Side classify_side(const TriMesh& mesh, const Vec3& x);

// Angle-weighted pseudonormal at a surface point (face normal in a face
// interior, area-normal blends on edges/vertices).
Vec3 angle_weighted_pseudonormal(const TriMesh& mesh, const SurfacePoint& sp);

// Side decision given an already-computed nearest surface point; used by
// batch callers to avoid a redundant closest-point query.
Side side_with_nearest(const TriMesh& mesh, const Vec3& x, const SurfacePoint& nearest,
                       double distance);

// OBJ subset loader: `v x y z`, `vn x y z`, `f i j k` with 1-based indices,
// optional `i//n` (or `i/t/n`) normal references and fan-triangulated polygons.
// Texture/material records are ignored. Throws io_error with a line number on
// malformed records and mesh_error on bad indices.
TriMesh load_obj(std::istream& in);
TriMesh load_obj_file(const std::string& path);

void save_obj(const TriMesh& mesh, std::ostream& out);
void save_obj_file(const TriMesh& mesh, const std::string& path);

}  // namespace saf
