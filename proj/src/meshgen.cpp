#include "saf/meshgen.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace saf {

TriMesh make_cube() {
  std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                         {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  std::vector<Face> f = {
      {0, 2, 1}, {0, 3, 2},  // bottom
      {4, 5, 6}, {4, 6, 7},  // top
      {0, 1, 5}, {0, 5, 4},  // front (y = 0)
      {3, 7, 6}, {3, 6, 2},  // back
      {0, 4, 7}, {0, 7, 3},  // left (x = 0)
      {1, 2, 6}, {1, 6, 5},  // right
  };
  return make_mesh(std::move(v), std::move(f));
}

TriMesh make_grid_cube(int n) {
  if (n < 1) throw std::invalid_argument("make_grid_cube: n must be >= 1");
  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> vertices;
  auto vertex_at = [&](int i, int j, int k) {
    const std::array<int, 3> key{i, j, k};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(vertices.size());
    index.emplace(key, id);
    vertices.push_back(Vec3{double(i) / n, double(j) / n, double(k) / n});
    return id;
  };

  std::vector<Face> faces;
  // One entry per cube side: cell (a, b) maps to lattice coordinates.
  struct SideSpec {
    int fixed_axis, fixed_value;
    int ua, va;
    bool flip;
  };
  const SideSpec sides[6] = {
      {2, 0, 0, 1, true},  // z = 0, outward -z
      {2, 1, 0, 1, false}, // z = 1
      {1, 0, 0, 2, false}, // y = 0 (x cross z = -y)
      {1, 1, 0, 2, true},  // y = 1
      {0, 0, 1, 2, true},  // x = 0 (y cross z = +x, so flip)
      {0, 1, 1, 2, false}, // x = 1
  };
  for (const SideSpec& s : sides) {
    auto lattice = [&](int u, int v) {
      int c[3];
      c[s.fixed_axis] = s.fixed_value * n;
      c[s.ua] = u;
      c[s.va] = v;
      return vertex_at(c[0], c[1], c[2]);
    };
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        const int c00 = lattice(u, v), c10 = lattice(u + 1, v);
        const int c11 = lattice(u + 1, v + 1), c01 = lattice(u, v + 1);
        if (!s.flip) {
          faces.push_back({c00, c10, c11});
          faces.push_back({c00, c11, c01});
        } else {
          faces.push_back({c00, c11, c10});
          faces.push_back({c00, c01, c11});
        }
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

TriMesh make_icosphere(int subdiv, double radius) {
  if (subdiv < 0) throw std::invalid_argument("make_icosphere: subdiv must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> vertices = {
      {-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : vertices) v = normalized(v);
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdiv; ++level) {
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const std::uint64_t key = TriMesh::edge_key(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int id = static_cast<int>(vertices.size());
      vertices.push_back(normalized(0.5 * (vertices[a] + vertices[b])));
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  for (Vec3& v : vertices) v *= radius;
  return make_mesh(std::move(vertices), std::move(faces));
}

TriMesh make_torus(int nu, int nv, double major_radius, double minor_radius) {
  if (nu < 3 || nv < 3) throw std::invalid_argument("make_torus: need nu, nv >= 3");
  const double pi = 3.14159265358979323846;
  std::vector<Vec3> vertices(static_cast<size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double th = 2.0 * pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double ph = 2.0 * pi * j / nv;
      const double ring = major_radius + minor_radius * std::cos(ph);
      vertices[static_cast<size_t>(i) * nv + j] = {ring * std::cos(th), ring * std::sin(th),
                                                   minor_radius * std::sin(ph)};
    }
  }
  std::vector<Face> faces;
  faces.reserve(static_cast<size_t>(nu) * nv * 2);
  auto at = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      faces.push_back({v00, v10, v11});
      faces.push_back({v00, v11, v01});
    }
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

}  // namespace saf
