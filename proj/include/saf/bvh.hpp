#pragma once

#include <vector>

#include "saf/mesh.hpp"

namespace saf {

// Binary AABB tree over mesh faces; median split on the longest axis,
// leaves hold at most 4 faces. Immutable after build, queries are pure.
struct Bvh {
  struct Node {
    Aabb box;
    int left = -1;   // internal: child indices
    int right = -1;
    int first = 0;   // leaf: range into face_order
    int count = 0;   // leaf iff count > 0
    bool is_leaf() const { return count > 0; }
  };
  std::vector<Node> nodes;      // nodes[0] is the root
  std::vector<int> face_order;  // permutation of face indices
  static constexpr int kLeafSize = 4;
};

Bvh build_bvh(const TriMesh& mesh);

struct QueryStats {
  long long nodes_visited = 0;
  long long faces_tested = 0;
};

// Globally nearest surface point; equidistant faces resolve to the lowest
// face index. dist_sq_out receives the squared distance when non-null.
SurfacePoint nearest_surface_point(const Bvh& bvh, const TriMesh& mesh, const Vec3& x,
                                   double* dist_sq_out = nullptr, QueryStats* stats = nullptr);

// Exhaustive reference with the identical tie-break; test oracle for
// nearest_surface_point.
SurfacePoint brute_force_nearest(const TriMesh& mesh, const Vec3& x,
                                 double* dist_sq_out = nullptr);

}  // namespace saf
