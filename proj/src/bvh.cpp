#include "saf/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace saf {

namespace {

struct BuildCtx {
  const std::vector<Aabb>& face_boxes;
  const std::vector<Vec3>& centroids;
  Bvh& bvh;
};

int build_node(BuildCtx& ctx, int first, int count) {
  const int node_index = static_cast<int>(ctx.bvh.nodes.size());
  ctx.bvh.nodes.emplace_back();

  Aabb box;
  for (int i = first; i < first + count; ++i) box.expand(ctx.face_boxes[ctx.bvh.face_order[i]]);
  ctx.bvh.nodes[node_index].box = box;

  if (count <= Bvh::kLeafSize) {
    ctx.bvh.nodes[node_index].first = first;
    ctx.bvh.nodes[node_index].count = count;
    return node_index;
  }

  Aabb cbox;
  for (int i = first; i < first + count; ++i) cbox.expand(ctx.centroids[ctx.bvh.face_order[i]]);
  const Vec3 ext = cbox.extent();
  int axis = 0;
  if (ext.y > ext.x) axis = 1;
  if (ext.z > ext[axis]) axis = 2;

  auto begin = ctx.bvh.face_order.begin() + first;
  const int half = count / 2;
  // nth_element with an index tie-break keeps the build deterministic.
  std::nth_element(begin, begin + half, begin + count, [&](int a, int b) {
    const double ca = ctx.centroids[a][axis], cb = ctx.centroids[b][axis];
    return ca < cb || (ca == cb && a < b);
  });

  const int left = build_node(ctx, first, half);
  const int right = build_node(ctx, first + half, count - half);
  ctx.bvh.nodes[node_index].left = left;
  ctx.bvh.nodes[node_index].right = right;
  return node_index;
}

}  // namespace

Bvh build_bvh(const TriMesh& mesh) {
  if (mesh.faces.empty()) throw mesh_error("build_bvh: empty mesh");
  std::vector<Aabb> face_boxes(mesh.faces.size());
  std::vector<Vec3> centroids(mesh.faces.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto p = mesh.face_points(static_cast<int>(f));
    Aabb box;
    box.expand(p[0]);
    box.expand(p[1]);
    box.expand(p[2]);
    face_boxes[f] = box;
    centroids[f] = (p[0] + p[1] + p[2]) / 3.0;
  }

  Bvh bvh;
  bvh.face_order.resize(mesh.faces.size());
  std::iota(bvh.face_order.begin(), bvh.face_order.end(), 0);
  bvh.nodes.reserve(mesh.faces.size() / 2 + 1);
  BuildCtx ctx{face_boxes, centroids, bvh};
  build_node(ctx, 0, static_cast<int>(mesh.faces.size()));
  return bvh;
}

SurfacePoint nearest_surface_point(const Bvh& bvh, const TriMesh& mesh, const Vec3& x,
                                   double* dist_sq_out, QueryStats* stats) {
  SurfacePoint best;
  double best_d2 = std::numeric_limits<double>::max();

  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Bvh::Node& node = bvh.nodes[stack[--top]];
    // Keep nodes at exactly best_d2: an equidistant lower-index face may hide there.
    if (node.box.dist_sq(x) > best_d2) continue;
    if (stats) ++stats->nodes_visited;
    if (node.is_leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int f = bvh.face_order[i];
        const auto p = mesh.face_points(f);
        const TriClosest c = closest_point_on_triangle(x, p[0], p[1], p[2]);
        if (stats) ++stats->faces_tested;
        if (c.dist_sq < best_d2 || (c.dist_sq == best_d2 && f < best.face)) {
          best_d2 = c.dist_sq;
          best = {f, c.bary, c.point};
        }
      }
      continue;
    }
    const double dl = bvh.nodes[node.left].box.dist_sq(x);
    const double dr = bvh.nodes[node.right].box.dist_sq(x);
    // Push the farther child first so the nearer one is processed next.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }

  if (dist_sq_out) *dist_sq_out = best_d2;
  return best;
}

SurfacePoint brute_force_nearest(const TriMesh& mesh, const Vec3& x, double* dist_sq_out) {
  SurfacePoint best;
  double best_d2 = std::numeric_limits<double>::max();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto p = mesh.face_points(f);
    const TriClosest c = closest_point_on_triangle(x, p[0], p[1], p[2]);
    if (c.dist_sq < best_d2) {
      best_d2 = c.dist_sq;
      best = {f, c.bary, c.point};
    }
  }
  if (dist_sq_out) *dist_sq_out = best_d2;
  return best;
}

}  // namespace saf
