#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "saf/meshgen.hpp"
#include "saf/projection.hpp"
#include "saf/samplers.hpp"

using namespace saf;

namespace {

Vec3 random_in_box(const Aabb& box, std::mt19937_64& rng) {
  const Vec3 ext = box.extent();
  return box.lo + Vec3{uniform01(rng) * ext.x, uniform01(rng) * ext.y, uniform01(rng) * ext.z};
}

}  // namespace

TEST_CASE("closest_point_on_triangle: interior, vertex and edge regions") {
  const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};

  const TriClosest interior = closest_point_on_triangle({0.25, 0.25, 5}, a, b, c);
  CHECK(dist(interior.point, {0.25, 0.25, 0}) < 1e-15);
  CHECK(interior.bary[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(interior.bary[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(interior.bary[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(interior.dist_sq == doctest::Approx(25.0).epsilon(1e-12));

  const TriClosest vertex = closest_point_on_triangle({2, -1, 0}, a, b, c);
  CHECK(dist(vertex.point, {1, 0, 0}) == 0.0);
  CHECK(vertex.bary == std::array<double, 3>{0, 1, 0});

  // Hypotenuse case: the minimum over the edge parametrization b + w (c - b)
  // sits at w = 1/2.
  const Vec3 q{0.75, 0.75, 0};
  const TriClosest edge = closest_point_on_triangle(q, a, b, c);
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i <= 4096; ++i) {
    const double w = double(i) / 4096;
    best = std::min(best, dist_sq(q, b + w * (c - b)));
  }
  CHECK(dist(edge.point, {0.5, 0.5, 0}) < 1e-12);
  CHECK(edge.dist_sq <= best + 1e-12);
}

TEST_CASE("closest_point_on_triangle: degenerate triangle throws") {
  CHECK_THROWS_AS(closest_point_on_triangle({0, 0, 1}, {0, 0, 0}, {1, 0, 0}, {2, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("closest_point_on_triangle: barycentric consistency") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec3 a{uniform01(rng), uniform01(rng), uniform01(rng)};
    const Vec3 b = a + uniform_unit_vector(rng);
    const Vec3 c = a + uniform_unit_vector(rng);
    if (triangle_area(a, b, c) < 1e-3) continue;
    const Vec3 p = 3.0 * uniform_unit_vector(rng);
    const TriClosest r = closest_point_on_triangle(p, a, b, c);
    CHECK(r.bary[0] >= -1e-12);
    CHECK(r.bary[1] >= -1e-12);
    CHECK(r.bary[2] >= -1e-12);
    CHECK(std::abs(r.bary[0] + r.bary[1] + r.bary[2] - 1.0) < 1e-9);
    const Vec3 reconstructed = r.bary[0] * a + r.bary[1] * b + r.bary[2] * c;
    CHECK(dist(reconstructed, r.point) < 1e-9 * (1.0 + norm(r.point)));
  }
}

TEST_CASE("build_bvh: structure invariants") {
  SUBCASE("cube has at least 3 leaves, each with at most 4 faces") {
    const TriMesh cube = make_cube();
    const Bvh bvh = build_bvh(cube);
    int leaves = 0;
    for (const auto& node : bvh.nodes) {
      if (!node.is_leaf()) continue;
      ++leaves;
      CHECK(node.count <= Bvh::kLeafSize);
    }
    CHECK(leaves >= 3);
  }

  SUBCASE("single triangle: root is a leaf") {
    const TriMesh tri = make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const Bvh bvh = build_bvh(tri);
    CHECK(bvh.nodes.size() == 1);
    CHECK(bvh.nodes[0].is_leaf());
  }

  SUBCASE("icosphere: faces partition exactly across leaves; boxes nest") {
    const TriMesh ico = make_icosphere(1);
    const Bvh bvh = build_bvh(ico);
    std::vector<int> seen;
    for (const auto& node : bvh.nodes) {
      if (node.is_leaf()) {
        for (int i = node.first; i < node.first + node.count; ++i)
          seen.push_back(bvh.face_order[i]);
      } else {
        for (const int child : {node.left, node.right}) {
          CHECK(node.box.lo.x <= bvh.nodes[child].box.lo.x);
          CHECK(node.box.hi.x >= bvh.nodes[child].box.hi.x);
          CHECK(node.box.lo.y <= bvh.nodes[child].box.lo.y);
          CHECK(node.box.hi.y >= bvh.nodes[child].box.hi.y);
          CHECK(node.box.lo.z <= bvh.nodes[child].box.lo.z);
          CHECK(node.box.hi.z >= bvh.nodes[child].box.hi.z);
        }
      }
    }
    std::sort(seen.begin(), seen.end());
    std::vector<int> expected(ico.faces.size());
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(seen == expected);
  }
}

TEST_CASE("nearest_surface_point: cube probes") {
  const TriMesh cube = make_cube();
  const Bvh bvh = build_bvh(cube);

  double d2 = 0.0;
  const SurfacePoint top = nearest_surface_point(bvh, cube, {0.5, 0.5, 2}, &d2);
  CHECK(dist(top.position, {0.5, 0.5, 1}) < 1e-15);
  CHECK(std::sqrt(d2) == doctest::Approx(1.0).epsilon(1e-12));

  const SurfacePoint corner = nearest_surface_point(bvh, cube, {2, 2, 2}, &d2);
  CHECK(dist(corner.position, {1, 1, 1}) == 0.0);
}

TEST_CASE("nearest_surface_point: oracle equivalence on every test mesh") {
  std::mt19937_64 rng(17);
  for (const TriMesh& mesh :
       {make_cube(), make_icosphere(1), make_icosphere(2), make_icosphere(3),
        make_torus(32, 16, 1.0, 0.4)}) {
    const Bvh bvh = build_bvh(mesh);
    const Aabb box = mesh.aabb().padded(0.5);
    for (int i = 0; i < 10000; ++i) {
      const Vec3 x = random_in_box(box, rng);
      double bvh_d2 = 0.0, brute_d2 = 0.0;
      const SurfacePoint a = nearest_surface_point(bvh, mesh, x, &bvh_d2);
      const SurfacePoint b = brute_force_nearest(mesh, x, &brute_d2);
      REQUIRE(std::abs(bvh_d2 - brute_d2) <= 1e-12);
      REQUIRE(a.face == b.face);
    }
  }
}

TEST_CASE("nearest_surface_point: never beaten by random surface samples") {
  const TriMesh torus = make_torus(32, 16, 1.0, 0.4);
  const Bvh bvh = build_bvh(torus);
  const SurfaceSampler sampler(torus);
  std::mt19937_64 rng(23);
  const Aabb box = torus.aabb().padded(0.5);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = random_in_box(box, rng);
    double d2 = 0.0;
    nearest_surface_point(bvh, torus, x, &d2);
    for (int k = 0; k < 100; ++k) CHECK(d2 <= dist_sq(x, sampler.sample(rng).position) + 1e-12);
  }
}

TEST_CASE("nearest_surface_point: query visits a small fraction of faces") {
  const TriMesh ico = make_icosphere(5);  // 20480 faces
  REQUIRE(ico.face_count() == 20480);
  const Bvh bvh = build_bvh(ico);
  std::mt19937_64 rng(29);
  const Aabb box = ico.aabb().padded(0.5);
  QueryStats stats;
  const int queries = 1000;
  for (int i = 0; i < queries; ++i) nearest_surface_point(bvh, ico, random_in_box(box, rng), nullptr, &stats);
  const double average_fraction =
      double(stats.faces_tested) / queries / double(ico.face_count());
  CHECK(average_fraction < 0.05);
}
