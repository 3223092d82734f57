#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "saf/meshgen.hpp"
#include "saf/samplers.hpp"
#include "support/oracles.hpp"

using namespace saf;

namespace {

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 4 8 7
f 4 7 3
f 1 5 8
f 1 8 4
f 2 3 7
f 2 7 6
)";

TriMesh cube_with_hole() {
  TriMesh cube = make_cube();
  std::vector<Face> faces(cube.faces.begin(), cube.faces.end() - 1);
  return make_mesh(cube.vertices, faces);
}

}  // namespace

TEST_CASE("load_obj: unit cube") {
  std::istringstream in(kCubeObj);
  const TriMesh mesh = load_obj(in);
  CHECK(mesh.vertex_count() == 8);
  CHECK(mesh.face_count() == 12);
  CHECK(validate(mesh).clean());
}

TEST_CASE("load_obj: quad faces are fan-triangulated") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  const TriMesh mesh = load_obj(in);
  CHECK(mesh.face_count() == 2);
  CHECK(mesh.faces[0] == Face{0, 1, 2});
  CHECK(mesh.faces[1] == Face{0, 2, 3});
}

TEST_CASE("load_obj: out-of-range face index is a structural error") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  CHECK_THROWS_AS(load_obj(in), mesh_error);
}

TEST_CASE("load_obj: malformed record reports the line number") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv zero 1 0\nf 1 2 3\n");
  try {
    load_obj(in);
    FAIL("expected io_error");
  } catch (const io_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("load_obj: repeated vertex index in a face is rejected") {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 2\n");
  CHECK_THROWS_AS(load_obj(in), mesh_error);
}

TEST_CASE("load_obj: supplied vn records pass through after normalization") {
  const TriMesh ico = make_icosphere(1);
  REQUIRE(ico.vertex_count() == 42);
  REQUIRE(ico.face_count() == 80);
  std::ostringstream obj;
  obj.precision(17);
  for (const Vec3& v : ico.vertices)
    obj << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const Vec3& v : ico.vertices) {
    const Vec3 n = normalized(v) * 2.0;  // non-unit on purpose
    obj << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
  }
  for (const Face& f : ico.faces)
    obj << "f " << f[0] + 1 << "//" << f[0] + 1 << ' ' << f[1] + 1 << "//" << f[1] + 1 << ' '
        << f[2] + 1 << "//" << f[2] + 1 << '\n';
  std::istringstream in(obj.str());
  const TriMesh mesh = load_obj(in);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    CHECK(dist(mesh.vertex_normals[v], normalized(mesh.vertices[v])) < 1e-9);
}

TEST_CASE("save/load round-trips geometry") {
  const TriMesh ico = make_icosphere(1);
  std::stringstream buffer;
  save_obj(ico, buffer);
  const TriMesh back = load_obj(buffer);
  REQUIRE(back.vertex_count() == ico.vertex_count());
  REQUIRE(back.faces == ico.faces);
  for (int v = 0; v < ico.vertex_count(); ++v) {
    CHECK(dist(back.vertices[v], ico.vertices[v]) == 0.0);
    CHECK(dist(back.vertex_normals[v], ico.vertex_normals[v]) < 1e-15);
  }
}

TEST_CASE("vertex normals: cube corners match their octant") {
  const TriMesh cube = make_cube();
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (int v = 0; v < cube.vertex_count(); ++v) {
    const Vec3 expected{(cube.vertices[v].x > 0.5 ? 1.0 : -1.0) * inv_sqrt3,
                        (cube.vertices[v].y > 0.5 ? 1.0 : -1.0) * inv_sqrt3,
                        (cube.vertices[v].z > 0.5 ? 1.0 : -1.0) * inv_sqrt3};
    CHECK(dist(cube.vertex_normals[v], expected) < 1e-12);
  }
}

TEST_CASE("vertex normals: coplanar fan averages to the plane normal") {
  // Center vertex surrounded by a planar fan at z = 0.
  std::vector<Vec3> vertices{{0, 0, 0}};
  const int n = 7;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * i / n;
    vertices.push_back({std::cos(a), std::sin(a), 0.0});
  }
  std::vector<Face> faces;
  for (int i = 0; i < n; ++i) faces.push_back({0, 1 + i, 1 + (i + 1) % n});
  const auto fn = compute_face_normals(vertices, faces);
  const auto vn = angle_weighted_vertex_normals(vertices, faces, fn);
  CHECK(dist(vn[0], Vec3{0, 0, 1}) < 1e-12);
}

TEST_CASE("vertex normals: icosphere normals approximate the sphere") {
  const TriMesh ico = make_icosphere(1);
  for (int v = 0; v < ico.vertex_count(); ++v)
    CHECK(dist(ico.vertex_normals[v], normalized(ico.vertices[v])) < 1e-2);
}

TEST_CASE("vertex normals: isolated vertex is flagged with a zero normal") {
  std::vector<Vec3> vertices{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}};
  std::vector<Face> faces{{0, 1, 2}};
  const auto fn = compute_face_normals(vertices, faces);
  std::vector<int> isolated;
  const auto vn = angle_weighted_vertex_normals(vertices, faces, fn, &isolated);
  CHECK(isolated == std::vector<int>{3});
  CHECK(vn[3] == Vec3{0, 0, 0});
}

TEST_CASE("vertex normals: invariant under face reordering and rotation") {
  const TriMesh ico = make_icosphere(2);
  std::vector<Face> shuffled = ico.faces;
  std::mt19937_64 rng(11);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const TriMesh reordered = make_mesh(ico.vertices, shuffled);
  for (int v = 0; v < ico.vertex_count(); ++v)
    CHECK(dist(reordered.vertex_normals[v], ico.vertex_normals[v]) < 1e-9);

  const Mat3 rot = axis_angle(normalized(Vec3{1, 2, 3}), 0.83);
  const TriMesh rotated = testing::transformed_mesh(ico, rot, {0.2, -0.1, 0.4});
  for (int v = 0; v < ico.vertex_count(); ++v)
    CHECK(dist(rotated.vertex_normals[v], rot * ico.vertex_normals[v]) < 1e-9);
}

TEST_CASE("validate: all shipped test meshes are clean") {
  for (const TriMesh& mesh :
       {make_cube(), make_grid_cube(8), make_icosphere(1), make_icosphere(2), make_icosphere(3),
        make_torus(32, 16, 1.0, 0.4)}) {
    const ValidationReport report = validate(mesh);
    CHECK(report.watertight);
    CHECK(report.edge_defects.empty());
    CHECK(report.zero_area_faces.empty());
    CHECK(report.acute_violations.empty());
  }
}

TEST_CASE("validate: missing face leaves three boundary edges") {
  const ValidationReport report = validate(cube_with_hole());
  CHECK_FALSE(report.watertight);
  CHECK(report.edge_defects.size() == 3);
}

TEST_CASE("validate: flipped vertex normal shows up at every incident face") {
  const TriMesh cube = make_cube();
  std::vector<Vec3> normals = cube.vertex_normals;
  normals[0] = -normals[0];
  const TriMesh bad = make_mesh(cube.vertices, cube.faces, normals);
  const ValidationReport report = validate(bad);
  auto [begin, end] = bad.one_ring(0);
  const size_t incident = static_cast<size_t>(end - begin);
  CHECK(report.acute_violations.size() == incident);
  for (const auto& [face, slot] : report.acute_violations) CHECK(bad.faces[face][slot] == 0);
}

TEST_CASE("validate: zero-area face is reported") {
  std::vector<Vec3> vertices{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}};
  std::vector<Face> faces{{0, 1, 3}, {0, 1, 2}};  // second is collinear
  const TriMesh mesh = make_mesh(vertices, faces);
  const ValidationReport report = validate(mesh);
  CHECK(report.zero_area_faces == std::vector<int>{1});
}

TEST_CASE("ValidationReport serializes to JSON") {
  const ValidationReport report = validate(cube_with_hole());
  const auto parsed = nlohmann::json::parse(report.to_json());
  CHECK(parsed["watertight"] == false);
  CHECK(parsed["edge_defects"].size() == 3);
  CHECK(parsed["zero_area_faces"].empty());
  CHECK(parsed["acute_violations"].empty());
}

TEST_CASE("classify_side: cube examples") {
  const TriMesh cube = make_cube();
  CHECK(classify_side(cube, {2, 0.5, 0.5}) == Side::Outside);
  CHECK(classify_side(cube, {0.5, 0.5, 0.5}) == Side::Inside);
  CHECK(classify_side(cube, {0.5, 0.5, 1.2}) == Side::Outside);
  CHECK(winding_number(cube, {0.5, 0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(winding_number(cube, {2, 0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("classify_side: exactly-on-surface points use the pseudonormal tie-break") {
  const TriMesh cube = make_cube();
  CHECK(classify_side(cube, {0.5, 0.5, 1.0}) == Side::Outside);         // face interior
  CHECK(classify_side(cube, {0.5, 0.5, 1.0 - 1e-10}) == Side::Inside);  // just under it
  CHECK(classify_side(cube, {1.0, 1.0, 1.0}) == Side::Outside);         // corner
}

TEST_CASE("classify_side agrees with ray-parity counting") {
  std::mt19937_64 rng(5);
  for (const TriMesh& mesh : {make_cube(), make_icosphere(2), make_torus(24, 12, 1.0, 0.4)}) {
    const Aabb box = mesh.aabb().padded(0.3);
    const Vec3 ext = box.extent();
    int checked = 0;
    while (checked < 200) {
      const Vec3 x = box.lo + Vec3{uniform01(rng) * ext.x, uniform01(rng) * ext.y,
                                   uniform01(rng) * ext.z};
      if (std::abs(winding_number(mesh, x) - 0.5) <= 0.1) continue;
      ++checked;
      CHECK(classify_side(mesh, x) == testing::ray_parity_side(mesh, x, rng));
    }
  }
}
