#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "saf/meshgen.hpp"
#include "saf/renderfield.hpp"
#include "saf/samplers.hpp"
#include "support/oracles.hpp"

using namespace saf;

namespace {

FieldQuery query_at(const Vec3& canonical_pos, double h, int face = 0) {
  FieldQuery q;
  q.coord.canonical_pos = canonical_pos;
  q.coord.height = h;
  q.face = face;
  return q;
}

MeshPair identity_pair(const TriMesh& mesh) { return make_mesh_pair(mesh, mesh); }

}  // namespace

TEST_CASE("ConstantField: shell profile") {
  const ConstantField field({1, 0, 0}, 200.0, 0.02);
  const RadianceSample in = field.eval(query_at({0, 0, 0}, 0.01));
  CHECK(in.color == Vec3{1, 0, 0});
  CHECK(in.density == 200.0);
  CHECK(field.eval(query_at({0, 0, 0}, -0.015)).density == 200.0);
  CHECK(field.eval(query_at({0, 0, 0}, 0.05)).density == 0.0);
  CHECK_THROWS_AS(ConstantField({1, 0, 0}, -1.0, 0.02), std::invalid_argument);
}

TEST_CASE("CheckerShellField: parity flips across one period") {
  const CheckerShellField field(0.25, 0.05, 100.0);
  const RadianceSample a = field.eval(query_at({0.1, 0.1, 0.1}, 0.0));
  const RadianceSample b = field.eval(query_at({0.35, 0.1, 0.1}, 0.0));
  CHECK(dist(a.color, b.color) > 0.5);
  CHECK(CheckerShellField::parity({0.1, 0.1, 0.1}, 0.25) !=
        CheckerShellField::parity({0.35, 0.1, 0.1}, 0.25));
}

TEST_CASE("HeightRampField: gray encodes the height") {
  const HeightRampField field(0.2, 10.0);
  CHECK(field.eval(query_at({0, 0, 0}, -0.2)).color.x == doctest::Approx(0.0));
  CHECK(field.eval(query_at({0, 0, 0}, 0.0)).color.x == doctest::Approx(0.5));
  CHECK(field.eval(query_at({0, 0, 0}, 0.2)).color.x == doctest::Approx(1.0));
  CHECK(field.eval(query_at({0, 0, 0}, 0.3)).density == 0.0);
}

TEST_CASE("CompositeField: construction-time label validation and routing") {
  auto red = std::make_shared<ConstantField>(Vec3{1, 0, 0}, 100.0, 0.1);
  auto blue = std::make_shared<ConstantField>(Vec3{0, 0, 1}, 100.0, 0.1);

  CHECK_THROWS_AS(CompositeField({red, blue}, CategoryMap{{0, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(CompositeField({}, CategoryMap{{0}}), std::invalid_argument);

  const CompositeField composite({red, blue}, CategoryMap{{0, 1, 1}});
  CHECK(composite.eval(query_at({0, 0, 0}, 0.0, 0)).color == Vec3{1, 0, 0});
  CHECK(composite.eval(query_at({0, 0, 0}, 0.0, 2)).color == Vec3{0, 0, 1});
  CHECK_THROWS_AS(composite.eval(query_at({0, 0, 0}, 0.0, 7)), std::invalid_argument);

  // One category everywhere behaves exactly like the underlying field.
  const CompositeField single({red}, CategoryMap{{0, 0, 0}});
  for (double h : {0.0, 0.05, 0.2}) {
    const FieldQuery q = query_at({0.3, 0.1, -0.2}, h, 1);
    CHECK(single.eval(q).density == eval_field(*red, q).density);
    CHECK(single.eval(q).color == eval_field(*red, q).color);
  }
}

TEST_CASE("composite_ray: empty, opaque and hand-computed cases") {
  const Vec3 bg{0.2, 0.3, 0.4};

  std::vector<RaySample> empty(5, RaySample{{{0.5, 0.5, 0.5}, 0.0}, 0.1});
  const RayResult r0 = composite_ray(empty, bg);
  CHECK(r0.color == bg);
  CHECK(r0.opacity == 0.0);
  CHECK(r0.transmittance == 1.0);

  std::vector<RaySample> opaque{{{{0.1, 0.7, 0.3}, 500.0}, 0.1}};  // sigma * delta = 50
  const RayResult r1 = composite_ray(opaque, bg);
  CHECK(dist(r1.color, {0.1, 0.7, 0.3}) < 1e-20);
  CHECK(r1.opacity == doctest::Approx(1.0).epsilon(1e-12));

  // T after the first sample is exp(-ln 2) = 1/2, the second absorbs the rest.
  const double ln2 = std::log(2.0);
  std::vector<RaySample> pair{{{{1, 1, 1}, ln2}, 1.0}, {{{0, 0, 0}, 5000.0}, 1.0}};
  const RayResult r2 = composite_ray(pair, {0, 0, 0});
  CHECK(r2.color.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r2.opacity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("composite_ray: opacity and transmittance always sum to one") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<RaySample> samples(64);
    for (auto& s : samples) {
      s.radiance.color = {uniform01(rng), uniform01(rng), uniform01(rng)};
      s.radiance.density = uniform01(rng) < 0.3 ? 0.0 : 300.0 * uniform01(rng);
      s.delta = 0.001 + 0.05 * uniform01(rng);
    }
    const RayResult r = composite_ray(samples, {1, 1, 1});
    CHECK(std::abs(r.opacity + r.transmittance - 1.0) <= 1e-12);
  }
}

TEST_CASE("look_at_camera: orientation sanity") {
  const Camera cam = look_at_camera({3, 0, 0}, {0, 0, 0}, {0, 0, 1}, 90.0, 96, 96);
  CHECK(determinant(cam.rotation) == doctest::Approx(1.0).epsilon(1e-12));
  const Vec3 center = cam.pixel_direction(47.5, 47.5);
  CHECK(dist(center, {-1, 0, 0}) < 1e-12);  // straight at the target
  // +x in image space is world +y, +y in image space is world -z
  CHECK(cam.pixel_direction(95.5, 47.5).y > 0.0);
  CHECK(cam.pixel_direction(47.5, 95.5).z < 0.0);
}

TEST_CASE("render: camera pointed away gives a uniform background image") {
  const MeshPair pair = identity_pair(make_icosphere(1));
  const Bvh bvh = build_bvh(pair.posed);
  const ConstantField field({1, 0, 0}, 1000.0, 0.05);
  const Camera cam = look_at_camera({3, 0, 0}, {6, 0, 0}, {0, 0, 1}, 60.0, 32, 32);
  RenderConfig cfg;
  cfg.samples_per_ray = 16;
  cfg.background = {0.1, 0.2, 0.3};
  const RenderResult result = render(pair, bvh, field, cam, cfg);
  for (const Vec3& p : result.image.pixels) CHECK(p == cfg.background);
  CHECK(result.mean_opacity == 0.0);
  CHECK(result.fallback_count == 0);
}

TEST_CASE("render: defaults, config validation") {
  CHECK(RenderConfig{}.samples_per_ray == 64);
  CHECK(RenderConfig{}.h0 == 0.2);

  const MeshPair pair = identity_pair(make_icosphere(1));
  const Bvh bvh = build_bvh(pair.posed);
  const ConstantField field({1, 0, 0}, 1000.0, 0.05);
  const Camera cam = look_at_camera({3, 0, 0}, {0, 0, 0}, {0, 0, 1}, 60.0, 8, 8);
  RenderConfig bad;
  bad.samples_per_ray = 1;
  CHECK_THROWS_AS(render(pair, bvh, field, cam, bad), std::invalid_argument);
  bad = RenderConfig{};
  bad.h0 = 0.0;
  CHECK_THROWS_AS(render(pair, bvh, field, cam, bad), std::invalid_argument);
  bad = RenderConfig{};
  bad.near_plane = 3.0;
  bad.far_plane = 2.0;
  CHECK_THROWS_AS(render(pair, bvh, field, cam, bad), std::invalid_argument);
}

TEST_CASE("render: deterministic across runs and thread counts") {
  const MeshPair pair = identity_pair(make_icosphere(1));
  const Bvh bvh = build_bvh(pair.posed);
  const CheckerShellField field(0.25, 0.05, 2000.0);
  const Camera cam = look_at_camera({3, 0.2, 0.1}, {0, 0, 0}, {0, 0, 1}, 40.0, 40, 40);
  RenderConfig cfg;
  cfg.samples_per_ray = 24;
  cfg.seed = 9;

  const RenderResult a = render(pair, bvh, field, cam, cfg);
  cfg.threads = 1;
  const RenderResult b = render(pair, bvh, field, cam, cfg);
  CHECK(encode_ppm(a.image) == encode_ppm(b.image));
  CHECK(a.energy_max_err <= 1e-12);
  CHECK(b.energy_max_err <= 1e-12);

  cfg.seed = 10;  // different jitter, different bytes somewhere
  cfg.threads = 0;
  const RenderResult c = render(pair, bvh, field, cam, cfg);
  CHECK(encode_ppm(a.image) != encode_ppm(c.image));
}

TEST_CASE("render: opacity never decreases when h0 grows") {
  const MeshPair pair = identity_pair(make_icosphere(1));
  const Bvh bvh = build_bvh(pair.posed);
  const ConstantField field({0.9, 0.9, 0.9}, 40.0, 0.25);
  const Camera cam = look_at_camera({3, 0, 0}, {0, 0, 0}, {0, 0, 1}, 40.0, 24, 24);
  RenderConfig cfg;
  cfg.samples_per_ray = 32;
  // fixed sampling range so the same strata are evaluated for every h0
  cfg.near_plane = 1.0;
  cfg.far_plane = 5.0;
  std::vector<double> previous;
  for (const double h0 : {0.05, 0.1, 0.2, 0.3}) {
    cfg.h0 = h0;
    const RenderResult r = render(pair, bvh, field, cam, cfg);
    if (!previous.empty()) {
      for (size_t i = 0; i < r.opacity.size(); ++i)
        CHECK(r.opacity[i] >= previous[i] - 1e-12);
    }
    previous = r.opacity;
  }
}

TEST_CASE("render: truncated shell still saturates through the remaining band") {
  const MeshPair pair = identity_pair(make_icosphere(2));
  const Bvh bvh = build_bvh(pair.posed);
  const ConstantField field({1, 0.3, 0.2}, 5000.0, 0.05);
  const Camera cam = look_at_camera({3, 0, 0}, {0, 0, 0}, {0, 0, 1}, 90.0, 48, 48);
  RenderConfig cfg;
  cfg.h0 = 0.025;  // below the shell thickness: outer half of the shell is culled
  const RenderResult r = render(pair, bvh, field, cam, cfg);
  const double center = r.opacity[24 * 48 + 24];
  CHECK(center > 0.99);
}

TEST_CASE("render: view direction does not leak into procedural fields") {
  const MeshPair pair = identity_pair(make_icosphere(2));
  const Bvh bvh = build_bvh(pair.posed);
  const ConstantField field({0.8, 0.4, 0.1}, 5000.0, 0.05);
  RenderConfig cfg;
  cfg.samples_per_ray = 32;

  std::vector<Vec3> centers;
  for (const double angle : {0.0, 1.1, 2.3}) {
    const Vec3 eye{3.0 * std::cos(angle), 3.0 * std::sin(angle), 0.0};
    const Camera cam = look_at_camera(eye, {0, 0, 0}, {0, 0, 1}, 60.0, 33, 33);
    const RenderResult r = render(pair, bvh, field, cam, cfg);
    centers.push_back(r.image.at(16, 16));
  }
  for (size_t i = 1; i < centers.size(); ++i) {
    CHECK(std::abs(centers[i].x - centers[0].x) < 0.02);
    CHECK(std::abs(centers[i].y - centers[0].y) < 0.02);
    CHECK(std::abs(centers[i].z - centers[0].z) < 0.02);
  }
}

TEST_CASE("render: two-category sphere routes by hemisphere") {
  const TriMesh ico = make_icosphere(2);
  const MeshPair pair = identity_pair(ico);
  const Bvh bvh = build_bvh(pair.posed);

  CategoryMap categories;
  categories.labels.resize(ico.face_count());
  for (int f = 0; f < ico.face_count(); ++f) {
    const auto p = ico.face_points(f);
    categories.labels[f] = ((p[0].z + p[1].z + p[2].z) / 3.0 >= 0.0) ? 1 : 0;
  }
  auto red = std::make_shared<ConstantField>(Vec3{1, 0, 0}, 5000.0, 0.05);
  auto blue = std::make_shared<ConstantField>(Vec3{0, 0, 1}, 5000.0, 0.05);
  const CompositeField composite({red, blue}, categories);

  const Camera cam = look_at_camera({3, 0, 0}, {0, 0, 0}, {0, 0, 1}, 60.0, 48, 48);
  RenderConfig cfg;
  const RenderResult r = render(pair, bvh, composite, cam, cfg);

  // Well above / below the equator line the color class must match.
  const Vec3 top = r.image.at(24, 10);
  const Vec3 bottom = r.image.at(24, 38);
  CHECK(r.opacity[10 * 48 + 24] > 0.99);
  CHECK(r.opacity[38 * 48 + 24] > 0.99);
  CHECK(top.z > top.x);     // upper hemisphere is blue (image y is down)
  CHECK(bottom.x > bottom.z);
}

TEST_CASE("PPM encoding is bit-stable") {
  Image img(2, 1);
  img.at(0, 0) = {0.0, 0.5, 1.0};
  img.at(1, 0) = {1.1, -0.2, 0.25};
  const auto bytes = encode_ppm(img);
  const std::string header = "P6\n2 1\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(std::equal(header.begin(), header.end(), bytes.begin()));
  CHECK(bytes[header.size() + 0] == 0);
  CHECK(bytes[header.size() + 1] == 128);  // round(0.5 * 255)
  CHECK(bytes[header.size() + 2] == 255);
  CHECK(bytes[header.size() + 3] == 255);  // clamped
  CHECK(bytes[header.size() + 4] == 0);    // clamped
  CHECK(bytes[header.size() + 5] == 64);   // round(0.25 * 255)
}
