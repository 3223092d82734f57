#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "saf/meshgen.hpp"
#include "saf/parallel.hpp"
#include "saf/renderfield.hpp"
#include "saf/samplers.hpp"
#include "saf/surfcoord.hpp"

using json = nlohmann::json;
using namespace saf;

namespace {

// Exit codes: 0 success, 1 I/O or parse failure, 2 semantic failure
// (validation findings, topology/config mismatches).
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitSemantic = 2;

struct exit_with : std::runtime_error {
  int code;
  exit_with(int c, const std::string& message) : std::runtime_error(message), code(c) {}
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TriMesh load_mesh_or_fail(const std::string& path) {
  try {
    return load_obj_file(path);
  } catch (const std::exception& e) {
    throw exit_with(kExitIo, std::string("cannot load '") + path + "': " + e.what());
  }
}

TriMesh load_validated_mesh(const std::string& path) {
  TriMesh mesh = load_mesh_or_fail(path);
  const ValidationReport report = validate(mesh);
  if (!report.clean())
    throw exit_with(kExitSemantic, "mesh '" + path + "' fails validation: " + report.to_json());
  return mesh;
}

MeshPair load_pair(const std::string& posed_path, const std::string& canonical_path) {
  TriMesh posed = load_validated_mesh(posed_path);
  TriMesh canonical = load_mesh_or_fail(canonical_path);
  try {
    return make_mesh_pair(std::move(posed), std::move(canonical));
  } catch (const mesh_error& e) {
    throw exit_with(kExitSemantic, e.what());
  }
}

std::vector<Vec3> load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw exit_with(kExitIo, "cannot open points file '" + path + "'");
  std::vector<Vec3> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    Vec3 p;
    char sep1 = 0, sep2 = 0;
    std::istringstream ss(line);
    if (!(ss >> p.x >> sep1 >> p.y >> sep2 >> p.z) || sep1 != ',' || sep2 != ',')
      throw exit_with(kExitIo, "points file '" + path + "' line " + std::to_string(line_no) +
                                   ": expected 'x,y,z'");
    points.push_back(p);
  }
  return points;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& mesh_path) {
  const TriMesh mesh = load_mesh_or_fail(mesh_path);
  const ValidationReport report = validate(mesh);
  std::cout << report.to_json() << '\n';
  return report.clean() ? kExitOk : kExitSemantic;
}

int cmd_project(const std::string& posed_path, const std::string& canonical_path,
                const std::string& points_path, const std::string& method) {
  const MeshPair pair = load_pair(posed_path, canonical_path);
  const Bvh bvh = build_bvh(pair.posed);
  const Projector projector(pair.posed, bvh);
  const std::vector<Vec3> points = load_points_csv(points_path);

  // batches run in parallel; output rows keep input order
  std::vector<std::string> rows(points.size());
  parallel_for(static_cast<int>(points.size()), 0, [&](int i) {
    const Vec3& x = points[i];
    SurfacePoint sp;
    double height = 0.0;
    bool fallback = false;
    if (method == "nearest") {
      double d2 = 0.0;
      sp = nearest_surface_point(bvh, pair.posed, x, &d2);
      const double d = std::sqrt(d2);
      height = side_with_nearest(pair.posed, x, sp, d) == Side::Inside ? -d : d;
    } else {
      const ProjectionResult r = projector.project(x);
      sp = r.surface;
      height = r.height;
      fallback = r.fallback;
    }
    const Vec3 canonical = canonical_point(pair, sp.face, sp.bary);
    std::ostringstream row;
    row << fmt17(x.x) << ',' << fmt17(x.y) << ',' << fmt17(x.z) << ',' << sp.face << ','
        << fmt17(sp.bary[0]) << ',' << fmt17(sp.bary[1]) << ',' << fmt17(sp.bary[2]) << ','
        << fmt17(canonical.x) << ',' << fmt17(canonical.y) << ',' << fmt17(canonical.z) << ','
        << fmt17(height) << ',' << (fallback ? 1 : 0);
    rows[i] = row.str();
  });
  for (const std::string& row : rows) std::cout << row << '\n';
  return kExitOk;
}

int cmd_roundtrip(const std::string& posed_path, const std::string& canonical_path, int count,
                  std::uint64_t seed) {
  const MeshPair pair = load_pair(posed_path, canonical_path);
  const Bvh bvh = build_bvh(pair.posed);
  const Projector projector(pair.posed, bvh);

  double max_error = 0.0, error_sum = 0.0;
  long long included = 0, excluded = 0, fallbacks = 0;
  if (count > 0) {
    const std::vector<Vec3> points = sample_shell(pair.posed, bvh, -0.1, 0.2, count, seed);
    // -1: fallback, -2: excluded, >= 0: round-trip error
    std::vector<double> errors(points.size());
    parallel_for(static_cast<int>(points.size()), 0, [&](int i) {
      const ProjectionResult r = projector.project(points[i]);
      if (r.fallback) {
        errors[i] = -1.0;
        return;
      }
      const double min_bary = std::min({r.surface.bary[0], r.surface.bary[1], r.surface.bary[2]});
      if (min_bary < kBaryEps * 10) {
        errors[i] = -2.0;
        return;
      }
      const Vec3 back = projector.unproject(r.surface.face, r.surface.bary, r.height);
      errors[i] = dist(back, points[i]);
    });
    for (const double err : errors) {
      if (err == -1.0) {
        ++fallbacks;
      } else if (err == -2.0) {
        ++excluded;
      } else {
        max_error = std::max(max_error, err);
        error_sum += err;
        ++included;
      }
    }
  }
  json out;
  out["n"] = count;
  out["max_error"] = max_error;
  out["mean_error"] = included > 0 ? error_sum / included : 0.0;
  out["excluded_count"] = excluded;
  out["fallback_count"] = fallbacks;
  std::cout << out.dump() << '\n';
  return kExitOk;
}

json method_stats(const std::vector<double>& min_barys) {
  constexpr int kBins = 24;
  std::vector<int> histogram(kBins, 0);
  int below_1e3 = 0, below_1e2 = 0;
  for (const double m : min_barys) {
    if (m < 1e-3) ++below_1e3;
    if (m < 1e-2) ++below_1e2;
    const int bin = std::clamp(static_cast<int>(m * 3.0 * kBins), 0, kBins - 1);
    ++histogram[bin];
  }
  const double n = static_cast<double>(std::max<size_t>(1, min_barys.size()));
  json out;
  out["frac_min_bary_lt_1e-3"] = below_1e3 / n;
  out["frac_min_bary_lt_1e-2"] = below_1e2 / n;
  out["histogram_bins"] = kBins;
  out["histogram_range"] = {0.0, 1.0 / 3.0};
  out["histogram"] = histogram;
  return out;
}

int cmd_stats(const std::string& posed_path, double height, int count, std::uint64_t seed) {
  const TriMesh mesh = load_validated_mesh(posed_path);
  const Bvh bvh = build_bvh(mesh);
  const Projector projector(mesh, bvh);

  std::vector<double> nearest_min, dispersed_min;
  if (count > 0) {
    const std::vector<Vec3> points = sample_offset_surface(mesh, bvh, height, count, seed);
    nearest_min.resize(points.size());
    dispersed_min.resize(points.size());
    parallel_for(static_cast<int>(points.size()), 0, [&](int i) {
      const SurfacePoint np = nearest_surface_point(bvh, mesh, points[i]);
      nearest_min[i] = std::min({np.bary[0], np.bary[1], np.bary[2]});
      const ProjectionResult r = projector.project(points[i]);
      dispersed_min[i] = std::min({r.surface.bary[0], r.surface.bary[1], r.surface.bary[2]});
    });
  }
  json out;
  out["mesh"] = posed_path;
  out["n"] = count;
  out["h"] = height;
  out["sampler"] = "offset_surface";
  out["nearest"] = method_stats(nearest_min);
  out["dispersed"] = method_stats(dispersed_min);
  std::cout << out.dump() << '\n';
  return kExitOk;
}

Camera load_camera(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw exit_with(kExitIo, "cannot open camera file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw exit_with(kExitIo, std::string("camera JSON: ") + e.what());
  }
  try {
    Camera cam;
    cam.fx = doc.at("fx").get<double>();
    cam.fy = doc.at("fy").get<double>();
    cam.cx = doc.at("cx").get<double>();
    cam.cy = doc.at("cy").get<double>();
    cam.width = doc.at("width").get<int>();
    cam.height = doc.at("height").get<int>();
    const auto m = doc.at("world_from_camera").get<std::vector<double>>();
    if (m.size() != 12)
      throw exit_with(kExitSemantic, "world_from_camera must hold 12 numbers (3x4 row-major)");
    cam.rotation = Mat3::from_rows({m[0], m[1], m[2]}, {m[4], m[5], m[6]}, {m[8], m[9], m[10]});
    cam.position = {m[3], m[7], m[11]};
    if (cam.width <= 0 || cam.height <= 0 || cam.fx == 0.0 || cam.fy == 0.0)
      throw exit_with(kExitSemantic, "camera has empty image or zero focal length");
    return cam;
  } catch (const json::exception& e) {
    throw exit_with(kExitIo, std::string("camera JSON: ") + e.what());
  }
}

Vec3 json_color(const json& arr) {
  if (!arr.is_array() || arr.size() != 3)
    throw exit_with(kExitSemantic, "color must be an [r, g, b] array");
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

std::shared_ptr<const Field> parse_field(const json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  try {
    if (type == "constant") {
      return std::make_shared<ConstantField>(json_color(spec.at("color")),
                                             spec.at("sigma").get<double>(),
                                             spec.at("tau").get<double>());
    }
    if (type == "checker") {
      const Vec3 even =
          spec.contains("color_a") ? json_color(spec["color_a"]) : Vec3{0.92, 0.92, 0.92};
      const Vec3 odd =
          spec.contains("color_b") ? json_color(spec["color_b"]) : Vec3{0.08, 0.08, 0.08};
      return std::make_shared<CheckerShellField>(spec.at("period").get<double>(),
                                                 spec.at("tau").get<double>(),
                                                 spec.at("sigma").get<double>(), even, odd);
    }
    if (type == "height_ramp") {
      return std::make_shared<HeightRampField>(spec.at("range").get<double>(),
                                               spec.at("sigma").get<double>());
    }
  } catch (const std::invalid_argument& e) {
    throw exit_with(kExitSemantic, std::string("field spec: ") + e.what());
  }
  throw exit_with(kExitSemantic, "unknown field type '" + type + "'");
}

std::shared_ptr<const Field> load_field_spec(const std::string& path, int face_count) {
  std::ifstream in(path);
  if (!in) throw exit_with(kExitIo, "cannot open field spec '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw exit_with(kExitIo, std::string("field spec JSON: ") + e.what());
  }
  try {
    std::vector<std::shared_ptr<const Field>> fields;
    for (const json& f : doc.at("fields")) fields.push_back(parse_field(f));
    if (fields.empty()) throw exit_with(kExitSemantic, "field spec: no fields given");

    if (doc.contains("categories")) {
      const std::string labels_path = doc["categories"].get<std::string>();
      std::ifstream labels_in(labels_path);
      if (!labels_in) throw exit_with(kExitIo, "cannot open labels file '" + labels_path + "'");
      CategoryMap categories;
      int label = 0;
      while (labels_in >> label) categories.labels.push_back(label);
      if (static_cast<int>(categories.labels.size()) != face_count)
        throw exit_with(kExitSemantic, "label count " + std::to_string(categories.labels.size()) +
                                           " does not match face count " +
                                           std::to_string(face_count));
      try {
        return std::make_shared<CompositeField>(std::move(fields), std::move(categories));
      } catch (const std::invalid_argument& e) {
        throw exit_with(kExitSemantic, e.what());
      }
    }
    if (fields.size() != 1)
      throw exit_with(kExitSemantic, "multiple fields need a 'categories' labels file");
    return fields[0];
  } catch (const json::exception& e) {
    throw exit_with(kExitIo, std::string("field spec JSON: ") + e.what());
  }
}

int cmd_render(const std::string& posed_path, const std::string& canonical_path,
               const std::string& camera_path, const std::string& field_path,
               const std::string& out_path, int samples, double h0, std::uint64_t seed,
               const std::vector<double>& background) {
  const MeshPair pair = load_pair(posed_path, canonical_path);
  const Bvh bvh = build_bvh(pair.posed);
  const Camera camera = load_camera(camera_path);
  const auto field = load_field_spec(field_path, pair.posed.face_count());

  RenderConfig cfg;
  cfg.samples_per_ray = samples;
  cfg.h0 = h0;
  cfg.seed = seed;
  if (!background.empty()) {
    if (background.size() != 3) throw exit_with(kExitSemantic, "--background needs r g b");
    cfg.background = {background[0], background[1], background[2]};
  }

  RenderResult result;
  try {
    result = render(pair, bvh, *field, camera, cfg);
  } catch (const std::invalid_argument& e) {
    throw exit_with(kExitSemantic, e.what());
  }
  try {
    write_ppm_file(result.image, out_path);
  } catch (const std::exception& e) {
    throw exit_with(kExitIo, e.what());
  }

  json stats;
  stats["out"] = out_path;
  stats["width"] = camera.width;
  stats["height"] = camera.height;
  stats["fallback_count"] = result.fallback_count;
  stats["mean_opacity"] = result.mean_opacity;
  stats["energy_max_err"] = result.energy_max_err;
  std::cout << stats.dump() << '\n';
  return kExitOk;
}

int cmd_gen(const std::string& kind, const std::string& out_path, int subdiv, double radius,
            int grid, int nu, int nv, double major_radius, double minor_radius,
            const std::string& hemi_labels) {
  TriMesh mesh;
  if (kind == "cube")
    mesh = make_cube();
  else if (kind == "gridcube")
    mesh = make_grid_cube(grid);
  else if (kind == "icosphere")
    mesh = make_icosphere(subdiv, radius);
  else if (kind == "torus")
    mesh = make_torus(nu, nv, major_radius, minor_radius);
  else
    throw exit_with(kExitSemantic, "unknown mesh kind '" + kind + "'");
  try {
    save_obj_file(mesh, out_path);
  } catch (const std::exception& e) {
    throw exit_with(kExitIo, e.what());
  }
  if (!hemi_labels.empty()) {
    std::ofstream out(hemi_labels);
    if (!out) throw exit_with(kExitIo, "cannot open '" + hemi_labels + "' for writing");
    for (int f = 0; f < mesh.face_count(); ++f) {
      const auto p = mesh.face_points(f);
      out << (((p[0].z + p[1].z + p[2].z) / 3.0 >= 0.0) ? 1 : 0) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surface-aligned projection and rendering toolkit"};
  app.require_subcommand(1);

  std::string mesh_path, posed_path, canonical_path, points_path, camera_path, field_path;
  std::string out_path = "out.ppm";
  std::string method = "dispersed";
  std::string kind, hemi_labels;
  int count = 10000, samples = 64, subdiv = 1, grid = 8, nu = 32, nv = 16;
  double height = 0.05, h0 = 0.2, radius = 1.0, major_radius = 1.0, minor_radius = 0.4;
  std::uint64_t seed = 0;
  std::vector<double> background;

  CLI::App* validate_cmd = app.add_subcommand("validate", "check mesh assumptions, report JSON");
  validate_cmd->add_option("mesh", mesh_path)->required();

  CLI::App* project_cmd =
      app.add_subcommand("project", "project points to surface coordinates (CSV out)");
  project_cmd->add_option("posed", posed_path)->required();
  project_cmd->add_option("canonical", canonical_path)->required();
  project_cmd->add_option("points", points_path)->required();
  project_cmd->add_option("--method", method)->check(CLI::IsMember({"dispersed", "nearest"}));

  CLI::App* roundtrip_cmd =
      app.add_subcommand("roundtrip", "sample the shell and measure inverse-map error");
  roundtrip_cmd->add_option("posed", posed_path)->required();
  roundtrip_cmd->add_option("canonical", canonical_path)->required();
  roundtrip_cmd->add_option("--n", count);
  roundtrip_cmd->add_option("--seed", seed);

  CLI::App* stats_cmd =
      app.add_subcommand("stats", "min-barycentric statistics for both projection methods");
  stats_cmd->set_help_flag("--help", "print help");  // frees -h for the height option
  stats_cmd->add_option("posed", posed_path)->required();
  stats_cmd->add_option("--h", height);
  stats_cmd->add_option("--n", count);
  stats_cmd->add_option("--seed", seed);

  CLI::App* render_cmd = app.add_subcommand("render", "volume-render a procedural field");
  render_cmd->add_option("posed", posed_path)->required();
  render_cmd->add_option("canonical", canonical_path)->required();
  render_cmd->add_option("camera", camera_path)->required();
  render_cmd->add_option("fields", field_path)->required();
  render_cmd->add_option("--out", out_path);
  render_cmd->add_option("--samples", samples);
  render_cmd->add_option("--h0", h0);
  render_cmd->add_option("--seed", seed);
  render_cmd->add_option("--background", background)->expected(3);

  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a test mesh OBJ");
  gen_cmd->add_option("kind", kind)->required()->check(
      CLI::IsMember({"cube", "gridcube", "icosphere", "torus"}));
  gen_cmd->add_option("--out", out_path)->required();
  gen_cmd->add_option("--subdiv", subdiv);
  gen_cmd->add_option("--radius", radius);
  gen_cmd->add_option("--grid", grid);
  gen_cmd->add_option("--nu", nu);
  gen_cmd->add_option("--nv", nv);
  gen_cmd->add_option("--major", major_radius);
  gen_cmd->add_option("--minor", minor_radius);
  gen_cmd->add_option("--hemi-labels", hemi_labels,
                      "also write per-face hemisphere labels (0/1 by centroid z)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return cmd_validate(mesh_path);
    if (project_cmd->parsed()) return cmd_project(posed_path, canonical_path, points_path, method);
    if (roundtrip_cmd->parsed()) return cmd_roundtrip(posed_path, canonical_path, count, seed);
    if (stats_cmd->parsed()) return cmd_stats(posed_path, height, count, seed);
    if (render_cmd->parsed())
      return cmd_render(posed_path, canonical_path, camera_path, field_path, out_path, samples,
                        h0, seed, background);
    if (gen_cmd->parsed())
      return cmd_gen(kind, out_path, subdiv, radius, grid, nu, nv, major_radius, minor_radius,
                     hemi_labels);
  } catch (const exit_with& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const mesh_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSemantic;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
