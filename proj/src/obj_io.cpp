#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "saf/mesh.hpp"

namespace saf {

namespace {

struct ObjCorner {
  int vertex = 0;  // 1-based
  int normal = 0;  // 1-based, 0 when absent
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw io_error("OBJ parse error at line " + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& tok, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(tok, &pos);
    return pos == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(std::string_view tok, int& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

// Accepts `i`, `i/t`, `i//n`, `i/t/n`; texture indices are ignored.
ObjCorner parse_corner(const std::string& tok, int line) {
  ObjCorner corner;
  const size_t s1 = tok.find('/');
  if (s1 == std::string::npos) {
    if (!parse_int(tok, corner.vertex)) parse_fail(line, "bad face index '" + tok + "'");
    return corner;
  }
  if (!parse_int(std::string_view(tok).substr(0, s1), corner.vertex))
    parse_fail(line, "bad face index '" + tok + "'");
  const size_t s2 = tok.find('/', s1 + 1);
  if (s2 == std::string::npos) return corner;  // i/t
  const std::string_view ntok = std::string_view(tok).substr(s2 + 1);
  if (!ntok.empty() && !parse_int(ntok, corner.normal))
    parse_fail(line, "bad normal index '" + tok + "'");
  return corner;
}

}  // namespace

TriMesh load_obj(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Vec3> file_normals;
  std::vector<Face> faces;
  std::vector<std::array<int, 3>> normal_refs;  // per face, 0 when absent

  std::string line_text;
  int line = 0;
  bool any_normal_ref = false;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ss(line_text);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v" || tag == "vn") {
      std::string sx, sy, sz;
      if (!(ss >> sx >> sy >> sz)) parse_fail(line, "expected three coordinates");
      Vec3 p;
      if (!parse_double(sx, p.x) || !parse_double(sy, p.y) || !parse_double(sz, p.z))
        parse_fail(line, "bad coordinate");
      (tag == "v" ? vertices : file_normals).push_back(p);
    } else if (tag == "f") {
      std::vector<ObjCorner> corners;
      std::string tok;
      while (ss >> tok) corners.push_back(parse_corner(tok, line));
      if (corners.size() < 3) parse_fail(line, "face needs at least three indices");
      for (ObjCorner& c : corners) {
        if (c.vertex <= 0) parse_fail(line, "face indices must be positive");
        if (c.normal < 0) parse_fail(line, "normal indices must be positive");
        if (c.normal > 0) any_normal_ref = true;
      }
      for (size_t k = 2; k < corners.size(); ++k) {  // fan triangulation
        faces.push_back({corners[0].vertex - 1, corners[k - 1].vertex - 1, corners[k].vertex - 1});
        normal_refs.push_back({corners[0].normal, corners[k - 1].normal, corners[k].normal});
      }
    }
    // all other record types ignored
  }

  std::vector<Vec3> vertex_normals;
  if (any_normal_ref) {
    vertex_normals.assign(vertices.size(), Vec3{0, 0, 0});
    for (size_t f = 0; f < faces.size(); ++f) {
      for (int s = 0; s < 3; ++s) {
        const int n = normal_refs[f][s];
        if (n == 0) continue;
        if (n > static_cast<int>(file_normals.size()))
          throw mesh_error("face normal reference " + std::to_string(n) + " of " +
                           std::to_string(file_normals.size()));
        vertex_normals[faces[f][s]] = file_normals[n - 1];
      }
    }
    for (const Vec3& n : vertex_normals)
      if (n == Vec3{0, 0, 0}) throw mesh_error("not every vertex received a normal reference");
  } else if (!file_normals.empty() && file_normals.size() == vertices.size()) {
    // vn records without references: positional mapping.
    vertex_normals = file_normals;
  }

  return make_mesh(std::move(vertices), std::move(faces), std::move(vertex_normals));
}

TriMesh load_obj_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  return load_obj(in);
}

void save_obj(const TriMesh& mesh, std::ostream& out) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const Vec3& n : mesh.vertex_normals) {
    std::snprintf(buf, sizeof buf, "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
    out << buf;
  }
  for (const Face& f : mesh.faces) {
    std::snprintf(buf, sizeof buf, "f %d//%d %d//%d %d//%d\n", f[0] + 1, f[0] + 1, f[1] + 1,
                  f[1] + 1, f[2] + 1, f[2] + 1);
    out << buf;
  }
}

void save_obj_file(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  save_obj(mesh, out);
  if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace saf
