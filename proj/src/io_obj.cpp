#include "retarget/io_obj.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace retarget {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view tok, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError("expected a number, found '" + std::string(tok) + "'", line);
  return v;
}

long parse_long(std::string_view tok, int line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("expected an index, found '" + std::string(tok) + "'", line);
  return v;
}

// Resolves 1-based or negative-relative OBJ indices to 0-based.
int resolve_index(long idx, size_t count, int line) {
  long resolved = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(count))
    throw ParseError("face index out of range", line);
  return static_cast<int>(resolved);
}

struct FaceCorner {
  int vertex;
  int normal;  // -1 when absent
};

FaceCorner parse_corner(std::string_view tok, size_t v_count, size_t n_count, int line) {
  FaceCorner corner{-1, -1};
  size_t first = tok.find('/');
  if (first == std::string_view::npos) {
    corner.vertex = resolve_index(parse_long(tok, line), v_count, line);
    return corner;
  }
  corner.vertex = resolve_index(parse_long(tok.substr(0, first), line), v_count, line);
  std::string_view rest = tok.substr(first + 1);
  size_t second = rest.find('/');
  if (second == std::string_view::npos) return corner;  // v/vt
  std::string_view vn = rest.substr(second + 1);
  if (!vn.empty()) corner.normal = resolve_index(parse_long(vn, line), n_count, line);
  return corner;
}

}  // namespace

ObjData parse_obj(std::string_view text) {
  ObjData data;
  std::vector<Vec3> file_normals;
  std::vector<Vec3> vertex_normal_sum;
  bool any_face_normals = false;

  size_t pos = 0;
  int line_number = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_number;

    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].starts_with('#')) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw ParseError("vertex record needs three coordinates", line_number);
      data.vertices.push_back({parse_double(tokens[1], line_number),
                               parse_double(tokens[2], line_number),
                               parse_double(tokens[3], line_number)});
      vertex_normal_sum.push_back({});
    } else if (tokens[0] == "vn") {
      if (tokens.size() < 4) throw ParseError("normal record needs three coordinates", line_number);
      file_normals.push_back({parse_double(tokens[1], line_number),
                              parse_double(tokens[2], line_number),
                              parse_double(tokens[3], line_number)});
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4 || tokens.size() > 5)
        throw ParseError("faces must be triangles or quads", line_number);
      FaceCorner corners[4];
      int n = static_cast<int>(tokens.size()) - 1;
      for (int i = 0; i < n; ++i)
        corners[i] = parse_corner(tokens[i + 1], data.vertices.size(), file_normals.size(), line_number);
      for (int tri = 0; tri < n - 2; ++tri) {
        const FaceCorner fan[3] = {corners[0], corners[tri + 1], corners[tri + 2]};
        data.faces.push_back({fan[0].vertex, fan[1].vertex, fan[2].vertex});
        for (const FaceCorner& c : fan) {
          if (c.normal >= 0) {
            vertex_normal_sum[c.vertex] += file_normals[c.normal];
            any_face_normals = true;
          }
        }
      }
    } else if (tokens[0] == "vt" || tokens[0] == "g" || tokens[0] == "o" || tokens[0] == "s" ||
               tokens[0] == "usemtl" || tokens[0] == "mtllib") {
      // Ignored.
    } else {
      throw ParseError("unknown record '" + std::string(tokens[0]) + "'", line_number);
    }
  }

  if (data.vertices.empty()) throw ParseError("no vertices found", line_number);

  if (!any_face_normals) {
    // Area-weighted face normals accumulated onto vertices.
    for (const auto& f : data.faces) {
      Vec3 n = cross(data.vertices[f[1]] - data.vertices[f[0]], data.vertices[f[2]] - data.vertices[f[0]]);
      for (int idx : f) vertex_normal_sum[idx] += n;
    }
  }
  data.normals.resize(data.vertices.size());
  for (size_t i = 0; i < data.vertices.size(); ++i) {
    double n = norm(vertex_normal_sum[i]);
    data.normals[i] = n > 1e-12 ? vertex_normal_sum[i] / n : Vec3{0, 1, 0};
  }
  return data;
}

std::string write_obj(const ObjData& data) {
  std::string out;
  out.reserve(data.vertices.size() * 64);
  char buf[128];
  for (const Vec3& v : data.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
    out += buf;
  }
  for (const Vec3& n : data.normals) {
    std::snprintf(buf, sizeof(buf), "vn %.6f %.6f %.6f\n", n.x, n.y, n.z);
    out += buf;
  }
  for (const auto& f : data.faces) {
    std::snprintf(buf, sizeof(buf), "f %d//%d %d//%d %d//%d\n", f[0] + 1, f[0] + 1, f[1] + 1,
                  f[1] + 1, f[2] + 1, f[2] + 1);
    out += buf;
  }
  return out;
}

}  // namespace retarget
