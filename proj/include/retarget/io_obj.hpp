#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "retarget/core_math.hpp"

namespace retarget {

struct ObjData {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  // per vertex, unit
  std::vector<std::array<int, 3>> faces;
};

// v/vn/f subset; quads are fan-triangulated, `f` entries may be v, v//vn or
// v/vt/vn (vt ignored). Missing normals are computed from area-weighted face
// normals. Malformed records raise ParseError with a line number.
ObjData parse_obj(std::string_view text);

std::string write_obj(const ObjData& data);

}  // namespace retarget
