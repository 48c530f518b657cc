#include "retarget/io_bvh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace retarget {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Tokenizer {
  std::string_view text;
  size_t pos = 0;
  int line = 1;

  void skip_space() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '\n') {
        ++line;
        ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_space();
    return pos >= text.size();
  }

  std::string_view next() {
    skip_space();
    if (pos >= text.size()) throw ParseError("unexpected end of input", line);
    size_t start = pos;
    if (text[pos] == '{' || text[pos] == '}') {
      ++pos;
      return text.substr(start, 1);
    }
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '{' && text[pos] != '}')
      ++pos;
    return text.substr(start, pos - start);
  }

  void expect(std::string_view token) {
    std::string_view got = next();
    if (got != token)
      throw ParseError("expected '" + std::string(token) + "', found '" + std::string(got) + "'", line);
  }

  double number() {
    std::string_view tok = next();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw ParseError("expected a number, found '" + std::string(tok) + "'", line);
    if (!std::isfinite(value)) throw ParseError("non-finite number", line);
    return value;
  }

  long integer() {
    double v = number();
    long i = static_cast<long>(v);
    if (static_cast<double>(i) != v) throw ParseError("expected an integer", line);
    return i;
  }
};

enum class Channel { Xpos, Ypos, Zpos, Xrot, Yrot, Zrot };

struct JointChannels {
  std::vector<Channel> channels;
};

Channel parse_channel(Tokenizer& tok) {
  std::string_view name = tok.next();
  if (name == "Xposition") return Channel::Xpos;
  if (name == "Yposition") return Channel::Ypos;
  if (name == "Zposition") return Channel::Zpos;
  if (name == "Xrotation") return Channel::Xrot;
  if (name == "Yrotation") return Channel::Yrot;
  if (name == "Zrotation") return Channel::Zrot;
  throw ParseError("unknown channel '" + std::string(name) + "'", tok.line);
}

void parse_offset(Tokenizer& tok, Vec3& offset) {
  tok.expect("OFFSET");
  offset.x = tok.number();
  offset.y = tok.number();
  offset.z = tok.number();
}

// Parses one joint body after its '{'; recurses into children.
void parse_joint_body(Tokenizer& tok, Skeleton& skeleton, std::vector<JointChannels>& channels,
                      int joint_index, bool is_root) {
  parse_offset(tok, skeleton.joints[joint_index].offset);
  tok.expect("CHANNELS");
  long count = tok.integer();
  if (count < 0 || count > 6) throw ParseError("channel count out of range", tok.line);
  int rotations = 0;
  for (long i = 0; i < count; ++i) {
    Channel c = parse_channel(tok);
    if (c == Channel::Xpos || c == Channel::Ypos || c == Channel::Zpos) {
      if (!is_root) throw ParseError("position channels are only supported on the root", tok.line);
    } else {
      ++rotations;
    }
    channels[joint_index].channels.push_back(c);
  }
  if (rotations != 3) throw ParseError("each joint needs exactly three rotation channels", tok.line);

  for (;;) {
    std::string_view word = tok.next();
    if (word == "}") return;
    if (word == "JOINT") {
      std::string name(tok.next());
      int child = skeleton.size();
      skeleton.joints.push_back({name, joint_index, {}});
      channels.emplace_back();
      tok.expect("{");
      parse_joint_body(tok, skeleton, channels, child, false);
    } else if (word == "End") {
      tok.expect("Site");
      tok.expect("{");
      Vec3 ignored;
      parse_offset(tok, ignored);
      tok.expect("}");
    } else {
      throw ParseError("unexpected token '" + std::string(word) + "' in joint body", tok.line);
    }
  }
}

}  // namespace

Quat quat_from_axis_angle(int axis, double radians) {
  double h = 0.5 * radians;
  double s = std::sin(h), c = std::cos(h);
  switch (axis) {
    case 0: return {c, s, 0, 0};
    case 1: return {c, 0, s, 0};
    default: return {c, 0, 0, s};
  }
}

void quat_to_zxy(const Quat& q, double& z_radians, double& x_radians, double& y_radians) {
  // Rotation matrix entries needed for the Rz * Rx * Ry decomposition.
  double w = q.w, x = q.x, y = q.y, z = q.z;
  double m21 = 2.0 * (y * z + w * x);
  double m20 = 2.0 * (x * z - w * y);
  double m22 = 1.0 - 2.0 * (x * x + y * y);
  double m01 = 2.0 * (x * y - w * z);
  double m11 = 1.0 - 2.0 * (x * x + z * z);
  double s = std::clamp(m21, -1.0, 1.0);
  x_radians = std::asin(s);
  if (std::abs(s) < 1.0 - 1e-9) {
    y_radians = std::atan2(-m20, m22);
    z_radians = std::atan2(-m01, m11);
  } else {
    // Gimbal singularity: fold everything into the z rotation.
    double m10 = 2.0 * (x * y + w * z);
    double m00 = 1.0 - 2.0 * (y * y + z * z);
    y_radians = 0.0;
    z_radians = std::atan2(m10, m00);
  }
}

BvhData parse_bvh(std::string_view text) {
  Tokenizer tok{text};
  BvhData data;
  std::vector<JointChannels> channels;

  tok.expect("HIERARCHY");
  tok.expect("ROOT");
  data.skeleton.joints.push_back({std::string(tok.next()), -1, {}});
  channels.emplace_back();
  tok.expect("{");
  parse_joint_body(tok, data.skeleton, channels, 0, true);

  tok.expect("MOTION");
  tok.expect("Frames:");
  long frames = tok.integer();
  if (frames < 0) throw ParseError("negative frame count", tok.line);
  tok.expect("Frame");
  tok.expect("Time:");
  double frame_time = tok.number();
  if (frame_time <= 0.0) throw ParseError("frame time must be positive", tok.line);

  int k_count = data.skeleton.size();
  Motion& motion = data.motion;
  motion.frame_count = static_cast<int>(frames);
  motion.joint_count = k_count;
  motion.frame_rate = 1.0 / frame_time;
  motion.rotations.assign(static_cast<size_t>(frames) * k_count, Quat{});
  motion.global.assign(frames, {0.0, 0.0, 0.0, 0.0});

  double angles[3];
  for (long t = 0; t < frames; ++t) {
    for (int k = 0; k < k_count; ++k) {
      int rot_count = 0;
      for (Channel c : channels[k].channels) {
        double value = tok.number();
        switch (c) {
          case Channel::Xpos: motion.global[t][0] = value; break;
          case Channel::Ypos: motion.global[t][1] = value; break;
          case Channel::Zpos: motion.global[t][2] = value; break;
          default: angles[rot_count++] = value; break;
        }
      }
      // Reassemble in declared rotation order.
      Quat q{1, 0, 0, 0};
      int slot = 0;
      for (Channel c : channels[k].channels) {
        int axis = c == Channel::Xrot ? 0 : c == Channel::Yrot ? 1 : c == Channel::Zrot ? 2 : -1;
        if (axis < 0) continue;
        q = qmul_raw(q, quat_from_axis_angle(axis, angles[slot++] * kPi / 180.0));
      }
      motion.rot(static_cast<int>(t), k) = quat_normalize(q);
    }
  }
  if (!tok.eof()) throw ParseError("trailing data after motion block", tok.line);
  data.skeleton.validate();
  return data;
}

namespace {

void write_joint(std::string& out, const Skeleton& skeleton, int joint, int depth) {
  std::string indent(static_cast<size_t>(depth) * 2, ' ');
  char buf[160];
  const Joint& j = skeleton.joints[joint];
  std::snprintf(buf, sizeof(buf), "%s%s %s\n%s{\n%s  OFFSET %.6f %.6f %.6f\n", indent.c_str(),
                joint == 0 ? "ROOT" : "JOINT", j.name.c_str(), indent.c_str(), indent.c_str(),
                j.offset.x, j.offset.y, j.offset.z);
  out += buf;
  if (joint == 0)
    out += indent + "  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n";
  else
    out += indent + "  CHANNELS 3 Zrotation Xrotation Yrotation\n";

  bool leaf = true;
  for (int c = 0; c < skeleton.size(); ++c) {
    if (skeleton.joints[c].parent == joint) {
      leaf = false;
      write_joint(out, skeleton, c, depth + 1);
    }
  }
  if (leaf) {
    out += indent + "  End Site\n" + indent + "  {\n" + indent + "    OFFSET 0.000000 0.000000 0.000000\n" +
           indent + "  }\n";
  }
  out += indent + "}\n";
}

}  // namespace

std::string write_bvh(const Skeleton& skeleton, const Motion& motion) {
  skeleton.validate();
  if (motion.frame_count <= 0) throw DomainError("cannot write a motion with no frames");
  if (motion.joint_count != skeleton.size()) throw ShapeError("skeleton and motion joint counts differ");

  std::string out = "HIERARCHY\n";
  write_joint(out, skeleton, 0, 0);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "MOTION\nFrames: %d\nFrame Time: %.10f\n", motion.frame_count,
                1.0 / motion.frame_rate);
  out += buf;

  for (int t = 0; t < motion.frame_count; ++t) {
    std::string row;
    const auto& d = motion.global[t];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f", d[0], d[1], d[2]);
    row += buf;
    for (int k = 0; k < motion.joint_count; ++k) {
      double zr, xr, yr;
      quat_to_zxy(motion.rot(t, k), zr, xr, yr);
      std::snprintf(buf, sizeof(buf), " %.6f %.6f %.6f", zr * 180.0 / kPi, xr * 180.0 / kPi,
                    yr * 180.0 / kPi);
      row += buf;
    }
    row += "\n";
    out += row;
  }
  return out;
}

}  // namespace retarget
