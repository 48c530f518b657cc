#include "retarget/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retarget/parallel.hpp"
#include "retarget/proximity.hpp"

namespace retarget {

namespace {

double position_mse(const Motion& predicted, const Skeleton& skel_pred, const Motion& ground_truth,
                    const Skeleton& skel_gt) {
  if (predicted.frame_count != ground_truth.frame_count ||
      predicted.joint_count != ground_truth.joint_count)
    throw ShapeError("metrics require matching T and K");
  double h = character_height(skel_gt);
  double sum = 0.0;
  for (int t = 0; t < predicted.frame_count; ++t) {
    Pose pp = forward_kinematics(skel_pred, predicted, t);
    Pose pg = forward_kinematics(skel_gt, ground_truth, t);
    for (int k = 0; k < predicted.joint_count; ++k) sum += norm2(pp.positions[k] - pg.positions[k]);
  }
  double denom = static_cast<double>(predicted.frame_count) * predicted.joint_count;
  return sum / denom / h;
}

Motion pin_root(Motion motion) {
  for (auto& d : motion.global) d = {0.0, 0.0, 0.0, d[3]};
  return motion;
}

}  // namespace

double mse(const Motion& predicted, const Skeleton& predicted_skeleton, const Motion& ground_truth,
           const Skeleton& ground_truth_skeleton) {
  return position_mse(predicted, predicted_skeleton, ground_truth, ground_truth_skeleton);
}

double local_mse(const Motion& predicted, const Skeleton& predicted_skeleton,
                 const Motion& ground_truth, const Skeleton& ground_truth_skeleton) {
  return position_mse(pin_root(predicted), predicted_skeleton, pin_root(ground_truth),
                      ground_truth_skeleton);
}

double penetration_rate(const SkinnedCharacter& character, const LimbSegmentation& segmentation,
                        const Motion& motion, double depth_threshold,
                        const PenetrationOptions& options) {
  std::int64_t limb_total = 0;
  for (int l = 0; l < kLimbCount; ++l) {
    if (segmentation.limb_vertices[l].empty()) throw DomainError("empty limb vertex set");
    limb_total += static_cast<std::int64_t>(segmentation.limb_vertices[l].size());
  }
  std::vector<std::int64_t> frame_hits(motion.frame_count, 0);
  parallel_for(motion.frame_count, options.threads, [&](int t) {
    Pose pose = forward_kinematics(character.skeleton, motion, t);
    std::vector<Vec3> query_pos, ref_pos, ref_nrm;
    for (int l = 0; l < kLimbCount; ++l) {
      const auto& queries = segmentation.limb_vertices[l];
      const auto& refs = segmentation.reference_vertices[l];
      query_pos.resize(queries.size());
      ref_pos.resize(refs.size());
      ref_nrm.resize(refs.size());
      lbs_deform_points(character, pose, queries, query_pos, {});
      lbs_deform_points(character, pose, refs, ref_pos, ref_nrm);
      if (options.brute_force) {
        for (const Vec3& q : query_pos) {
          auto hit = nearest_brute(ref_pos, q);
          if (-dot(q - ref_pos[hit.index], ref_nrm[hit.index]) > depth_threshold) ++frame_hits[t];
        }
      } else {
        ProximityIndex index(ref_pos, ref_nrm);
        for (const Vec3& q : query_pos)
          if (index.signed_depth(q).depth > depth_threshold) ++frame_hits[t];
      }
    }
  });
  std::int64_t hits = 0;
  for (std::int64_t h : frame_hits) hits += h;
  return 100.0 * static_cast<double>(hits) /
         (static_cast<double>(limb_total) * motion.frame_count);
}

double curvature(const Motion& motion, const Skeleton& skeleton, std::span<const int> limb_joints,
                 std::vector<double>* per_joint) {
  if (motion.frame_count < 3) throw ShapeError("curvature needs at least three frames");
  std::vector<int> joints(limb_joints.begin(), limb_joints.end());
  if (joints.empty())
    for (int k = 0; k < skeleton.size(); ++k) joints.push_back(k);

  std::vector<std::vector<Vec3>> traj(joints.size(), std::vector<Vec3>(motion.frame_count));
  for (int t = 0; t < motion.frame_count; ++t) {
    Pose pose = forward_kinematics(skeleton, motion, t);
    for (size_t i = 0; i < joints.size(); ++i) traj[i][t] = pose.positions[joints[i]];
  }
  if (per_joint) per_joint->assign(joints.size(), 0.0);
  double sum = 0.0;
  int interior = motion.frame_count - 2;
  for (size_t i = 0; i < joints.size(); ++i) {
    double joint_sum = 0.0;
    for (int t = 1; t + 1 < motion.frame_count; ++t) {
      Vec3 acc = traj[i][t - 1] - 2.0 * traj[i][t] + traj[i][t + 1];
      joint_sum += norm2(acc);
    }
    joint_sum /= interior;
    if (per_joint) (*per_joint)[i] = joint_sum;
    sum += joint_sum;
  }
  return sum / static_cast<double>(joints.size());
}

std::string metrics_kv(const MetricsReport& report, double wall_ms) {
  std::ostringstream out;
  out << "mse=" << report.mse << "\n"
      << "mse_local=" << report.mse_local << "\n"
      << "pen_rate=" << report.pen_rate << "\n"
      << "curvature=" << report.curvature << "\n"
      << "wall_ms=" << wall_ms << "\n";
  return out.str();
}

void append_metrics_csv(const std::string& path, const std::string& sequence_id,
                        const MetricsReport& report, double wall_ms) {
  bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open results file: " + path);
  if (fresh) out << "sequence_id,mse,mse_local,pen_rate,curvature,wall_ms\n";
  out << sequence_id << ',' << report.mse << ',' << report.mse_local << ',' << report.pen_rate
      << ',' << report.curvature << ',' << wall_ms << "\n";
}

}  // namespace retarget
