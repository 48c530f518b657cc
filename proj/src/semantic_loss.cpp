#include "retarget/semantic_loss.hpp"

#include "retarget/temporal_loss.hpp"

namespace retarget {

namespace {

double quat_diff2(const Quat& a, const Quat& b) {
  Quat d = canonical(a) - canonical(b);
  return qdot(d, d);
}

// Shared form of Eqs. for rotation + FK-position reconstruction terms.
double rotation_position_loss(const Motion& reference, const Motion& candidate,
                              const Skeleton& skeleton) {
  if (reference.frame_count != candidate.frame_count ||
      reference.joint_count != candidate.joint_count)
    throw ShapeError("loss requires matching T and K");
  if (skeleton.size() != reference.joint_count)
    throw ShapeError("skeleton joint count does not match motions");
  int t_count = reference.frame_count;
  int k_count = reference.joint_count;
  double rot_sum = 0.0, pos_sum = 0.0;
  for (int t = 0; t < t_count; ++t) {
    Pose pr = forward_kinematics(skeleton, reference, t);
    Pose pc = forward_kinematics(skeleton, candidate, t);
    for (int k = 0; k < k_count; ++k) {
      rot_sum += quat_diff2(reference.rot(t, k), candidate.rot(t, k));
      pos_sum += norm2(pr.positions[k] - pc.positions[k]);
    }
  }
  double denom = static_cast<double>(t_count) * k_count;
  return rot_sum / denom + pos_sum / denom;
}

}  // namespace

double reconstruction_loss(const Motion& original, const Motion& reconstructed,
                           const Skeleton& skeleton) {
  return rotation_position_loss(original, reconstructed, skeleton);
}

double constraint_loss(const Motion& source, const Motion& retargeted,
                       const Skeleton& target_skeleton) {
  return rotation_position_loss(source, retargeted, target_skeleton);
}

double joint_orientation_loss(const Motion& source, const Motion& retargeted,
                              const Skeleton& source_skeleton, const Skeleton& target_skeleton,
                              const JointOrientationField& field) {
  if (source.frame_count != retargeted.frame_count || source.joint_count != retargeted.joint_count)
    throw ShapeError("joint orientation loss requires matching T and K");
  std::vector<Vec3> dir_src = propagate_orientation_field(source_skeleton, source, field);
  std::vector<Vec3> dir_ret = propagate_orientation_field(target_skeleton, retargeted, field);
  double sum = 0.0;
  for (size_t i = 0; i < dir_src.size(); ++i) sum += norm2(dir_src[i] - dir_ret[i]);
  return sum / static_cast<double>(dir_src.size());
}

LossReport total_loss(const TotalLossInputs& in, const LossWeights& weights) {
  LossReport report;
  if (weights.rec > 0.0)
    report.rec = reconstruction_loss(*in.source, *in.retargeted, *in.source_skeleton);
  if (weights.con > 0.0)
    report.con = constraint_loss(*in.source, *in.retargeted, *in.target_skeleton);
  if (weights.lp > 0.0) {
    PenetrationOptions options;
    options.threads = in.threads;
    report.lp = limb_penetration_loss(*in.target_character, *in.segmentation, *in.sample,
                                      *in.retargeted, options)
                    .total;
  }
  if (weights.tc > 0.0)
    report.tc = temporal_consistency_loss(*in.source, *in.source_skeleton, *in.retargeted,
                                          *in.target_skeleton);
  if (weights.j > 0.0)
    report.j = joint_orientation_loss(*in.source, *in.retargeted, *in.source_skeleton,
                                      *in.target_skeleton, *in.field);
  report.total = weights.rec * report.rec.value_or(0.0) + weights.con * report.con.value_or(0.0) +
                 weights.lp * report.lp.value_or(0.0) + weights.tc * report.tc.value_or(0.0) +
                 weights.j * report.j.value_or(0.0);
  return report;
}

}  // namespace retarget
