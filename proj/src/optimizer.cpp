#include "retarget/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <span>

#include "retarget/metrics.hpp"
#include "retarget/parallel.hpp"
#include "retarget/temporal_loss.hpp"

namespace retarget {

namespace {

bool skeletons_identical(const Skeleton& a, const Skeleton& b) {
  if (a.size() != b.size()) return false;
  for (int k = 0; k < a.size(); ++k) {
    const Joint& ja = a.joints[k];
    const Joint& jb = b.joints[k];
    if (ja.name != jb.name || ja.parent != jb.parent || ja.offset.x != jb.offset.x ||
        ja.offset.y != jb.offset.y || ja.offset.z != jb.offset.z)
      return false;
  }
  return true;
}

std::vector<int> limb_joint_union(const LimbConfig& config) {
  std::vector<int> joints;
  for (int l = 0; l < kLimbCount; ++l)
    joints.insert(joints.end(), config.limb_joints[l].begin(), config.limb_joints[l].end());
  return joints;
}

Motion compose_candidate(const RetargetScene& scene, const ResidualMotion& residual) {
  Motion candidate = compose_motion(residual, *scene.source);
  candidate.global = scene.global_b;
  return candidate;
}

SceneMetrics measure(const RetargetScene& scene, const Motion& motion, const Motion& copy,
                     std::span<const int> limb_joints) {
  SceneMetrics m;
  PenetrationOptions options;
  options.threads = scene.threads;
  m.pen_rate = penetration_rate(*scene.target_char, scene.segmentation, motion, 0.0, options);
  m.curvature = curvature(motion, scene.target_char->skeleton, limb_joints);
  m.mse_vs_copy = mse(motion, scene.target_char->skeleton, copy, scene.target_char->skeleton);
  m.local_mse_vs_copy = local_mse(motion, scene.target_char->skeleton, copy, scene.target_char->skeleton);
  return m;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (step_size <= 0.0) throw DomainError("step size must be positive");
  if (iterations < 1) throw DomainError("iteration budget must be at least 1");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw DomainError("adaptive-moment decays must lie in [0, 1)");
  if (adam_epsilon <= 0.0) throw DomainError("adam epsilon must be positive");
  if (tolerance < 0.0) throw DomainError("tolerance must be nonnegative");
  if (refresh_cadence < 1) throw DomainError("refresh cadence must be at least 1");
  if (resample_cadence < 0) throw DomainError("resample cadence must be nonnegative");
  if (samples.shape < 1 || samples.limb_query < 1 || samples.limb_reference < 1)
    throw DomainError("sample counts must be positive");
}

LossWeights preset_final() { return LossWeights{}; }

LossWeights preset_curv() {
  LossWeights w;
  w.lp *= 0.5;
  w.tc *= 2.0;
  return w;
}

RetargetScene prepare_scene(const Motion& source, const SkinnedCharacter& source_char,
                            const SkinnedCharacter& target_char, const OptimizerConfig& config) {
  config.validate();
  source.validate();
  if (source.joint_count != source_char.skeleton.size() ||
      source.joint_count != target_char.skeleton.size())
    throw ShapeError("characters must share the motion's joint count");

  RetargetScene scene;
  scene.source = &source;
  scene.source_char = &source_char;
  scene.target_char = &target_char;
  scene.weights = config.weights;
  scene.threads = resolve_threads(config.threads);
  scene.use_reconstruction = skeletons_identical(source_char.skeleton, target_char.skeleton);
  scene.field = JointOrientationField::uniform(source.joint_count);

  double h_src = character_height(source_char.skeleton);
  double h_tgt = character_height(target_char.skeleton);
  scene.global_b = normalize_global(source.global, h_src, h_tgt);

  scene.segmentation = segment_limbs(target_char, target_char.limbs);
  scene.sample = sample_points(target_char, scene.segmentation, config.samples, config.seed);
  scene.tc_frames = pair_frames(source.frame_count);

  int t_count = source.frame_count;
  int k_count = source.joint_count;
  scene.copy_positions.resize(static_cast<size_t>(t_count) * k_count);
  scene.source_positions.resize(static_cast<size_t>(t_count) * k_count);
  Motion copy = source;
  copy.global = scene.global_b;
  for (int t = 0; t < t_count; ++t) {
    Pose pc = forward_kinematics(target_char.skeleton, copy, t);
    Pose ps = forward_kinematics(source_char.skeleton, source, t);
    for (int k = 0; k < k_count; ++k) {
      scene.copy_positions[static_cast<size_t>(t) * k_count + k] = pc.positions[k];
      scene.source_positions[static_cast<size_t>(t) * k_count + k] = ps.positions[k];
    }
  }
  scene.source_directions = propagate_orientation_field(source_char.skeleton, source, scene.field);
  return scene;
}

RetargetReport optimize_sequence(const Motion& source, const SkinnedCharacter& source_char,
                                 const SkinnedCharacter& target_char, const OptimizerConfig& config) {
  auto start = std::chrono::steady_clock::now();
  RetargetScene scene = prepare_scene(source, source_char, target_char, config);
  int t_count = source.frame_count;
  int k_count = source.joint_count;

  ResidualMotion residual = ResidualMotion::identity(t_count, k_count);
  ResidualMotion best_residual = residual;
  size_t n = residual.raw.size();
  std::vector<std::array<double, 4>> moment1(n, std::array<double, 4>{}), moment2(n, std::array<double, 4>{});

  RetargetReport report;
  report.trace.reserve(config.iterations);
  FrozenCorrespondences frozen;
  double best = std::numeric_limits<double>::infinity();
  double previous = 0.0;
  double initial = 0.0;

  for (int it = 0; it < config.iterations; ++it) {
    Motion candidate = compose_candidate(scene, residual);
    if (it % config.refresh_cadence == 0) {
      if (config.resample_cadence > 0 && it > 0 && it % config.resample_cadence == 0)
        scene.sample = sample_points(target_char, scene.segmentation, config.samples,
                                     config.seed + static_cast<std::uint64_t>(it));
      frozen = freeze_correspondences(scene, candidate);
    }
    GradientResult grad = loss_gradient(scene, residual, frozen);
    if (it == 0) initial = grad.total;
    if (grad.total < best) {
      best = grad.total;
      best_residual = residual;
      report.best_iteration = it;
    }
    report.trace.push_back({it, grad.total, best, grad.terms});

    if (grad.total > 10.0 * initial && initial > 1e-12) {
      report.diverged = true;
      break;
    }
    if (it > 0 && std::abs(previous - grad.total) < config.tolerance * std::max(std::abs(previous), 1e-12)) {
      report.converged = true;
      break;
    }
    previous = grad.total;

    double g_norm2 = 0.0;
    for (const auto& g : grad.gradient)
      for (double v : g) g_norm2 += v * v;
    if (g_norm2 == 0.0) {
      report.converged = true;  // exact stationary point
      break;
    }

    double c1 = 1.0 - std::pow(config.beta1, it + 1);
    double c2 = 1.0 - std::pow(config.beta2, it + 1);
    // Linear warm-up keeps the earliest updates from injecting frame jitter
    // that the trajectory terms then amplify; the tail decay lets those terms
    // polish the jitter back out before the budget runs out.
    constexpr int kWarmupIterations = 20;
    double ramp = std::min(1.0, (it + 1.0) / kWarmupIterations);
    double decay = config.iterations > 1
                       ? 1.0 - 0.95 * (static_cast<double>(it) / (config.iterations - 1))
                       : 1.0;
    double step = config.step_size * ramp * decay;
    for (size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 4; ++c) {
        double g = grad.gradient[i][c];
        moment1[i][c] = config.beta1 * moment1[i][c] + (1.0 - config.beta1) * g;
        moment2[i][c] = config.beta2 * moment2[i][c] + (1.0 - config.beta2) * g * g;
        double m_hat = moment1[i][c] / c1;
        double v_hat = moment2[i][c] / c2;
        residual.raw[i][c] -= step * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
      }
    }
  }

  report.initial_loss = initial;
  report.final_loss = best;
  report.result = compose_candidate(scene, best_residual);

  Motion copy = source;
  copy.global = scene.global_b;
  for (Quat& q : copy.rotations) q = canonical(q);
  std::vector<int> limb_joints = limb_joint_union(target_char.limbs);
  report.before = measure(scene, copy, copy, limb_joints);
  report.after = measure(scene, report.result, copy, limb_joints);
  report.source_curvature =
      curvature(source, source_char.skeleton, limb_joint_union(source_char.limbs));
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace retarget
