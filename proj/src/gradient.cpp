#include <cmath>

#include "retarget/optimizer.hpp"
#include "retarget/parallel.hpp"
#include "retarget/proximity.hpp"
#include "retarget/temporal_loss.hpp"

// Objective evaluation and its hand-derived reverse-mode gradient. The
// computation graph is fixed per iteration: residual -> composed rotations ->
// per-frame FK -> (LBS points, trajectories, directions) -> loss terms, with
// nearest-neighbor correspondences and reference normals held frozen. The
// backward pass mirrors that graph exactly, so central finite differences of
// frozen_total_loss are the arbiter for every path here.

namespace retarget {

namespace {

struct ComposedMotion {
  Motion motion;                // canonical Q_B with the normalized global channel
  std::vector<Quat> unit_residual;  // normalize(raw), pre-canonicalization
  std::vector<double> sign;         // canonicalization sign per entry
};

ComposedMotion compose_for_eval(const RetargetScene& scene, const ResidualMotion& residual) {
  const Motion& src = *scene.source;
  if (residual.frame_count != src.frame_count || residual.joint_count != src.joint_count)
    throw ShapeError("residual and source motion dimensions differ");
  ComposedMotion out;
  out.motion.frame_count = src.frame_count;
  out.motion.joint_count = src.joint_count;
  out.motion.frame_rate = src.frame_rate;
  out.motion.global = scene.global_b;
  size_t n = residual.raw.size();
  out.motion.rotations.resize(n);
  out.unit_residual.resize(n);
  out.sign.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& r = residual.raw[i];
    Quat q{r[0], r[1], r[2], r[3]};
    double nrm = qnorm(q);
    if (nrm <= 1e-12) throw DomainError("degenerate residual quaternion");
    Quat unit = (1.0 / nrm) * q;
    Quat m = qmul_raw(unit, src.rotations[i]);
    double s = m.w < 0.0 ? -1.0 : 1.0;
    out.unit_residual[i] = unit;
    out.sign[i] = s;
    out.motion.rotations[i] = s * m;
  }
  return out;
}

struct FrameBuffers {
  std::vector<Quat> world_rot;
  std::vector<Vec3> pos;       // target-skeleton chain
  std::vector<Vec3> pos_src;   // source-skeleton chain (reconstruction term)
  std::vector<Vec3> query_pos;
  std::vector<Vec3> ref_pos;
  // partial term sums
  double lp_sum = 0.0;
  double con_rot = 0.0;
  double con_pos = 0.0;
  double rec_pos = 0.0;
  double j_sum = 0.0;
};

struct TermFlags {
  bool lp = false, con = false, tc = false, j = false, rec = false;
};

TermFlags active_terms(const RetargetScene& scene) {
  TermFlags f;
  f.lp = scene.weights.lp > 0.0;
  f.con = scene.weights.con > 0.0;
  f.tc = scene.weights.tc > 0.0;
  f.j = scene.weights.j > 0.0;
  f.rec = scene.weights.rec > 0.0 && scene.use_reconstruction;
  return f;
}

// FK forward over one frame; offsets/global choose the chain.
void fk_chain(const Skeleton& skeleton, const Motion& motion, int frame,
              std::vector<Quat>& world_rot, std::vector<Vec3>& pos) {
  int k_count = skeleton.size();
  world_rot.resize(k_count);
  pos.resize(k_count);
  const auto& d = motion.global[frame];
  for (int k = 0; k < k_count; ++k) {
    int parent = skeleton.joints[k].parent;
    if (parent < 0) {
      world_rot[k] = motion.rot(frame, k);
      pos[k] = {d[0], d[1], d[2]};
    } else {
      world_rot[k] = qmul_raw(world_rot[parent], motion.rot(frame, k));
      pos[k] = pos[parent] + rotate_vec(world_rot[parent], skeleton.joints[k].offset);
    }
  }
}

// Positions of the source-skeleton chain reuse the same world rotations
// (rotations are offset-independent).
void fk_positions_only(const Skeleton& skeleton, const std::vector<Quat>& world_rot,
                       const std::array<double, 4>& d, std::vector<Vec3>& pos) {
  int k_count = skeleton.size();
  pos.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    int parent = skeleton.joints[k].parent;
    pos[k] = parent < 0 ? Vec3{d[0], d[1], d[2]}
                        : pos[parent] + rotate_vec(world_rot[parent], skeleton.joints[k].offset);
  }
}

void deform_samples(const RetargetScene& scene, const std::vector<Quat>& world_rot,
                    const std::vector<Vec3>& pos, std::vector<Vec3>& query_pos,
                    std::vector<Vec3>& ref_pos) {
  const SkinnedCharacter& character = *scene.target_char;
  const auto& bind = character.bind_positions();
  auto deform = [&](const std::vector<int>& indices, std::vector<Vec3>& out, size_t at) {
    for (size_t i = 0; i < indices.size(); ++i) {
      int v = indices[i];
      Vec3 p{};
      for (const SkinInfluence& inf : character.weights[v])
        p += inf.weight *
             (rotate_vec(world_rot[inf.joint], character.vertices[v] - bind[inf.joint]) + pos[inf.joint]);
      out[at + i] = p;
    }
  };
  size_t q_total = 0, r_total = 0;
  for (int l = 0; l < kLimbCount; ++l) {
    q_total += scene.sample.limb_query[l].indices.size();
    r_total += scene.sample.limb_reference[l].indices.size();
  }
  query_pos.resize(q_total);
  ref_pos.resize(r_total);
  size_t q_at = 0, r_at = 0;
  for (int l = 0; l < kLimbCount; ++l) {
    deform(scene.sample.limb_query[l].indices, query_pos, q_at);
    deform(scene.sample.limb_reference[l].indices, ref_pos, r_at);
    q_at += scene.sample.limb_query[l].indices.size();
    r_at += scene.sample.limb_reference[l].indices.size();
  }
}

struct TemporalResult {
  double value = 0.0;
  std::vector<Vec3> g_pos;  // T*K gradient on target positions (unweighted)
};

// Temporal consistency over self-normalized trajectories, with the exact
// backward of the min/offset/uniform-scale normalization.
TemporalResult temporal_term(const RetargetScene& scene,
                             const std::vector<std::vector<Vec3>>& frame_positions, bool want_grad) {
  int t_count = scene.source->frame_count;
  int k_count = scene.source->joint_count;
  const std::vector<int>& frames = scene.tc_frames;
  double pair_norm = static_cast<double>(frames.size()) * static_cast<double>(frames.size());

  TemporalResult result;
  if (want_grad) result.g_pos.assign(static_cast<size_t>(t_count) * k_count, Vec3{});

  std::vector<Vec3> traj(t_count), src_traj(t_count);
  std::vector<Vec3> c_b(t_count), c_a(t_count), gc(t_count);
  // Same whole-body degeneracy floors as temporal_consistency_loss.
  double body_a = 0.0, body_b = 0.0;
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < t_count; ++t) {
      traj[t] = frame_positions[t][k];
      src_traj[t] = scene.source_positions[static_cast<size_t>(t) * k_count + k];
    }
    body_a = std::max(body_a, trajectory_extent(src_traj));
    body_b = std::max(body_b, trajectory_extent(traj));
  }
  double floor_a = temporal_degenerate_floor(body_a);
  double floor_b = temporal_degenerate_floor(body_b);
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < t_count; ++t) {
      traj[t] = frame_positions[t][k];
      src_traj[t] = scene.source_positions[static_cast<size_t>(t) * k_count + k];
    }
    NormalizedTrajectory na = normalize_trajectory(src_traj, floor_a);
    NormalizedTrajectory nb = normalize_trajectory(traj, floor_b);
    c_a = na.points;
    c_b = nb.points;

    double sum = 0.0;
    if (want_grad) std::fill(gc.begin(), gc.end(), Vec3{});
    for (int i : frames)
      for (int j : frames) {
        Vec3 diff = (c_b[j] - c_b[i]) - (c_a[j] - c_a[i]);
        sum += norm2(diff);
        if (want_grad && !nb.degenerate) {
          Vec3 g = (2.0 / pair_norm) * diff;
          gc[j] += g;
          gc[i] -= g;
        }
      }
    result.value += sum / pair_norm;

    if (want_grad && !nb.degenerate) {
      // Recover the argmin/argmax frames the normalization used; strict
      // comparisons keep the first occurrence, matching normalize_trajectory.
      auto comp = [](const Vec3& v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; };
      int tmin[3] = {0, 0, 0}, tmax[3] = {0, 0, 0};
      for (int t = 1; t < t_count; ++t)
        for (int a = 0; a < 3; ++a) {
          if (comp(traj[t], a) < comp(traj[tmin[a]], a)) tmin[a] = t;
          if (comp(traj[t], a) > comp(traj[tmax[a]], a)) tmax[a] = t;
        }
      int axis_star = 0;
      for (int a = 1; a < 3; ++a)
        if (comp(traj[tmax[a]], a) - comp(traj[tmin[a]], a) >
            comp(traj[tmax[axis_star]], axis_star) - comp(traj[tmin[axis_star]], axis_star))
          axis_star = a;
      double scale = nb.scale;

      auto at = [&](int t) -> Vec3& { return result.g_pos[static_cast<size_t>(t) * k_count + k]; };
      auto comp_ref = [](Vec3& v, int a) -> double& { return a == 0 ? v.x : a == 1 ? v.y : v.z; };
      double g_scale = 0.0;
      Vec3 g_min{};
      for (int t = 0; t < t_count; ++t) {
        const Vec3& g = gc[t];
        at(t) += g / scale;
        g_min -= g / scale;
        g_scale -= dot(g, traj[t] - nb.offset) / (scale * scale);
      }
      at(tmin[0]).x += g_min.x;
      at(tmin[1]).y += g_min.y;
      at(tmin[2]).z += g_min.z;
      comp_ref(at(tmax[axis_star]), axis_star) += g_scale;
      comp_ref(at(tmin[axis_star]), axis_star) -= g_scale;
    }
  }
  result.value /= k_count;
  if (want_grad)
    for (Vec3& g : result.g_pos) g = g / static_cast<double>(k_count);
  return result;
}

struct EvalOutput {
  double total = 0.0;
  LossReport terms;
};

EvalOutput evaluate_objective(const RetargetScene& scene, const ResidualMotion& residual,
                              const FrozenCorrespondences& frozen,
                              std::vector<std::array<double, 4>>* grad_out) {
  const Motion& src = *scene.source;
  int t_count = src.frame_count;
  int k_count = src.joint_count;
  const Skeleton& skel_tgt = scene.target_char->skeleton;
  const Skeleton& skel_src = scene.source_char->skeleton;
  TermFlags on = active_terms(scene);
  bool want_grad = grad_out != nullptr;

  ComposedMotion composed = compose_for_eval(scene, residual);
  const Motion& qb = composed.motion;

  std::int64_t total_queries = 0;
  for (int l = 0; l < kLimbCount; ++l)
    total_queries += static_cast<std::int64_t>(scene.sample.limb_query[l].indices.size());

  std::vector<FrameBuffers> frames(t_count);
  std::vector<std::vector<Vec3>> frame_positions(t_count);

  parallel_for(t_count, scene.threads, [&](int t) {
    FrameBuffers& fb = frames[t];
    fk_chain(skel_tgt, qb, t, fb.world_rot, fb.pos);
    frame_positions[t] = fb.pos;
    if (on.rec) fk_positions_only(skel_src, fb.world_rot, qb.global[t], fb.pos_src);
    if (on.lp) {
      deform_samples(scene, fb.world_rot, fb.pos, fb.query_pos, fb.ref_pos);
      size_t q_at = 0, r_at = 0;
      int limb_offset = 0;
      for (int l = 0; l < kLimbCount; ++l) {
        int nq = static_cast<int>(scene.sample.limb_query[l].indices.size());
        for (int i = 0; i < nq; ++i) {
          const auto& entry = frozen.at(t, limb_offset, i);
          const Vec3& e = fb.query_pos[q_at + i];
          const Vec3& r = fb.ref_pos[r_at + entry.reference_slot];
          double depth = -dot(e - r, entry.normal);
          if (depth > 0.0) fb.lp_sum += depth;
        }
        limb_offset += nq;
        q_at += nq;
        r_at += scene.sample.limb_reference[l].indices.size();
      }
    }
    if (on.con || on.rec) {
      for (int k = 0; k < k_count; ++k) {
        Quat d = qb.rot(t, k) - canonical(src.rot(t, k));
        fb.con_rot += qdot(d, d);
      }
    }
    if (on.con) {
      for (int k = 0; k < k_count; ++k)
        fb.con_pos += norm2(fb.pos[k] - scene.copy_positions[static_cast<size_t>(t) * k_count + k]);
    }
    if (on.rec) {
      for (int k = 0; k < k_count; ++k)
        fb.rec_pos += norm2(fb.pos_src[k] - scene.source_positions[static_cast<size_t>(t) * k_count + k]);
    }
    if (on.j) {
      for (int k = 0; k < k_count; ++k) {
        Vec3 u = rotate_vec(fb.world_rot[k], scene.field.vectors[k]);
        fb.j_sum += norm2(u - scene.source_directions[static_cast<size_t>(t) * k_count + k]);
      }
    }
  });

  TemporalResult tc;
  if (on.tc) tc = temporal_term(scene, frame_positions, want_grad);

  double tk = static_cast<double>(t_count) * k_count;
  EvalOutput out;
  if (on.lp) {
    double lp = 0.0;
    for (const FrameBuffers& fb : frames) lp += fb.lp_sum / static_cast<double>(total_queries);
    out.terms.lp = lp / t_count;
  }
  if (on.con) {
    double rot = 0.0, pos = 0.0;
    for (const FrameBuffers& fb : frames) {
      rot += fb.con_rot;
      pos += fb.con_pos;
    }
    out.terms.con = rot / tk + pos / tk;
  }
  if (on.rec) {
    double rot = 0.0, pos = 0.0;
    for (const FrameBuffers& fb : frames) {
      rot += fb.con_rot;
      pos += fb.rec_pos;
    }
    out.terms.rec = rot / tk + pos / tk;
  }
  if (on.tc) out.terms.tc = tc.value;
  if (on.j) {
    double j = 0.0;
    for (const FrameBuffers& fb : frames) j += fb.j_sum;
    out.terms.j = j / tk;
  }
  const LossWeights& w = scene.weights;
  out.total = w.rec * out.terms.rec.value_or(0.0) + w.con * out.terms.con.value_or(0.0) +
              w.lp * out.terms.lp.value_or(0.0) + w.tc * out.terms.tc.value_or(0.0) +
              w.j * out.terms.j.value_or(0.0);
  out.terms.total = out.total;

  auto check_finite = [](const std::optional<double>& v, const char* name) {
    if (v && !std::isfinite(*v)) throw NumericError(std::string("non-finite loss term: ") + name);
  };
  check_finite(out.terms.lp, "limb_penetration");
  check_finite(out.terms.con, "constraint");
  check_finite(out.terms.rec, "reconstruction");
  check_finite(out.terms.tc, "temporal_consistency");
  check_finite(out.terms.j, "joint_orientation");

  if (!want_grad) return out;

  // ---- Backward ---------------------------------------------------------
  grad_out->assign(residual.raw.size(), {0.0, 0.0, 0.0, 0.0});
  const SkinnedCharacter& character = *scene.target_char;
  const auto& bind = character.bind_positions();
  double lp_coeff = on.lp ? w.lp / (static_cast<double>(total_queries) * t_count) : 0.0;
  double rot_coeff = 2.0 * (w.con * (on.con ? 1.0 : 0.0) + w.rec * (on.rec ? 1.0 : 0.0)) / tk;
  double con_pos_coeff = on.con ? 2.0 * w.con / tk : 0.0;
  double rec_pos_coeff = on.rec ? 2.0 * w.rec / tk : 0.0;
  double j_coeff = on.j ? 2.0 * w.j / tk : 0.0;

  parallel_for(t_count, scene.threads, [&](int t) {
    FrameBuffers& fb = frames[t];
    std::vector<Quat> g_rot(k_count, Quat{0, 0, 0, 0});
    std::vector<Vec3> g_pos(k_count, Vec3{});
    std::vector<Vec3> g_pos_src;
    if (on.rec) g_pos_src.assign(k_count, Vec3{});

    auto lbs_backward = [&](int vertex, const Vec3& g) {
      for (const SkinInfluence& inf : character.weights[vertex]) {
        Vec3 gw = inf.weight * g;
        g_pos[inf.joint] += gw;
        Vec3 gv_unused{};
        rotate_vec_backward(fb.world_rot[inf.joint], character.vertices[vertex] - bind[inf.joint], gw,
                            g_rot[inf.joint], gv_unused);
      }
    };

    if (on.lp && lp_coeff > 0.0) {
      size_t q_at = 0, r_at = 0;
      int limb_offset = 0;
      for (int l = 0; l < kLimbCount; ++l) {
        const auto& queries = scene.sample.limb_query[l].indices;
        const auto& refs = scene.sample.limb_reference[l].indices;
        for (size_t i = 0; i < queries.size(); ++i) {
          const auto& entry = frozen.at(t, limb_offset, static_cast<int>(i));
          const Vec3& e = fb.query_pos[q_at + i];
          const Vec3& r = fb.ref_pos[r_at + entry.reference_slot];
          double depth = -dot(e - r, entry.normal);
          if (depth > 0.0) {
            lbs_backward(queries[i], (-lp_coeff) * entry.normal);
            lbs_backward(refs[entry.reference_slot], lp_coeff * entry.normal);
          }
        }
        limb_offset += static_cast<int>(queries.size());
        q_at += queries.size();
        r_at += refs.size();
      }
    }
    if (on.con) {
      for (int k = 0; k < k_count; ++k)
        g_pos[k] += con_pos_coeff *
                    (fb.pos[k] - scene.copy_positions[static_cast<size_t>(t) * k_count + k]);
    }
    if (on.rec) {
      for (int k = 0; k < k_count; ++k)
        g_pos_src[k] += rec_pos_coeff *
                        (fb.pos_src[k] - scene.source_positions[static_cast<size_t>(t) * k_count + k]);
    }
    if (on.tc) {
      for (int k = 0; k < k_count; ++k)
        g_pos[k] += w.tc * tc.g_pos[static_cast<size_t>(t) * k_count + k];
    }
    if (on.j) {
      for (int k = 0; k < k_count; ++k) {
        Vec3 u = rotate_vec(fb.world_rot[k], scene.field.vectors[k]);
        Vec3 g = j_coeff * (u - scene.source_directions[static_cast<size_t>(t) * k_count + k]);
        Vec3 gv_unused{};
        rotate_vec_backward(fb.world_rot[k], scene.field.vectors[k], g, g_rot[k], gv_unused);
      }
    }

    // FK backward: children before parents (indices are topological).
    std::vector<Quat> g_local(k_count, Quat{0, 0, 0, 0});
    for (int k = k_count - 1; k >= 0; --k) {
      int parent = skel_tgt.joints[k].parent;
      if (parent < 0) {
        g_local[k] = g_rot[k];
        continue;
      }
      g_pos[parent] += g_pos[k];
      Vec3 gv_unused{};
      rotate_vec_backward(fb.world_rot[parent], skel_tgt.joints[k].offset, g_pos[k], g_rot[parent],
                          gv_unused);
      if (on.rec) {
        g_pos_src[parent] += g_pos_src[k];
        rotate_vec_backward(fb.world_rot[parent], skel_src.joints[k].offset, g_pos_src[k],
                            g_rot[parent], gv_unused);
      }
      qmul_backward(fb.world_rot[parent], qb.rot(t, k), g_rot[k], g_rot[parent], g_local[k]);
    }

    // Through canonicalization, the residual-source product, and the
    // normalize-on-use map back to the raw parameters.
    for (int k = 0; k < k_count; ++k) {
      size_t idx = static_cast<size_t>(t) * k_count + k;
      Quat g_qb = g_local[k];
      // Direct rotation-difference contribution (constraint/reconstruction).
      if (rot_coeff != 0.0) {
        Quat d = qb.rotations[idx] - canonical(src.rotations[idx]);
        g_qb += rot_coeff * d;
      }
      Quat g_m = composed.sign[idx] * g_qb;
      Quat g_unit{0, 0, 0, 0}, g_src_unused{0, 0, 0, 0};
      qmul_backward(composed.unit_residual[idx], src.rotations[idx], g_m, g_unit, g_src_unused);
      const auto& r = residual.raw[idx];
      Quat g_raw = qnormalize_backward(Quat{r[0], r[1], r[2], r[3]}, g_unit);
      (*grad_out)[idx] = {g_raw.w, g_raw.x, g_raw.y, g_raw.z};
    }
  });

  for (const auto& g : *grad_out)
    for (double v : g)
      if (!std::isfinite(v)) throw NumericError("non-finite gradient");
  return out;
}

}  // namespace

ResidualMotion ResidualMotion::identity(int frames, int joints) {
  ResidualMotion r;
  r.frame_count = frames;
  r.joint_count = joints;
  r.raw.assign(static_cast<size_t>(frames) * joints, {1.0, 0.0, 0.0, 0.0});
  return r;
}

std::vector<std::array<double, 4>> normalize_global(const std::vector<std::array<double, 4>>& global,
                                                    double source_height, double target_height) {
  if (source_height <= 0.0 || target_height <= 0.0)
    throw DomainError("heights must be positive for global normalization");
  double ratio = target_height / source_height;
  std::vector<std::array<double, 4>> out = global;
  for (auto& d : out) {
    d[0] *= ratio;
    d[1] *= ratio;
    d[2] *= ratio;
  }
  return out;
}

Motion compose_motion(const ResidualMotion& residual, const Motion& source, double source_height,
                      double target_height) {
  if (residual.frame_count != source.frame_count || residual.joint_count != source.joint_count)
    throw ShapeError("residual and source motion dimensions differ");
  Motion out;
  out.frame_count = source.frame_count;
  out.joint_count = source.joint_count;
  out.frame_rate = source.frame_rate;
  out.global = normalize_global(source.global, source_height, target_height);
  out.rotations.resize(source.rotations.size());
  for (size_t i = 0; i < source.rotations.size(); ++i) {
    const auto& r = residual.raw[i];
    Quat unit = quat_normalize(Quat{r[0], r[1], r[2], r[3]});
    out.rotations[i] = canonical(qmul_raw(unit, source.rotations[i]));
  }
  return out;
}

Motion compose_motion(const ResidualMotion& residual, const Motion& source) {
  return compose_motion(residual, source, 1.0, 1.0);
}

FrozenCorrespondences freeze_correspondences(const RetargetScene& scene, const Motion& candidate) {
  int t_count = candidate.frame_count;
  FrozenCorrespondences frozen;
  int per_frame = 0;
  for (int l = 0; l < kLimbCount; ++l) {
    frozen.query_counts[l] = static_cast<int>(scene.sample.limb_query[l].indices.size());
    per_frame += frozen.query_counts[l];
  }
  frozen.per_frame = per_frame;
  frozen.entries.resize(static_cast<size_t>(t_count) * per_frame);

  const SkinnedCharacter& character = *scene.target_char;
  parallel_for(t_count, scene.threads, [&](int t) {
    Pose pose = forward_kinematics(character.skeleton, candidate, t);
    std::vector<Vec3> query_pos, ref_pos, ref_nrm;
    int limb_offset = 0;
    for (int l = 0; l < kLimbCount; ++l) {
      const auto& queries = scene.sample.limb_query[l].indices;
      const auto& refs = scene.sample.limb_reference[l].indices;
      query_pos.resize(queries.size());
      ref_pos.resize(refs.size());
      ref_nrm.resize(refs.size());
      lbs_deform_points(character, pose, queries, query_pos, {});
      lbs_deform_points(character, pose, refs, ref_pos, ref_nrm);
      ProximityIndex index(ref_pos, ref_nrm);
      for (size_t i = 0; i < queries.size(); ++i) {
        auto hit = index.nearest(query_pos[i]);
        frozen.entries[static_cast<size_t>(t) * per_frame + limb_offset + i] = {hit.index,
                                                                                ref_nrm[hit.index]};
      }
      limb_offset += static_cast<int>(queries.size());
    }
  });
  return frozen;
}

double frozen_total_loss(const RetargetScene& scene, const ResidualMotion& residual,
                         const FrozenCorrespondences& frozen) {
  return evaluate_objective(scene, residual, frozen, nullptr).total;
}

GradientResult loss_gradient(const RetargetScene& scene, const ResidualMotion& residual,
                             const FrozenCorrespondences& frozen) {
  GradientResult result;
  EvalOutput out = evaluate_objective(scene, residual, frozen, &result.gradient);
  result.total = out.total;
  result.terms = out.terms;
  return result;
}

}  // namespace retarget
