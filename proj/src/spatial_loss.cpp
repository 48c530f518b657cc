#include "retarget/spatial_loss.hpp"

#include <cmath>

#include "retarget/parallel.hpp"
#include "retarget/proximity.hpp"

namespace retarget {

PenetrationBreakdown limb_penetration_loss(const SkinnedCharacter& character,
                                           const LimbSegmentation& segmentation,
                                           const PointSample& sample, const Motion& motion,
                                           const PenetrationOptions& options) {
  (void)segmentation;
  int frames = motion.frame_count;
  if (frames < 1) throw ShapeError("motion has no frames");
  std::int64_t total_queries = 0;
  for (int l = 0; l < kLimbCount; ++l) {
    if (sample.limb_query[l].indices.empty()) throw DomainError("empty limb query sample");
    if (sample.limb_reference[l].indices.empty()) throw DomainError("empty limb reference sample");
    total_queries += static_cast<std::int64_t>(sample.limb_query[l].indices.size());
  }

  PenetrationBreakdown out;
  for (int l = 0; l < kLimbCount; ++l) out.per_limb_frame_mean[l].assign(frames, 0.0);
  std::vector<double> frame_sum(frames, 0.0);
  std::vector<std::int64_t> frame_count(frames, 0);

  parallel_for(frames, options.threads, [&](int t) {
    Pose pose = forward_kinematics(character.skeleton, motion, t);
    std::vector<Vec3> query_pos, ref_pos, ref_nrm;
    for (int l = 0; l < kLimbCount; ++l) {
      const auto& queries = sample.limb_query[l].indices;
      const auto& refs = sample.limb_reference[l].indices;
      query_pos.resize(queries.size());
      ref_pos.resize(refs.size());
      ref_nrm.resize(refs.size());
      lbs_deform_points(character, pose, queries, query_pos, {});
      lbs_deform_points(character, pose, refs, ref_pos, ref_nrm);

      double limb_sum = 0.0;
      std::int64_t limb_hits = 0;
      if (options.brute_force) {
        for (const Vec3& q : query_pos) {
          auto hit = nearest_brute(ref_pos, q);
          double depth = -dot(q - ref_pos[hit.index], ref_nrm[hit.index]) + options.margin;
          if (!std::isfinite(depth)) throw NumericError("non-finite penetration depth");
          if (depth > 0.0) {
            limb_sum += depth;
            ++limb_hits;
          }
        }
      } else {
        ProximityIndex index(ref_pos, ref_nrm);
        for (const Vec3& q : query_pos) {
          double depth = index.signed_depth(q).depth + options.margin;
          if (!std::isfinite(depth)) throw NumericError("non-finite penetration depth");
          if (depth > 0.0) {
            limb_sum += depth;
            ++limb_hits;
          }
        }
      }
      out.per_limb_frame_mean[l][t] = limb_sum / static_cast<double>(queries.size());
      frame_sum[t] += limb_sum;
      frame_count[t] += limb_hits;
    }
  });

  for (int t = 0; t < frames; ++t) {
    out.total += frame_sum[t] / static_cast<double>(total_queries);
    out.penetrating_count += frame_count[t];
  }
  out.total /= static_cast<double>(frames);
  return out;
}

}  // namespace retarget
