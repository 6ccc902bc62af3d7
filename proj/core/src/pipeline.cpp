#include "posegait/transforms/pipeline.hpp"

#include <cmath>

#include "posegait/error.hpp"

namespace posegait::transforms {

OpKind op_kind_from_string(const std::string& name) {
  if (name == "inverse_poses_pre") return OpKind::inverse_poses_pre;
  if (name == "mirror_poses") return OpKind::mirror_poses;
  if (name == "point_noise") return OpKind::point_noise;
  if (name == "joint_noise") return OpKind::joint_noise;
  if (name == "random_move") return OpKind::random_move;
  if (name == "flip_sequence") return OpKind::flip_sequence;
  if (name == "random_select") return OpKind::random_select;
  throw Error(errc::config, "unknown transform '" + name + "'");
}

std::string to_string(OpKind k) {
  switch (k) {
    case OpKind::inverse_poses_pre: return "inverse_poses_pre";
    case OpKind::mirror_poses: return "mirror_poses";
    case OpKind::point_noise: return "point_noise";
    case OpKind::joint_noise: return "joint_noise";
    case OpKind::random_move: return "random_move";
    case OpKind::flip_sequence: return "flip_sequence";
    default: return "random_select";
  }
}

void TransformSpec::validate() const {
  for (const auto& op : ops) {
    if (op.probability < 0.0 || op.probability > 1.0)
      throw Error(errc::config, "transform probability must be in [0, 1]");
    switch (op.kind) {
      case OpKind::point_noise:
      case OpKind::joint_noise:
      case OpKind::random_move:
        if (op.value < 0.0)
          throw Error(errc::config, to_string(op.kind) + " parameter must be >= 0");
        break;
      case OpKind::random_select:
        if (op.value < 1.0 || op.value != std::floor(op.value))
          throw Error(errc::config, "random_select length must be an integer >= 1");
        break;
      default:
        break;
    }
  }
  if (branches.empty())
    throw Error(errc::config, "multi-input branch set must be non-empty");
}

SkeletonSequence apply_ops(const SkeletonSequence& seq, const SkeletonGraph& graph,
                           const TransformSpec& spec, Rng& rng) {
  SkeletonSequence cur = seq;
  for (const auto& op : spec.ops) {
    switch (op.kind) {
      case OpKind::inverse_poses_pre:
        if (rng.uniform() < op.probability) cur = inverse_poses_pre(cur, graph);
        break;
      case OpKind::mirror_poses:
        if (rng.uniform() < op.probability) cur = mirror_poses(cur);
        break;
      case OpKind::flip_sequence:
        if (rng.uniform() < op.probability) cur = flip_sequence(cur);
        break;
      case OpKind::point_noise:
        cur = point_noise(cur, rng, op.value);
        break;
      case OpKind::joint_noise:
        cur = joint_noise(cur, rng, op.value);
        break;
      case OpKind::random_move:
        cur = random_move(cur, rng, op.value);
        break;
      case OpKind::random_select:
        cur = random_select(cur, rng, static_cast<int>(op.value), op.select_mode);
        break;
    }
  }
  return cur;
}

FeatureArray apply_pipeline(const SkeletonSequence& seq, const SkeletonGraph& graph,
                            const TransformSpec& spec, Rng& rng) {
  return multi_input(apply_ops(seq, graph, spec, rng), graph, spec.branches);
}

FeatureArray eval_features(const SkeletonSequence& seq, const SkeletonGraph& graph,
                           const TransformSpec& spec) {
  return multi_input(seq, graph, spec.branches);
}

}  // namespace posegait::transforms
