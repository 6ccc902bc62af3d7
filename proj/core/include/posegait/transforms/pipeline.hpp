#pragma once

#include <string>
#include <vector>

#include "posegait/transforms/multi_input.hpp"
#include "posegait/transforms/ops.hpp"

namespace posegait::transforms {

enum class OpKind {
  inverse_poses_pre,
  mirror_poses,
  point_noise,
  joint_noise,
  random_move,
  flip_sequence,
  random_select
};

OpKind op_kind_from_string(const std::string& name);
std::string to_string(OpKind k);

/// One pipeline step. `probability` gates the stochastic flips
/// (inverse/mirror/flip); deterministic-parameter ops ignore it when set
/// to 1. `value` is the op parameter: noise std, move amplitude, or
/// selection length.
struct OpSpec {
  OpKind kind;
  double probability = 1.0;
  double value = 0.0;
  SelectMode select_mode = SelectMode::window;
};

/// Ordered augmentation pipeline plus the multi-input branch set.
/// Application order is exactly the listed order.
struct TransformSpec {
  std::vector<OpSpec> ops;
  std::vector<Branch> branches = {Branch::joint};

  /// Throws Error("config") on invalid parameters (negative stds,
  /// length < 1, probabilities outside [0,1], empty branch set).
  void validate() const;
};

/// Applies every op in order, consuming randomness from `rng` only.
SkeletonSequence apply_ops(const SkeletonSequence& seq, const SkeletonGraph& graph,
                           const TransformSpec& spec, Rng& rng);

/// apply_ops followed by multi_input.
FeatureArray apply_pipeline(const SkeletonSequence& seq, const SkeletonGraph& graph,
                            const TransformSpec& spec, Rng& rng);

/// Deterministic evaluation-time variant: no augmentation, no frame
/// selection (full sequence), just multi_input.
FeatureArray eval_features(const SkeletonSequence& seq, const SkeletonGraph& graph,
                           const TransformSpec& spec);

}  // namespace posegait::transforms
