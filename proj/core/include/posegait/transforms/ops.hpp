#pragma once

#include "posegait/graph.hpp"
#include "posegait/rng.hpp"
#include "posegait/sequence.hpp"

namespace posegait::transforms {

/// Swaps the channels of each (left, right) symmetric keypoint pair in every
/// frame. Involution; identity when the graph has no pairs.
SkeletonSequence inverse_poses_pre(const SkeletonSequence& seq,
                                   const SkeletonGraph& graph);

/// Horizontal flip: per frame, x' = 2*cx - x about the frame's x-centroid;
/// y (and any confidence channel) unchanged. The axis is the centroid
/// snapped to the 2^-40 grid with half-even integer rounding, which keeps
/// the centroid within 2^-40 of the true mean and makes the snapped axis
/// exactly invariant under the flip itself, so applying the transform twice
/// restores every binary32-scale coordinate bit-exactly.
SkeletonSequence mirror_poses(const SkeletonSequence& seq);

/// i.i.d. Gaussian noise per (t, v, c) over coordinate channels.
SkeletonSequence point_noise(const SkeletonSequence& seq, Rng& rng, double std);

/// One Gaussian offset per (keypoint, channel), shared across all frames.
SkeletonSequence joint_noise(const SkeletonSequence& seq, Rng& rng, double std);

/// Smooth whole-sequence drift: global translation and scale interpolated
/// linearly between random endpoint values of amplitude `amp`.
SkeletonSequence random_move(const SkeletonSequence& seq, Rng& rng, double amp);

/// Reverses frame order. Involution.
SkeletonSequence flip_sequence(const SkeletonSequence& seq);

enum class SelectMode { window, subset };

/// Exactly L frames in original relative order: a random contiguous window
/// by default, or a random order-preserving subset with SelectMode::subset.
/// When T < L the frames repeat cyclically (t mod T).
SkeletonSequence random_select(const SkeletonSequence& seq, Rng& rng, int length,
                               SelectMode mode = SelectMode::window);

}  // namespace posegait::transforms
