#pragma once

#include <string>
#include <vector>

#include "posegait/batch.hpp"
#include "posegait/graph.hpp"
#include "posegait/sequence.hpp"

namespace posegait::transforms {

enum class Branch { joint, bone, angle, velocity };

Branch branch_from_string(const std::string& name);
std::string to_string(Branch b);

/// Canonical branch order (joint, bone, angle, velocity) regardless of the
/// order the caller lists them in.
std::vector<Branch> normalize_branches(const std::vector<Branch>& branches);

/// Channel-concatenated derived features over the first two (coordinate)
/// channels; any confidence channel is dropped. Output is T x V x 2|B| with:
///   joint      raw coordinates
///   bone       joint[v] - joint[parent(v)]   (root bone = 0)
///   angle      bone / max(|bone|, 1e-6)      (unit bone direction)
///   velocity   joint[t+1] - joint[t]         (last frame = 0)
FeatureArray multi_input(const SkeletonSequence& seq, const SkeletonGraph& graph,
                         const std::vector<Branch>& branches);

}  // namespace posegait::transforms
