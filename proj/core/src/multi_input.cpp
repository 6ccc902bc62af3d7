#include "posegait/transforms/multi_input.hpp"

#include <algorithm>
#include <cmath>

#include "posegait/error.hpp"

namespace posegait::transforms {

Branch branch_from_string(const std::string& name) {
  if (name == "joint") return Branch::joint;
  if (name == "bone") return Branch::bone;
  if (name == "angle") return Branch::angle;
  if (name == "velocity") return Branch::velocity;
  throw Error(errc::unknown_branch, "unknown multi-input branch '" + name + "'");
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::joint: return "joint";
    case Branch::bone: return "bone";
    case Branch::angle: return "angle";
    default: return "velocity";
  }
}

std::vector<Branch> normalize_branches(const std::vector<Branch>& branches) {
  std::vector<Branch> out;
  for (Branch b : {Branch::joint, Branch::bone, Branch::angle, Branch::velocity})
    if (std::find(branches.begin(), branches.end(), b) != branches.end())
      out.push_back(b);
  return out;
}

FeatureArray multi_input(const SkeletonSequence& seq, const SkeletonGraph& graph,
                         const std::vector<Branch>& branches) {
  if (branches.empty())
    throw Error(errc::unknown_branch, "multi_input requires at least one branch");
  if (seq.v != graph.num_keypoints)
    throw Error(errc::shape, "sequence keypoints do not match graph");
  const std::vector<Branch> order = normalize_branches(branches);
  constexpr double kMinBoneNorm = 1e-6;

  FeatureArray out;
  out.t = seq.t;
  out.v = seq.v;
  out.c = 2 * static_cast<int>(order.size());
  out.data.assign(static_cast<std::size_t>(out.t) * out.v * out.c, 0.0);

  auto bone_at = [&](int t, int v, double& bx, double& by) {
    const int parent = graph.parent_of(v);
    if (parent == v) {
      bx = 0.0;
      by = 0.0;
      return;
    }
    bx = seq.at(t, v, 0) - seq.at(t, parent, 0);
    by = seq.at(t, v, 1) - seq.at(t, parent, 1);
  };

  int ch = 0;
  for (Branch b : order) {
    for (int t = 0; t < seq.t; ++t)
      for (int v = 0; v < seq.v; ++v) {
        double x = 0.0, y = 0.0;
        switch (b) {
          case Branch::joint:
            x = seq.at(t, v, 0);
            y = seq.at(t, v, 1);
            break;
          case Branch::bone:
            bone_at(t, v, x, y);
            break;
          case Branch::angle: {
            bone_at(t, v, x, y);
            const double norm = std::max(std::sqrt(x * x + y * y), kMinBoneNorm);
            x /= norm;
            y /= norm;
            break;
          }
          case Branch::velocity:
            if (t + 1 < seq.t) {
              x = seq.at(t + 1, v, 0) - seq.at(t, v, 0);
              y = seq.at(t + 1, v, 1) - seq.at(t, v, 1);
            }
            break;
        }
        out.at(t, v, ch) = x;
        out.at(t, v, ch + 1) = y;
      }
    ch += 2;
  }
  return out;
}

}  // namespace posegait::transforms
