#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "posegait/matrix.hpp"

namespace posegait {

/// Keypoint topology for one skeleton layout: undirected edges, left/right
/// symmetric pairs, and a rooted bone tree (child -> parent).
/// Immutable after construction; safe to share across threads.
struct SkeletonGraph {
  std::string layout_id;
  int num_keypoints = 0;
  std::vector<std::pair<int, int>> edges;            // undirected, a < b
  std::vector<std::pair<int, int>> symmetric_pairs;  // (left, right)
  std::vector<int> bone_parent;  // parent index per keypoint; root maps to itself
  int root = 0;

  int parent_of(int v) const { return bone_parent[static_cast<std::size_t>(v)]; }
  bool has_edge(int a, int b) const;
};

/// Throws Error("invalid_graph") describing every violated structural
/// invariant: index ranges, self-loops, pair involution, bone-tree rootedness.
void validate_graph(const SkeletonGraph& g);

/// Layout registry. "coco17" and "pose18" are built in; additional layouts
/// can be registered programmatically or loaded from a config file.
SkeletonGraph build_graph(const std::string& layout_id);
bool layout_registered(const std::string& layout_id);
std::vector<std::string> registered_layouts();
void register_layout(const SkeletonGraph& g);

/// Loads a layout from a JSON file with keys:
///   layout_id, num_keypoints, edges, symmetric_pairs, bone_parent, root
/// and registers it (overriding any layout with the same id).
SkeletonGraph load_layout_file(const std::string& path);

/// Symmetrically normalized adjacency with self-loops:
///   A_hat = D^(-1/2) (A + I) D^(-1/2),  D = diag(rowsum(A + I)).
/// Symmetric, entries >= 0, eigenvalues in [-1, 1].
MatD normalized_adjacency(const SkeletonGraph& g);

}  // namespace posegait
