#include "posegait/sequence.hpp"

#include <cmath>

namespace posegait {

ValidationReport validate_sequence(const SkeletonSequence& seq,
                                   const SkeletonGraph& graph) {
  ValidationReport r;
  if (seq.t < 1) r.problems.push_back("frame count must be >= 1, got " + std::to_string(seq.t));
  if (seq.v != graph.num_keypoints)
    r.problems.push_back("keypoint count mismatch: sequence has " + std::to_string(seq.v) +
                         ", layout '" + graph.layout_id + "' expects " +
                         std::to_string(graph.num_keypoints));
  if (seq.c != 2 && seq.c != 3)
    r.problems.push_back("channel count must be 2 or 3, got " + std::to_string(seq.c));
  if (!seq.layout_id.empty() && seq.layout_id != graph.layout_id)
    r.problems.push_back("layout mismatch: sequence says '" + seq.layout_id +
                         "', graph is '" + graph.layout_id + "'");
  if (seq.data.size() != static_cast<std::size_t>(seq.t) * seq.v * seq.c) {
    r.problems.push_back("data size " + std::to_string(seq.data.size()) +
                         " does not match T*V*C");
    return r;  // indexing below would be unsafe
  }
  for (int it = 0; it < seq.t; ++it)
    for (int iv = 0; iv < seq.v; ++iv)
      for (int ic = 0; ic < seq.c; ++ic)
        if (!std::isfinite(seq.at(it, iv, ic))) {
          r.problems.push_back("non-finite value at (" + std::to_string(it) + "," +
                               std::to_string(iv) + "," + std::to_string(ic) + ")");
          return r;  // first occurrence locates the problem
        }
  return r;
}

}  // namespace posegait
