#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "posegait/graph.hpp"

namespace posegait {

/// One gait sample: T frames of V keypoints with C channels (x, y[, conf]),
/// stored t-major, v-next, c-innermost. Coordinates are kept in binary64 in
/// memory; the on-disk format is binary32 (see ingest::write_sequence).
struct SkeletonSequence {
  int t = 0;
  int v = 0;
  int c = 0;
  std::vector<double> data;  // size t*v*c

  std::string subject_id;
  std::string condition;
  std::string view;
  std::string layout_id;

  static SkeletonSequence zeros(int t, int v, int c) {
    SkeletonSequence s;
    s.t = t;
    s.v = v;
    s.c = c;
    s.data.assign(static_cast<std::size_t>(t) * v * c, 0.0);
    return s;
  }

  std::size_t offset(int it, int iv, int ic) const {
    return (static_cast<std::size_t>(it) * v + iv) * c + ic;
  }
  double& at(int it, int iv, int ic) { return data[offset(it, iv, ic)]; }
  const double& at(int it, int iv, int ic) const { return data[offset(it, iv, ic)]; }

  bool operator==(const SkeletonSequence&) const = default;
};

/// One violation per entry; empty report means the sequence is valid.
struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Reports every violated sequence invariant against the given graph:
/// T >= 1, V == graph keypoints, C in {2,3}, layout match, finite values
/// (non-finite entries are located as (t,v,c)). Reporting, not throwing.
ValidationReport validate_sequence(const SkeletonSequence& seq,
                                   const SkeletonGraph& graph);

}  // namespace posegait
