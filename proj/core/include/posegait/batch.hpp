#pragma once

#include <string>
#include <vector>

#include "posegait/sampling/spec.hpp"

namespace posegait {

/// One transformed sequence ready for stacking: L frames x V keypoints x C
/// channels (C = 2 * |multi-input branches| for 2-D input).
struct FeatureArray {
  int t = 0;
  int v = 0;
  int c = 0;
  std::vector<double> data;

  std::size_t offset(int it, int iv, int ic) const {
    return (static_cast<std::size_t>(it) * v + iv) * c + ic;
  }
  double& at(int it, int iv, int ic) { return data[offset(it, iv, ic)]; }
  const double& at(int it, int iv, int ic) const { return data[offset(it, iv, ic)]; }
};

/// Ordered batch produced by a sampler: parallel lists of equal length.
/// Labels are dense integer codes over the training subjects.
struct SampleBatch {
  std::vector<FeatureArray> sequences;
  std::vector<int> labels;
  std::vector<std::string> views;
  sampling::SamplerSpec spec;

  int size() const { return static_cast<int>(sequences.size()); }
};

}  // namespace posegait
