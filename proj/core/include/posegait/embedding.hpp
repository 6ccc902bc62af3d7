#pragma once

#include <string>
#include <vector>

#include "posegait/matrix.hpp"

namespace posegait {

/// Model outputs: one d-dimensional feature vector per sequence, with the
/// metadata needed by losses (labels) and retrieval evaluation (views,
/// conditions). Immutable by convention once filled.
struct EmbeddingSet {
  Matrix<double> vectors;  // N x d
  std::vector<int> labels;
  std::vector<std::string> views;
  std::vector<std::string> conditions;

  int size() const { return vectors.rows; }
  int dim() const { return vectors.cols; }
  const double* vec(int i) const { return vectors.row(i); }
};

/// Throws Error("shape") on inconsistent lengths or empty set,
/// Error("non_finite") on NaN/Inf entries.
void validate_embeddings(const EmbeddingSet& e);

}  // namespace posegait
