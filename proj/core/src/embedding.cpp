#include "posegait/embedding.hpp"

#include <cmath>

#include "posegait/error.hpp"

namespace posegait {

void validate_embeddings(const EmbeddingSet& e) {
  if (e.vectors.rows < 1 || e.vectors.cols < 1)
    throw Error(errc::shape, "embedding set must be non-empty (N >= 1, d >= 1)");
  const auto n = static_cast<std::size_t>(e.vectors.rows);
  if (e.labels.size() != n)
    throw Error(errc::shape, "labels length does not match embedding count");
  if (!e.views.empty() && e.views.size() != n)
    throw Error(errc::shape, "views length does not match embedding count");
  if (!e.conditions.empty() && e.conditions.size() != n)
    throw Error(errc::shape, "conditions length does not match embedding count");
  for (double x : e.vectors.data)
    if (!std::isfinite(x))
      throw Error(errc::non_finite, "embedding set contains a non-finite value");
}

}  // namespace posegait
