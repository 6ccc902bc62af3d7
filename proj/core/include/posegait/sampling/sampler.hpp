#pragma once

#include <cstdint>
#include <vector>

#include "posegait/batch.hpp"
#include "posegait/ingest/index.hpp"
#include "posegait/sampling/spec.hpp"
#include "posegait/transforms/pipeline.hpp"

namespace posegait::sampling {

/// The index entries and dense labels chosen for one batch, before any
/// sequence is loaded or transformed.
struct BatchPlan {
  std::vector<int> entry_ids;  // indices into DatasetIndex::entries
  std::vector<int> labels;
};

/// Samplers are infinite streams addressed by batch ordinal: batch i is a
/// pure function of (index, spec, spec.seed, i), so equal inputs give equal
/// batches and any ordinal can be replayed without advancing a stream.
BatchPlan plan_batch(const ingest::DatasetIndex& index, const SamplerSpec& spec,
                     std::uint64_t ordinal);

/// Loads, augments and multi-inputs every planned entry. When `two_view` is
/// set the batch holds 2N entries: i and i+N are independently augmented
/// views of the same sequence.
SampleBatch assemble_batch(const ingest::DatasetIndex& index,
                           ingest::SequenceStore& store, const SamplerSpec& spec,
                           const transforms::TransformSpec& transform,
                           const SkeletonGraph& graph, std::uint64_t ordinal,
                           bool two_view = false);

}  // namespace posegait::sampling
