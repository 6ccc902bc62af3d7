#include "posegait/sampling/sampler.hpp"

#include <algorithm>
#include <map>

#include "posegait/error.hpp"
#include "posegait/rng.hpp"

namespace posegait::sampling {

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::random: return "random";
    case SamplerKind::triplet: return "triplet";
    default: return "random_triplet";
  }
}

SamplerKind sampler_kind_from_string(const std::string& s) {
  if (s == "random") return SamplerKind::random;
  if (s == "triplet") return SamplerKind::triplet;
  if (s == "random_triplet") return SamplerKind::random_triplet;
  throw Error(errc::config, "unknown sampler kind '" + s + "'");
}

void validate_spec(const SamplerSpec& spec) {
  switch (spec.kind) {
    case SamplerKind::random:
      if (spec.batch_size < 1)
        throw Error(errc::constraint, "random sampler requires batch_size >= 1");
      break;
    case SamplerKind::triplet:
      if (spec.p < 2)
        throw Error(errc::constraint, "triplet sampler requires P >= 2, got P = " +
                                          std::to_string(spec.p));
      if (spec.k < 2)
        throw Error(errc::constraint, "triplet sampler requires K >= 2, got K = " +
                                          std::to_string(spec.k));
      break;
    case SamplerKind::random_triplet: {
      if (spec.batch_size < 1)
        throw Error(errc::constraint, "random_triplet sampler requires batch_size >= 1");
      if (spec.p < 2)
        throw Error(errc::constraint,
                    "random_triplet sampler requires P >= 2, got P = " +
                        std::to_string(spec.p));
      const int k = spec.derived_k();
      if (k < 2)
        throw Error(errc::constraint,
                    "random_triplet sampler requires K >= 2, got K = floor(" +
                        std::to_string(spec.batch_size) + "/" + std::to_string(spec.p) +
                        ") = " + std::to_string(k) +
                        " (P*K + c = batch_size with 0 <= c < P)");
      break;
    }
  }
}

namespace {

struct TrainView {
  std::vector<int> entry_ids;                       // train split, index order
  std::vector<std::string> subjects;                // sorted unique
  std::map<std::string, std::vector<int>> by_subject;
  std::map<std::string, int> codes;
};

TrainView train_view(const ingest::DatasetIndex& index) {
  TrainView tv;
  tv.entry_ids = index.split_ids(ingest::Split::train);
  for (int id : tv.entry_ids)
    tv.by_subject[index.entries[static_cast<std::size_t>(id)].subject_id].push_back(id);
  int code = 0;
  for (const auto& [subject, ids] : tv.by_subject) {
    tv.subjects.push_back(subject);
    tv.codes[subject] = code++;
  }
  return tv;
}

void append_subject_draws(const TrainView& tv, const std::string& subject, int k,
                          Rng& rng, BatchPlan& plan) {
  const auto& pool = tv.by_subject.at(subject);
  const int n = static_cast<int>(pool.size());
  std::vector<int> picks;
  if (n >= k) {
    picks = rng.sample_without_replacement(n, k);
  } else {
    // Subject has fewer than K sequences: keep (P,K) exact by drawing with
    // replacement within the subject.
    picks.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      picks[static_cast<std::size_t>(i)] =
          static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  }
  for (int p : picks) {
    plan.entry_ids.push_back(pool[static_cast<std::size_t>(p)]);
    plan.labels.push_back(tv.codes.at(subject));
  }
}

BatchPlan plan_random(const ingest::DatasetIndex& index, const TrainView& tv,
                      const SamplerSpec& spec, Rng& rng) {
  const int n = static_cast<int>(tv.entry_ids.size());
  if (spec.batch_size > n)
    throw Error(errc::constraint,
                "batch_size " + std::to_string(spec.batch_size) +
                    " exceeds train set size " + std::to_string(n));
  BatchPlan plan;
  for (int pick : rng.sample_without_replacement(n, spec.batch_size)) {
    const int id = tv.entry_ids[static_cast<std::size_t>(pick)];
    plan.entry_ids.push_back(id);
    plan.labels.push_back(
        tv.codes.at(index.entries[static_cast<std::size_t>(id)].subject_id));
  }
  return plan;
}

BatchPlan plan_triplet(const TrainView& tv, const SamplerSpec& spec, Rng& rng) {
  const int subjects = static_cast<int>(tv.subjects.size());
  if (spec.p > subjects)
    throw Error(errc::constraint, "P = " + std::to_string(spec.p) +
                                      " exceeds subject count " +
                                      std::to_string(subjects));
  BatchPlan plan;
  for (int pick : rng.sample_without_replacement(subjects, spec.p))
    append_subject_draws(tv, tv.subjects[static_cast<std::size_t>(pick)], spec.k,
                         rng, plan);
  return plan;
}

BatchPlan plan_random_triplet(const ingest::DatasetIndex& index, const TrainView& tv,
                              const SamplerSpec& spec, Rng& rng) {
  const int subjects = static_cast<int>(tv.subjects.size());
  if (spec.p > subjects)
    throw Error(errc::constraint, "P = " + std::to_string(spec.p) +
                                      " exceeds subject count " +
                                      std::to_string(subjects));
  const int k = spec.derived_k();
  const int c = spec.c();
  BatchPlan plan;
  for (int pick : rng.sample_without_replacement(subjects, spec.p))
    append_subject_draws(tv, tv.subjects[static_cast<std::size_t>(pick)], k, rng, plan);

  // The c remainder sequences come from the training entries not already in
  // this batch (excluding selected sequences, not selected subjects).
  std::vector<char> taken(index.entries.size(), 0);
  for (int id : plan.entry_ids) taken[static_cast<std::size_t>(id)] = 1;
  std::vector<int> remaining;
  for (int id : tv.entry_ids)
    if (!taken[static_cast<std::size_t>(id)]) remaining.push_back(id);
  if (static_cast<int>(remaining.size()) < c)
    throw Error(errc::constraint, "train set too small for " + std::to_string(c) +
                                      " remainder sequences");
  for (int pick : rng.sample_without_replacement(static_cast<int>(remaining.size()), c)) {
    const int id = remaining[static_cast<std::size_t>(pick)];
    plan.entry_ids.push_back(id);
    plan.labels.push_back(
        tv.codes.at(index.entries[static_cast<std::size_t>(id)].subject_id));
  }
  return plan;
}

}  // namespace

BatchPlan plan_batch(const ingest::DatasetIndex& index, const SamplerSpec& spec,
                     std::uint64_t ordinal) {
  validate_spec(spec);
  const TrainView tv = train_view(index);
  if (tv.entry_ids.empty())
    throw Error(errc::no_sequences, "train split is empty");
  Rng rng(derive_seed(spec.seed, 0x5A3B1Eull, ordinal));
  switch (spec.kind) {
    case SamplerKind::random: return plan_random(index, tv, spec, rng);
    case SamplerKind::triplet: return plan_triplet(tv, spec, rng);
    default: return plan_random_triplet(index, tv, spec, rng);
  }
}

SampleBatch assemble_batch(const ingest::DatasetIndex& index,
                           ingest::SequenceStore& store, const SamplerSpec& spec,
                           const transforms::TransformSpec& transform,
                           const SkeletonGraph& graph, std::uint64_t ordinal,
                           bool two_view) {
  const BatchPlan plan = plan_batch(index, spec, ordinal);
  SampleBatch batch;
  batch.spec = spec;
  const int passes = two_view ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass)
    for (std::size_t i = 0; i < plan.entry_ids.size(); ++i) {
      const int id = plan.entry_ids[i];
      const SkeletonSequence& seq = store.load(id);
      Rng rng(derive_seed(spec.seed ^ 0x7F4A6C3ull, ordinal,
                          static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(pass)));
      batch.sequences.push_back(transforms::apply_pipeline(seq, graph, transform, rng));
      batch.labels.push_back(plan.labels[i]);
      batch.views.push_back(index.entries[static_cast<std::size_t>(id)].view);
    }
  return batch;
}

}  // namespace posegait::sampling
