#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "posegait/error.hpp"
#include "posegait/ingest/synthetic.hpp"
#include "posegait/sampling/sampler.hpp"

using namespace posegait;
using namespace posegait::sampling;

namespace {

/// In-memory index: `subjects` subjects with `per_subject` train sequences
/// each, no files behind the paths.
ingest::DatasetIndex fake_index(int subjects, int per_subject) {
  ingest::DatasetIndex idx;
  idx.layout_id = "coco17";
  for (int s = 0; s < subjects; ++s)
    for (int q = 0; q < per_subject; ++q) {
      ingest::IndexEntry e;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d", s + 1);
      e.subject_id = buf;
      e.condition = "nm-01";
      e.view = std::to_string(q % 4);
      e.path = e.subject_id + "/" + std::to_string(q);
      e.frame_count = 30;
      e.split = ingest::Split::train;
      idx.entries.push_back(e);
    }
  return idx;
}

std::map<int, int> label_histogram(const BatchPlan& plan) {
  std::map<int, int> h;
  for (int l : plan.labels) ++h[l];
  return h;
}

}  // namespace

TEST_CASE("random sampler") {
  const auto idx = fake_index(250, 4);  // 1000 train sequences
  SamplerSpec spec;
  spec.kind = SamplerKind::random;
  spec.batch_size = 128;
  spec.seed = 7;

  SUBCASE("128 distinct entries from 1000") {
    const BatchPlan plan = plan_batch(idx, spec, 0);
    CHECK(plan.entry_ids.size() == 128);
    CHECK(std::set<int>(plan.entry_ids.begin(), plan.entry_ids.end()).size() == 128);
  }
  SUBCASE("batch_size = 1") {
    spec.batch_size = 1;
    CHECK(plan_batch(idx, spec, 0).entry_ids.size() == 1);
  }
  SUBCASE("same seed gives identical batches; ordinals differ") {
    const BatchPlan a = plan_batch(idx, spec, 3);
    const BatchPlan b = plan_batch(idx, spec, 3);
    CHECK(a.entry_ids == b.entry_ids);
    CHECK(a.labels == b.labels);
    const BatchPlan c = plan_batch(idx, spec, 4);
    CHECK(a.entry_ids != c.entry_ids);
  }
  SUBCASE("oversized batch is rejected") {
    spec.batch_size = 1001;
    CHECK_THROWS_AS(plan_batch(idx, spec, 0), Error);
  }
}

TEST_CASE("triplet sampler") {
  SamplerSpec spec;
  spec.kind = SamplerKind::triplet;
  spec.seed = 11;

  SUBCASE("(P,K) = (4,64) gives 256 sequences, 4 labels x 64") {
    const auto idx = fake_index(74, 70);
    spec.p = 4;
    spec.k = 64;
    const BatchPlan plan = plan_batch(idx, spec, 0);
    CHECK(plan.entry_ids.size() == 256);
    const auto hist = label_histogram(plan);
    CHECK(hist.size() == 4);
    for (const auto& [label, count] : hist) CHECK(count == 64);
  }
  SUBCASE("(P,K) = (2,2) minimal batch has positives and negatives") {
    const auto idx = fake_index(5, 3);
    spec.p = 2;
    spec.k = 2;
    const BatchPlan plan = plan_batch(idx, spec, 0);
    CHECK(plan.entry_ids.size() == 4);
    const auto hist = label_histogram(plan);
    CHECK(hist.size() == 2);
  }
  SUBCASE("(P,K) = (256,2) gives 512 sequences") {
    const auto idx = fake_index(300, 4);
    spec.p = 256;
    spec.k = 2;
    CHECK(plan_batch(idx, spec, 0).entry_ids.size() == 512);
  }
  SUBCASE("subjects with fewer than K sequences draw with replacement") {
    const auto idx = fake_index(4, 2);
    spec.p = 4;
    spec.k = 5;
    const BatchPlan plan = plan_batch(idx, spec, 0);
    CHECK(plan.entry_ids.size() == 20);
    const auto hist = label_histogram(plan);
    for (const auto& [label, count] : hist) CHECK(count == 5);
  }
  SUBCASE("fewer than P subjects is an error") {
    const auto idx = fake_index(3, 4);
    spec.p = 4;
    spec.k = 2;
    CHECK_THROWS_AS(plan_batch(idx, spec, 0), Error);
  }
  SUBCASE("P or K below 2 is rejected") {
    spec.p = 1;
    spec.k = 4;
    CHECK_THROWS_AS(validate_spec(spec), Error);
    spec.p = 4;
    spec.k = 1;
    CHECK_THROWS_AS(validate_spec(spec), Error);
  }
}

TEST_CASE("random triplet sampler composition identities") {
  SamplerSpec spec;
  spec.kind = SamplerKind::random_triplet;
  spec.seed = 13;

  SUBCASE("batch 128 with P=6: K=21, c=2") {
    spec.batch_size = 128;
    spec.p = 6;
    CHECK(spec.derived_k() == 21);
    CHECK(spec.c() == 2);
    const auto idx = fake_index(10, 30);
    const BatchPlan plan = plan_batch(idx, spec, 0);
    CHECK(plan.entry_ids.size() == 128);
    CHECK(spec.p * spec.derived_k() + spec.c() == spec.batch_size);
  }
  SUBCASE("batch 768 with P=74: K=10, c=28") {
    spec.batch_size = 768;
    spec.p = 74;
    CHECK(spec.derived_k() == 10);
    CHECK(spec.c() == 28);
    const auto idx = fake_index(74, 16);
    const BatchPlan plan = plan_batch(idx, spec, 0);
    CHECK(plan.entry_ids.size() == 768);
  }
  SUBCASE("batch 4 with P=4 derives K=1 and is rejected") {
    spec.batch_size = 4;
    spec.p = 4;
    try {
      validate_spec(spec);
      FAIL("expected constraint error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::constraint);
      CHECK(std::string(e.what()).find("K >= 2") != std::string::npos);
    }
  }
  SUBCASE("extras exclude already-selected sequences") {
    spec.batch_size = 26;
    spec.p = 4;  // K=6, c=2
    const auto idx = fake_index(6, 8);
    const BatchPlan plan = plan_batch(idx, spec, 0);
    std::set<int> unique_ids;
    // The P*K part may repeat within a subject only if it runs short (it
    // does not here), and the c extras must be new entries.
    for (int id : plan.entry_ids) unique_ids.insert(id);
    CHECK(unique_ids.size() == plan.entry_ids.size());
  }
}

TEST_CASE("sampler invariants hold over many batches") {
  const auto idx = fake_index(12, 6);
  SUBCASE("triplet: exactly P labels x K each") {
    SamplerSpec spec;
    spec.kind = SamplerKind::triplet;
    spec.p = 4;
    spec.k = 3;
    spec.seed = 17;
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto hist = label_histogram(plan_batch(idx, spec, i));
      CHECK(hist.size() == 4);
      for (const auto& [label, count] : hist) CHECK(count == 3);
    }
  }
  SUBCASE("random_triplet: positive and negative pairs always present") {
    SamplerSpec spec;
    spec.kind = SamplerKind::random_triplet;
    spec.batch_size = 17;
    spec.p = 3;
    spec.seed = 19;
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto hist = label_histogram(plan_batch(idx, spec, i));
      CHECK(hist.size() >= 2);  // a negative pair exists
      bool positive = false;
      for (const auto& [label, count] : hist) positive |= count >= 2;
      CHECK(positive);
    }
  }
}

TEST_CASE("two-view assembly pairs entry i with entry i+N") {
  // Build a real on-disk index so sequences can be loaded.
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "sampling_two_view";
  fs::remove_all(root);
  ingest::SyntheticSpec sspec;
  sspec.subjects = 3;
  sspec.views = 2;
  sspec.frames = 10;
  sspec.conditions = 6;
  ingest::generate_dataset(sspec, root.string());
  const auto index = ingest::build_index(root.string(),
                                         eval::builtin_protocol("synthetic"));
  ingest::SequenceStore store(index);
  const SkeletonGraph graph = build_graph("coco17");

  SamplerSpec spec;
  spec.kind = SamplerKind::random;
  spec.batch_size = 5;
  spec.seed = 3;
  transforms::TransformSpec tf;
  tf.ops = {{transforms::OpKind::point_noise, 1.0, 0.01},
            {transforms::OpKind::random_select, 1.0, 6}};

  const SampleBatch batch =
      assemble_batch(index, store, spec, tf, graph, 0, /*two_view=*/true);
  REQUIRE(batch.size() == 10);
  for (int i = 0; i < 5; ++i) {
    CHECK(batch.labels[i] == batch.labels[i + 5]);
    CHECK(batch.views[i] == batch.views[i + 5]);
    // Independent augmentation draws: the two views differ.
    CHECK(batch.sequences[i].data != batch.sequences[i + 5].data);
  }
}
