#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "posegait/error.hpp"
#include "posegait/eval/protocol.hpp"
#include "posegait/ingest/index.hpp"
#include "posegait/ingest/psg.hpp"
#include "posegait/ingest/synthetic.hpp"

using namespace posegait;
using namespace posegait::ingest;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("PSG1 codec round-trips bit-exactly") {
  Rng rng(11);
  const fs::path path = temp_dir("psg_roundtrip") / "seq.psg1";
  for (int i = 0; i < 40; ++i) {
    const int t = rng.uniform_int(1, 80);
    const int v = rng.uniform_int(1, 25);
    const int c = rng.uniform_int(2, 3);
    const SkeletonSequence s = testutil::random_grid_sequence(rng, t, v, c);
    write_sequence(s, path.string());
    const SkeletonSequence back = read_sequence(path.string());
    CHECK(back.t == t);
    CHECK(back.v == v);
    CHECK(back.c == c);
    CHECK(back.data == s.data);
  }
}

TEST_CASE("PSG1 rejects bad magic and truncation") {
  const fs::path dir = temp_dir("psg_errors");
  SUBCASE("bad magic") {
    std::ofstream out(dir / "bad.psg1", std::ios::binary);
    out << "XXXXgarbage";
    out.close();
    try {
      read_sequence((dir / "bad.psg1").string());
      FAIL("expected bad_magic");
    } catch (const Error& e) {
      CHECK(e.code() == errc::bad_magic);
    }
  }
  SUBCASE("short payload reports the expected count") {
    Rng rng(3);
    const SkeletonSequence s = testutil::random_grid_sequence(rng, 10, 4, 2);
    write_sequence(s, (dir / "full.psg1").string());
    // Keep the header but drop the last frame of data.
    std::ifstream in(dir / "full.psg1", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    bytes.resize(bytes.size() - 4 * 4 * 2);  // one frame of 4 kp x 2 ch floats
    std::ofstream out(dir / "short.psg1", std::ios::binary);
    out << bytes;
    out.close();
    try {
      read_sequence((dir / "short.psg1").string());
      FAIL("expected short_read");
    } catch (const Error& e) {
      CHECK(e.code() == errc::short_read);
      CHECK(std::string(e.what()).find("expected 80") != std::string::npos);
    }
  }
}

TEST_CASE("build_index: sorted, deterministic, protocol-split") {
  SUBCASE("synthetic tree of 4 subjects x 2 views") {
    const fs::path root = temp_dir("idx_tiny");
    SyntheticSpec spec;
    spec.subjects = 4;
    spec.views = 2;
    spec.frames = 8;
    spec.conditions = 1;
    generate_dataset(spec, root.string());
    const DatasetIndex idx = build_index(root.string(), eval::builtin_protocol("synthetic"));
    CHECK(idx.entries.size() == 8);
    for (std::size_t i = 1; i < idx.entries.size(); ++i)
      CHECK(std::tie(idx.entries[i - 1].subject_id, idx.entries[i - 1].condition,
                     idx.entries[i - 1].view) <=
            std::tie(idx.entries[i].subject_id, idx.entries[i].condition,
                     idx.entries[i].view));
    const DatasetIndex again =
        build_index(root.string(), eval::builtin_protocol("synthetic"));
    for (std::size_t i = 0; i < idx.entries.size(); ++i)
      CHECK(idx.entries[i].path == again.entries[i].path);
  }

  SUBCASE("CASIA-B-shaped tree assigns the first 74 subjects to train") {
    const fs::path root = temp_dir("idx_casiab");
    SkeletonSequence s = SkeletonSequence::zeros(2, 17, 2);
    for (int subject = 0; subject < 124; ++subject) {
      char name[8];
      std::snprintf(name, sizeof name, "%03d", subject + 1);
      const fs::path dir = root / name / "nm-01" / "000";
      fs::create_directories(dir);
      write_sequence(s, (dir / "seq.psg1").string());
    }
    const DatasetIndex idx = build_index(root.string(), eval::builtin_protocol("casia_b"));
    std::set<std::string> train_subjects;
    for (const auto& e : idx.entries)
      if (e.split == Split::train) train_subjects.insert(e.subject_id);
    CHECK(train_subjects.size() == 74);
    CHECK(train_subjects.count("074") == 1);
    CHECK(train_subjects.count("075") == 0);
  }

  SUBCASE("missing root raises io error") {
    CHECK_THROWS_AS(build_index("/nonexistent/posegait", eval::builtin_protocol("synthetic")),
                    Error);
  }
  SUBCASE("empty tree raises no_sequences") {
    const fs::path root = temp_dir("idx_empty");
    try {
      build_index(root.string(), eval::builtin_protocol("synthetic"));
      FAIL("expected no_sequences");
    } catch (const Error& e) {
      CHECK(e.code() == errc::no_sequences);
    }
  }
}

TEST_CASE("index file round-trip") {
  const fs::path root = temp_dir("idx_file");
  SyntheticSpec spec;
  spec.subjects = 2;
  spec.views = 2;
  spec.frames = 6;
  spec.conditions = 6;
  generate_dataset(spec, root.string());
  const auto protocol = eval::builtin_protocol("synthetic");
  const DatasetIndex idx = build_index(root.string(), protocol);
  const DatasetIndex redux = read_index((root / "index.psgidx").string(), protocol);
  REQUIRE(redux.entries.size() == idx.entries.size());
  for (std::size_t i = 0; i < idx.entries.size(); ++i) {
    CHECK(redux.entries[i].path == idx.entries[i].path);
    CHECK(redux.entries[i].frame_count == idx.entries[i].frame_count);
    CHECK(redux.entries[i].split == idx.entries[i].split);
  }
  CHECK(redux.layout_id == "coco17");
}

TEST_CASE("synthetic generator is deterministic and valid") {
  const fs::path a = temp_dir("synth_a");
  const fs::path b = temp_dir("synth_b");
  SyntheticSpec spec;
  spec.subjects = 3;
  spec.views = 2;
  spec.frames = 20;
  spec.conditions = 2;
  spec.seed = 9;
  generate_dataset(spec, a.string());
  generate_dataset(spec, b.string());
  const SkeletonGraph g = build_graph("coco17");
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".psg1") continue;
    const fs::path other = b / fs::relative(entry.path(), a);
    const SkeletonSequence sa = read_sequence(entry.path().string());
    const SkeletonSequence sb = read_sequence(other.string());
    CHECK(sa.data == sb.data);
    CHECK(validate_sequence(sa, g).ok());
  }
}

TEST_CASE("reorder_keypoints") {
  Rng rng(5);
  SkeletonSequence s = testutil::random_grid_sequence(rng, 6, 5, 2);
  SUBCASE("identity mapping leaves the sequence unchanged") {
    const SkeletonSequence out = reorder_keypoints(s, {0, 1, 2, 3, 4});
    CHECK(out.data == s.data);
  }
  SUBCASE("a swap applied twice restores the original") {
    const std::vector<int> swap01 = {1, 0, 2, 3, 4};
    const SkeletonSequence once = reorder_keypoints(s, swap01);
    CHECK(once.at(0, 0, 0) == s.at(0, 1, 0));
    const SkeletonSequence twice = reorder_keypoints(once, swap01);
    CHECK(twice.data == s.data);
  }
  SUBCASE("non-permutation is rejected") {
    try {
      reorder_keypoints(s, {0, 0, 2, 3, 4});
      FAIL("expected not_permutation");
    } catch (const Error& e) {
      CHECK(e.code() == errc::not_permutation);
    }
  }
}

TEST_CASE("synthetic generator supports the 18-keypoint layout") {
  const fs::path root = temp_dir("synth_pose18");
  SyntheticSpec spec;
  spec.subjects = 2;
  spec.views = 2;
  spec.frames = 8;
  spec.conditions = 2;
  spec.layout_id = "pose18";
  generate_dataset(spec, root.string());
  const DatasetIndex idx = build_index(root.string(), eval::builtin_protocol("synthetic"));
  CHECK(idx.layout_id == "pose18");
  const SkeletonGraph g = build_graph("pose18");
  SequenceStore store(idx);
  const SkeletonSequence& s = store.load(0);
  CHECK(s.v == 18);
  CHECK(validate_sequence(s, g).ok());
}
