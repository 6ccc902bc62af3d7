#include <Eigen/Dense>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "posegait/error.hpp"
#include "posegait/graph.hpp"
#include "posegait/sequence.hpp"

using namespace posegait;

TEST_CASE("build_graph returns the registered layouts") {
  const SkeletonGraph coco = build_graph("coco17");
  CHECK(coco.num_keypoints == 17);
  CHECK(coco.layout_id == "coco17");
  const SkeletonGraph pose = build_graph("pose18");
  CHECK(pose.num_keypoints == 18);

  CHECK_THROWS_WITH_AS(build_graph("coco99"), doctest::Contains("unknown layout"),
                       Error);
  try {
    build_graph("coco99");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_layout);
  }
}

TEST_CASE("build_graph is pure") {
  const SkeletonGraph a = build_graph("coco17");
  const SkeletonGraph b = build_graph("coco17");
  CHECK(a.edges == b.edges);
  CHECK(a.symmetric_pairs == b.symmetric_pairs);
  CHECK(a.bone_parent == b.bone_parent);
  CHECK(a.root == b.root);
}

TEST_CASE("symmetric pairs are an involution on every layout") {
  for (const auto& id : registered_layouts()) {
    const SkeletonGraph g = build_graph(id);
    std::vector<int> perm(g.num_keypoints);
    for (int i = 0; i < g.num_keypoints; ++i) perm[i] = i;
    for (auto [l, r] : g.symmetric_pairs) std::swap(perm[l], perm[r]);
    for (int i = 0; i < g.num_keypoints; ++i) CHECK(perm[perm[i]] == i);
  }
}

TEST_CASE("graph invariants are validated") {
  SkeletonGraph g = build_graph("coco17");
  SUBCASE("self loop") {
    g.edges.emplace_back(3, 3);
    CHECK_THROWS_AS(validate_graph(g), Error);
  }
  SUBCASE("edge out of range") {
    g.edges.emplace_back(0, 17);
    CHECK_THROWS_AS(validate_graph(g), Error);
  }
  SUBCASE("duplicated symmetric index") {
    g.symmetric_pairs.emplace_back(1, 5);
    CHECK_THROWS_AS(validate_graph(g), Error);
  }
  SUBCASE("bone cycle") {
    g.bone_parent[1] = 3;
    g.bone_parent[3] = 1;
    CHECK_THROWS_AS(validate_graph(g), Error);
  }
}

namespace {
SkeletonGraph tiny_graph(int n, std::vector<std::pair<int, int>> edges) {
  SkeletonGraph g;
  g.layout_id = "tiny" + std::to_string(n);
  g.num_keypoints = n;
  g.edges = std::move(edges);
  g.bone_parent.assign(n, 0);
  for (int i = 1; i < n; ++i) g.bone_parent[i] = i - 1;
  g.bone_parent[0] = 0;
  g.root = 0;
  return g;
}
}  // namespace

TEST_CASE("normalized adjacency: closed-form cases") {
  SUBCASE("2-node single edge gives all 0.5") {
    const MatD a = normalized_adjacency(tiny_graph(2, {{0, 1}}));
    for (double x : a.data) CHECK(x == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("edgeless 3-node graph gives identity") {
    const MatD a = normalized_adjacency(tiny_graph(3, {}));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(a.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
  }
}

TEST_CASE("normalized adjacency: symmetry and spectrum via eigensolver") {
  Rng rng(7);
  auto check_graph = [](const SkeletonGraph& g) {
    const MatD a = normalized_adjacency(g);
    const int n = a.rows;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m(i, j) = a.at(i, j);
        CHECK(std::abs(a.at(i, j) - a.at(j, i)) <= 1e-12);
        CHECK(a.at(i, j) >= 0.0);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(m);
    for (int i = 0; i < n; ++i) {
      CHECK(solve.eigenvalues()[i] >= -1.0 - 1e-12);
      CHECK(solve.eigenvalues()[i] <= 1.0 + 1e-12);
    }
  };
  check_graph(build_graph("coco17"));
  check_graph(build_graph("pose18"));
  // Random graphs up to 18 nodes.
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.uniform_int(2, 18);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.3) edges.emplace_back(i, j);
    check_graph(tiny_graph(n, std::move(edges)));
  }
}

TEST_CASE("layout registry loads from config files") {
  const std::string path = "/tmp/posegait_test_layout.json";
  {
    std::ofstream out(path);
    out << R"({"layout_id":"mini3","num_keypoints":3,
               "edges":[[0,1],[1,2]],
               "symmetric_pairs":[[1,2]],
               "bone_parent":[0,0,1],"root":0})";
  }
  const SkeletonGraph g = load_layout_file(path);
  CHECK(g.num_keypoints == 3);
  CHECK(layout_registered("mini3"));
  CHECK(build_graph("mini3").edges.size() == 2);
}

TEST_CASE("validate_sequence reports every violated invariant") {
  const SkeletonGraph g = build_graph("coco17");
  SUBCASE("valid sequence yields an empty report") {
    Rng rng(1);
    SkeletonSequence s = testutil::random_grid_sequence(rng, 30, 17, 2);
    s.layout_id = "coco17";
    CHECK(validate_sequence(s, g).ok());
  }
  SUBCASE("keypoint count mismatch") {
    Rng rng(2);
    const SkeletonSequence s = testutil::random_grid_sequence(rng, 5, 18, 2);
    const ValidationReport r = validate_sequence(s, g);
    REQUIRE(!r.ok());
    CHECK(r.problems[0].find("keypoint count mismatch") != std::string::npos);
  }
  SUBCASE("non-finite value is located") {
    Rng rng(3);
    SkeletonSequence s = testutil::random_grid_sequence(rng, 5, 17, 2);
    s.at(2, 4, 1) = std::nan("");
    const ValidationReport r = validate_sequence(s, g);
    REQUIRE(!r.ok());
    CHECK(r.problems[0] == "non-finite value at (2,4,1)");
  }
  SUBCASE("bad channel count") {
    SkeletonSequence s = SkeletonSequence::zeros(4, 17, 4);
    CHECK(!validate_sequence(s, g).ok());
  }
}
