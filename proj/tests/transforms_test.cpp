#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "posegait/error.hpp"
#include "posegait/transforms/multi_input.hpp"
#include "posegait/transforms/ops.hpp"
#include "posegait/transforms/pipeline.hpp"

using namespace posegait;
using namespace posegait::transforms;

TEST_CASE("inverse_poses_pre swaps symmetric pairs and is an involution") {
  SkeletonGraph g;
  g.layout_id = "pairs8";
  g.num_keypoints = 8;
  g.symmetric_pairs = {{6, 7}};
  g.bone_parent = {0, 0, 1, 2, 3, 4, 5, 6};
  g.root = 0;

  SkeletonSequence s = SkeletonSequence::zeros(1, 8, 2);
  s.at(0, 6, 0) = 1;
  s.at(0, 6, 1) = 2;
  s.at(0, 7, 0) = 3;
  s.at(0, 7, 1) = 4;
  const SkeletonSequence out = inverse_poses_pre(s, g);
  CHECK(out.at(0, 6, 0) == 3);
  CHECK(out.at(0, 6, 1) == 4);
  CHECK(out.at(0, 7, 0) == 1);
  CHECK(out.at(0, 7, 1) == 2);
  CHECK(out.at(0, 0, 0) == 0);  // untouched keypoints stay put

  CHECK(inverse_poses_pre(out, g).data == s.data);

  SkeletonGraph no_pairs = g;
  no_pairs.symmetric_pairs.clear();
  CHECK(inverse_poses_pre(s, no_pairs).data == s.data);
}

TEST_CASE("mirror_poses reflects about the frame centroid") {
  SkeletonSequence s = SkeletonSequence::zeros(1, 3, 2);
  // Frame {(0,0),(2,0),(1,3)}: centroid x = 1.
  s.at(0, 1, 0) = 2;
  s.at(0, 2, 0) = 1;
  s.at(0, 2, 1) = 3;
  const SkeletonSequence m = mirror_poses(s);
  CHECK(m.at(0, 0, 0) == 2.0);
  CHECK(m.at(0, 1, 0) == 0.0);
  CHECK(m.at(0, 2, 0) == 1.0);
  CHECK(m.at(0, 0, 1) == 0.0);  // y untouched
  CHECK(m.at(0, 2, 1) == 3.0);

  SUBCASE("all keypoints identical: frame is unchanged") {
    SkeletonSequence same = SkeletonSequence::zeros(1, 3, 2);
    for (int v = 0; v < 3; ++v) same.at(0, v, 0) = 0.75;
    CHECK(mirror_poses(same).data == same.data);
  }
}

TEST_CASE("mirror involution is bit-exact and centroids are preserved") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const SkeletonSequence s =
        testutil::random_grid_sequence(rng, rng.uniform_int(1, 12), 17, 2);
    const SkeletonSequence once = mirror_poses(s);
    for (int t = 0; t < s.t; ++t) {
      double cx = 0, cx_m = 0;
      for (int v = 0; v < s.v; ++v) {
        cx += s.at(t, v, 0);
        cx_m += once.at(t, v, 0);
      }
      CHECK(std::abs(cx - cx_m) / s.v <= 1e-9);
    }
    CHECK(mirror_poses(once).data == s.data);
  }
}

TEST_CASE("noise transforms with zero parameters are bit-exact identities") {
  Rng rng(31);
  const SkeletonSequence s = testutil::random_grid_sequence(rng, 9, 7, 2);
  Rng r1(1), r2(2), r3(3);
  CHECK(point_noise(s, r1, 0.0).data == s.data);
  CHECK(joint_noise(s, r2, 0.0).data == s.data);
  CHECK(random_move(s, r3, 0.0).data == s.data);
}

TEST_CASE("point_noise statistics match the configured sigma") {
  // >= 1e5 draws; sample mean within 3 standard errors of 0 and sample std
  // within 3 standard errors of sigma.
  const double sigma = 0.01;
  const int t = 500, v = 20;  // 500*20*2 = 2e4 per rep, 6 reps = 1.2e5
  double sum = 0, sum_sq = 0;
  long long n = 0;
  Rng rng(41);
  for (int rep = 0; rep < 6; ++rep) {
    SkeletonSequence zeros = SkeletonSequence::zeros(t, v, 2);
    const SkeletonSequence noisy = point_noise(zeros, rng, sigma);
    for (double x : noisy.data) {
      sum += x;
      sum_sq += x * x;
      ++n;
    }
  }
  const double mean = sum / n;
  const double std = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(std - sigma) <= 3.0 * sigma / std::sqrt(2.0 * static_cast<double>(n)));
}

TEST_CASE("joint_noise offsets are constant across frames") {
  Rng rng(51);
  SkeletonSequence zeros = SkeletonSequence::zeros(12, 5, 2);
  const SkeletonSequence noisy = joint_noise(zeros, rng, 0.5);
  for (int v = 0; v < 5; ++v)
    for (int c = 0; c < 2; ++c)
      for (int t = 1; t < 12; ++t)
        CHECK(noisy.at(t, v, c) == noisy.at(0, v, c));
}

TEST_CASE("flip_sequence reverses frames and is an involution") {
  SkeletonSequence s = SkeletonSequence::zeros(3, 1, 2);
  s.at(0, 0, 0) = 1;  // frames [a, b, c]
  s.at(1, 0, 0) = 2;
  s.at(2, 0, 0) = 3;
  const SkeletonSequence f = flip_sequence(s);
  CHECK(f.at(0, 0, 0) == 3);
  CHECK(f.at(1, 0, 0) == 2);
  CHECK(f.at(2, 0, 0) == 1);
  CHECK(flip_sequence(f).data == s.data);

  SkeletonSequence single = SkeletonSequence::zeros(1, 2, 2);
  single.at(0, 1, 0) = 5;
  CHECK(flip_sequence(single).data == single.data);
}

TEST_CASE("random_select") {
  Rng gen(61);
  SUBCASE("contiguous window keeps order") {
    SkeletonSequence s = SkeletonSequence::zeros(100, 1, 2);
    for (int t = 0; t < 100; ++t) s.at(t, 0, 0) = t;
    Rng rng(1);
    const SkeletonSequence out = random_select(s, rng, 60);
    CHECK(out.t == 60);
    for (int t = 1; t < 60; ++t)
      CHECK(out.at(t, 0, 0) == out.at(t - 1, 0, 0) + 1);
  }
  SUBCASE("T == L forces the whole sequence") {
    const SkeletonSequence s = testutil::random_grid_sequence(gen, 17, 3, 2);
    Rng rng(2);
    CHECK(random_select(s, rng, 17).data == s.data);
  }
  SUBCASE("T < L repeats cyclically, matching the explicit index list") {
    SkeletonSequence s = SkeletonSequence::zeros(10, 1, 2);
    for (int t = 0; t < 10; ++t) s.at(t, 0, 0) = t * 7;
    Rng rng(3);
    const SkeletonSequence out = random_select(s, rng, 20);
    REQUIRE(out.t == 20);
    for (int i = 0; i < 20; ++i)  // oracle: index i maps to i mod 10
      CHECK(out.at(i, 0, 0) == s.at(i % 10, 0, 0));
  }
  SUBCASE("subset mode keeps relative order") {
    SkeletonSequence s = SkeletonSequence::zeros(50, 1, 2);
    for (int t = 0; t < 50; ++t) s.at(t, 0, 0) = t;
    Rng rng(4);
    const SkeletonSequence out = random_select(s, rng, 20, SelectMode::subset);
    CHECK(out.t == 20);
    for (int t = 1; t < 20; ++t) CHECK(out.at(t, 0, 0) > out.at(t - 1, 0, 0));
  }
}

TEST_CASE("multi_input branches") {
  const SkeletonGraph g = build_graph("coco17");
  Rng rng(71);

  SUBCASE("static sequence gives an all-zero velocity branch") {
    SkeletonSequence s = testutil::random_grid_sequence(rng, 1, 17, 2);
    SkeletonSequence rep = SkeletonSequence::zeros(6, 17, 2);
    for (int t = 0; t < 6; ++t)
      for (int v = 0; v < 17; ++v)
        for (int c = 0; c < 2; ++c) rep.at(t, v, c) = s.at(0, v, c);
    const FeatureArray f = multi_input(rep, g, {Branch::velocity});
    for (double x : f.data) CHECK(x == 0.0);
  }

  SUBCASE("unit bone and unit-normalized angle") {
    // Keypoint 1's parent is 0 in coco17. Parent at (0,0), child at (0,1).
    SkeletonSequence s = SkeletonSequence::zeros(1, 17, 2);
    s.at(0, 1, 1) = 1.0;
    const FeatureArray bone = multi_input(s, g, {Branch::bone});
    CHECK(bone.at(0, 1, 0) == 0.0);
    CHECK(bone.at(0, 1, 1) == 1.0);
    CHECK(bone.at(0, 0, 0) == 0.0);  // root bone is zero
    CHECK(bone.at(0, 0, 1) == 0.0);
    const FeatureArray angle = multi_input(s, g, {Branch::angle});
    CHECK(angle.at(0, 1, 0) == doctest::Approx(0.0));
    CHECK(angle.at(0, 1, 1) == doctest::Approx(1.0));
  }

  SUBCASE("bone (3,4) yields angle (0.6, 0.8)") {
    SkeletonSequence s = SkeletonSequence::zeros(1, 17, 2);
    s.at(0, 1, 0) = 3.0;
    s.at(0, 1, 1) = 4.0;
    const FeatureArray angle = multi_input(s, g, {Branch::angle});
    CHECK(angle.at(0, 1, 0) == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(angle.at(0, 1, 1) == doctest::Approx(0.8).epsilon(1e-9));
  }

  SUBCASE("channel count is 2 * |branches| for all 15 subsets") {
    const SkeletonSequence s = testutil::random_grid_sequence(rng, 4, 17, 2);
    const std::vector<Branch> all = {Branch::joint, Branch::bone, Branch::angle,
                                     Branch::velocity};
    for (int mask = 1; mask < 16; ++mask) {
      std::vector<Branch> subset;
      for (int b = 0; b < 4; ++b)
        if (mask & (1 << b)) subset.push_back(all[b]);
      const FeatureArray f = multi_input(s, g, subset);
      CHECK(f.c == 2 * static_cast<int>(subset.size()));
      CHECK(f.t == s.t);
      CHECK(f.v == s.v);
    }
  }

  SUBCASE("confidence channel is dropped") {
    const SkeletonSequence s = testutil::random_grid_sequence(rng, 3, 17, 3);
    const FeatureArray f = multi_input(s, g, {Branch::joint});
    CHECK(f.c == 2);
    CHECK(f.at(1, 5, 0) == s.at(1, 5, 0));
  }

  SUBCASE("unknown branch name is rejected") {
    CHECK_THROWS_AS(branch_from_string("bones"), Error);
  }
}

TEST_CASE("pipeline applies transforms in listed order") {
  const SkeletonGraph g = build_graph("coco17");
  Rng gen(81);
  const SkeletonSequence s = testutil::random_grid_sequence(gen, 8, 17, 2);

  // mirror then joint_noise vs joint_noise then mirror differ: the noise is
  // reflected in one order and not the other.
  TransformSpec forward_spec;
  forward_spec.ops = {{OpKind::mirror_poses, 1.0, 0.0},
                      {OpKind::joint_noise, 1.0, 0.05}};
  TransformSpec reverse_spec;
  reverse_spec.ops = {{OpKind::joint_noise, 1.0, 0.05},
                      {OpKind::mirror_poses, 1.0, 0.0}};

  Rng r1(123), r2(123);
  const SkeletonSequence a = apply_ops(s, g, forward_spec, r1);
  const SkeletonSequence b = apply_ops(s, g, reverse_spec, r2);
  CHECK(a.data != b.data);

  // And the forward order equals composing the ops by hand with the same rng.
  Rng r3(123);
  CHECK(r3.uniform() < 1.0);  // the probability gate consumes one draw
  SkeletonSequence manual = mirror_poses(s);
  manual = joint_noise(manual, r3, 0.05);
  CHECK(a.data == manual.data);
}

TEST_CASE("transform spec validation") {
  TransformSpec spec;
  spec.ops = {{OpKind::point_noise, 1.0, -0.1}};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.ops = {{OpKind::random_select, 1.0, 0.0}};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.ops.clear();
  spec.branches.clear();
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("mirror_poses leaves the confidence channel untouched") {
  Rng rng(91);
  const SkeletonSequence s = testutil::random_grid_sequence(rng, 4, 6, 3);
  const SkeletonSequence m = mirror_poses(s);
  for (int t = 0; t < s.t; ++t)
    for (int v = 0; v < s.v; ++v) {
      CHECK(m.at(t, v, 1) == s.at(t, v, 1));
      CHECK(m.at(t, v, 2) == s.at(t, v, 2));
    }
}

TEST_CASE("random_move applies a linearly interpolated drift") {
  // On an all-ones sequence the output per channel is s_t + dx_t with both
  // endpoints interpolated linearly, so second differences along t vanish.
  SkeletonSequence ones = SkeletonSequence::zeros(16, 2, 2);
  for (auto& x : ones.data) x = 1.0;
  Rng rng(92);
  const SkeletonSequence out = random_move(ones, rng, 0.25);
  for (int c = 0; c < 2; ++c)
    for (int t = 2; t < 16; ++t) {
      const double second_diff = out.at(t, 0, c) - 2 * out.at(t - 1, 0, c) +
                                 out.at(t - 2, 0, c);
      CHECK(std::abs(second_diff) <= 1e-12);
    }
  CHECK(out.at(0, 0, 0) == out.at(0, 1, 0));  // global, not per keypoint
}
