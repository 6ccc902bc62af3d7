#include "posegait/transforms/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "posegait/error.hpp"

namespace posegait::transforms {

namespace {

// Nearest integer to num/den with ties to even; exact integer arithmetic.
std::int64_t div_round_half_even(std::int64_t num, std::int64_t den) {
  const bool neg = (num < 0) != (den < 0);
  const std::int64_t n = std::abs(num);
  const std::int64_t d = std::abs(den);
  std::int64_t q = n / d;
  const std::int64_t r = n % d;
  if (2 * r > d || (2 * r == d && (q & 1)))
    ++q;
  return neg ? -q : q;
}

// x-centroid snapped to the 2^-40 grid. Half-even rounding in integer space
// makes the result exactly invariant under x -> 2c - x: the flipped frame's
// snapped centroid is 2c - c = c with no floating-point tie to break.
double snapped_x_centroid(const SkeletonSequence& seq, int frame) {
  double sum = 0.0;
  for (int v = 0; v < seq.v; ++v) sum += seq.at(frame, v, 0);
  const double scaled = std::ldexp(sum, 40);
  const std::int64_t num = std::llrint(scaled);
  const std::int64_t k = div_round_half_even(num, seq.v);
  return std::ldexp(static_cast<double>(k), -40);
}

}  // namespace

SkeletonSequence inverse_poses_pre(const SkeletonSequence& seq,
                                   const SkeletonGraph& graph) {
  SkeletonSequence out = seq;
  for (int t = 0; t < seq.t; ++t)
    for (auto [l, r] : graph.symmetric_pairs)
      for (int c = 0; c < seq.c; ++c)
        std::swap(out.at(t, l, c), out.at(t, r, c));
  return out;
}

SkeletonSequence mirror_poses(const SkeletonSequence& seq) {
  SkeletonSequence out = seq;
  for (int t = 0; t < seq.t; ++t) {
    const double axis2 = 2.0 * snapped_x_centroid(seq, t);
    for (int v = 0; v < seq.v; ++v) out.at(t, v, 0) = axis2 - seq.at(t, v, 0);
  }
  return out;
}

SkeletonSequence point_noise(const SkeletonSequence& seq, Rng& rng, double std) {
  if (std == 0.0) return seq;
  SkeletonSequence out = seq;
  const int coord_channels = std::min(seq.c, 2);
  for (int t = 0; t < seq.t; ++t)
    for (int v = 0; v < seq.v; ++v)
      for (int c = 0; c < coord_channels; ++c)
        out.at(t, v, c) += std * rng.normal();
  return out;
}

SkeletonSequence joint_noise(const SkeletonSequence& seq, Rng& rng, double std) {
  if (std == 0.0) return seq;
  SkeletonSequence out = seq;
  const int coord_channels = std::min(seq.c, 2);
  for (int v = 0; v < seq.v; ++v)
    for (int c = 0; c < coord_channels; ++c) {
      const double offset = std * rng.normal();
      for (int t = 0; t < seq.t; ++t) out.at(t, v, c) += offset;
    }
  return out;
}

SkeletonSequence random_move(const SkeletonSequence& seq, Rng& rng, double amp) {
  if (amp == 0.0) return seq;
  SkeletonSequence out = seq;
  const double dx0 = rng.uniform(-amp, amp), dx1 = rng.uniform(-amp, amp);
  const double dy0 = rng.uniform(-amp, amp), dy1 = rng.uniform(-amp, amp);
  const double s0 = 1.0 + rng.uniform(-amp, amp);
  const double s1 = 1.0 + rng.uniform(-amp, amp);
  const int coord_channels = std::min(seq.c, 2);
  for (int t = 0; t < seq.t; ++t) {
    const double w = seq.t > 1 ? static_cast<double>(t) / (seq.t - 1) : 0.0;
    const double dx = dx0 + w * (dx1 - dx0);
    const double dy = dy0 + w * (dy1 - dy0);
    const double s = s0 + w * (s1 - s0);
    for (int v = 0; v < seq.v; ++v) {
      out.at(t, v, 0) = s * seq.at(t, v, 0) + dx;
      if (coord_channels > 1) out.at(t, v, 1) = s * seq.at(t, v, 1) + dy;
    }
  }
  return out;
}

SkeletonSequence flip_sequence(const SkeletonSequence& seq) {
  SkeletonSequence out = seq;
  for (int t = 0; t < seq.t; ++t)
    for (int v = 0; v < seq.v; ++v)
      for (int c = 0; c < seq.c; ++c)
        out.at(t, v, c) = seq.at(seq.t - 1 - t, v, c);
  return out;
}

SkeletonSequence random_select(const SkeletonSequence& seq, Rng& rng, int length,
                               SelectMode mode) {
  if (length < 1) throw Error(errc::config, "random_select length must be >= 1");
  std::vector<int> picks(static_cast<std::size_t>(length));
  if (seq.t < length) {
    for (int i = 0; i < length; ++i) picks[static_cast<std::size_t>(i)] = i % seq.t;
  } else if (mode == SelectMode::window) {
    const int start = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(seq.t - length + 1)));
    for (int i = 0; i < length; ++i) picks[static_cast<std::size_t>(i)] = start + i;
  } else {
    picks = rng.sample_without_replacement(seq.t, length);
    std::sort(picks.begin(), picks.end());
  }
  SkeletonSequence out = SkeletonSequence::zeros(length, seq.v, seq.c);
  out.subject_id = seq.subject_id;
  out.condition = seq.condition;
  out.view = seq.view;
  out.layout_id = seq.layout_id;
  for (int i = 0; i < length; ++i) {
    const int src = picks[static_cast<std::size_t>(i)];
    for (int v = 0; v < seq.v; ++v)
      for (int c = 0; c < seq.c; ++c) out.at(i, v, c) = seq.at(src, v, c);
  }
  return out;
}

}  // namespace posegait::transforms
