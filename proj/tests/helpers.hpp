#pragma once

// Shared test utilities: data generators and the independent oracles the
// implementation is checked against. Everything here is deliberately
// brute-force and must stay independent of the library code paths it tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "posegait/embedding.hpp"
#include "posegait/rng.hpp"
#include "posegait/sequence.hpp"

namespace testutil {

using posegait::EmbeddingSet;
using posegait::Rng;
using posegait::SkeletonSequence;

/// Random sequence with binary32-exact coordinates on the 2^-16 grid in
/// [-2, 2] (zero or magnitude >= 2^-16), matching PSG1-sourced data.
inline SkeletonSequence random_grid_sequence(Rng& rng, int t, int v, int c = 2) {
  SkeletonSequence s = SkeletonSequence::zeros(t, v, c);
  for (auto& x : s.data) {
    const int k = rng.uniform_int(-131072, 131072);
    x = std::ldexp(static_cast<double>(k), -16);
  }
  return s;
}

/// Random embeddings with labels 0..p-1, k each.
inline EmbeddingSet random_embeddings(Rng& rng, int p, int k, int d,
                                      double scale = 1.0) {
  EmbeddingSet e;
  e.vectors = posegait::Matrix<double>(p * k, d);
  for (auto& x : e.vectors.data) x = scale * rng.normal();
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < k; ++j) e.labels.push_back(i);
  return e;
}

inline double euclid(const double* a, const double* b, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct TripletOracle {
  double loss = 0;
  int active = 0;
  long long enumerated = 0;
};

/// Scalar triple-loop batch-all reference.
inline TripletOracle triplet_all_oracle(const EmbeddingSet& e, double margin) {
  TripletOracle r;
  const int n = e.size(), d = e.dim();
  double sum = 0;
  for (int a = 0; a < n; ++a)
    for (int p = 0; p < n; ++p) {
      if (p == a || e.labels[p] != e.labels[a]) continue;
      for (int g = 0; g < n; ++g) {
        if (e.labels[g] == e.labels[a]) continue;
        ++r.enumerated;
        const double term =
            margin + euclid(e.vec(a), e.vec(p), d) - euclid(e.vec(a), e.vec(g), d);
        if (term > 0) {
          sum += term;
          ++r.active;
        }
      }
    }
  r.loss = r.active > 0 ? sum / r.active : 0.0;
  return r;
}

/// Per-anchor max-positive / min-negative reference.
inline TripletOracle triplet_hard_oracle(const EmbeddingSet& e, double margin) {
  TripletOracle r;
  const int n = e.size(), d = e.dim();
  double sum = 0;
  for (int a = 0; a < n; ++a) {
    double max_pos = -1, min_neg = -1;
    for (int j = 0; j < n; ++j) {
      if (j == a) continue;
      const double dj = euclid(e.vec(a), e.vec(j), d);
      if (e.labels[j] == e.labels[a])
        max_pos = std::max(max_pos, dj);
      else
        min_neg = min_neg < 0 ? dj : std::min(min_neg, dj);
    }
    if (max_pos < 0 || min_neg < 0) continue;
    ++r.enumerated;
    const double term = margin + max_pos - min_neg;
    if (term > 0) {
      sum += term;
      ++r.active;
    }
  }
  r.loss = r.active > 0 ? sum / r.active : 0.0;
  return r;
}

/// Exhaustive-sort rank oracle: full stable sort of (distance, index) per
/// probe, with optional identical-view exclusion; returns per-rank hit
/// fractions in percent and the skipped-probe count.
struct RankOracleResult {
  std::vector<double> accuracy;
  int skipped = 0;
};

inline RankOracleResult rank_oracle(const EmbeddingSet& gallery,
                                    const EmbeddingSet& probe,
                                    const std::vector<int>& ranks, bool exclude) {
  RankOracleResult out;
  std::vector<int> hits(ranks.size(), 0);
  int scored = 0;
  for (int p = 0; p < probe.size(); ++p) {
    std::vector<std::pair<double, int>> all;
    for (int g = 0; g < gallery.size(); ++g) {
      if (exclude && gallery.views[g] == probe.views[p]) continue;
      all.emplace_back(euclid(probe.vec(p), gallery.vec(g), probe.dim()), g);
    }
    if (all.empty()) {
      ++out.skipped;
      continue;
    }
    ++scored;
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t ki = 0; ki < ranks.size(); ++ki) {
      const int k = std::min<int>(ranks[ki], static_cast<int>(all.size()));
      for (int pos = 0; pos < k; ++pos)
        if (gallery.labels[all[pos].second] == probe.labels[p]) {
          ++hits[ki];
          break;
        }
    }
  }
  for (std::size_t ki = 0; ki < ranks.size(); ++ki)
    out.accuracy.push_back(scored ? 100.0 * hits[ki] / scored : 0.0);
  return out;
}

}  // namespace testutil
