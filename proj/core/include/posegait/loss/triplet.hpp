#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "posegait/embedding.hpp"
#include "posegait/error.hpp"

namespace posegait::loss {

enum class TripletVariant { batch_all, batch_hard };

TripletVariant triplet_variant_from_string(const std::string& s);
std::string to_string(TripletVariant v);

/// Margin-based triplet loss over Euclidean distances.
struct TripletLossSpec {
  double margin = 0.2;
  TripletVariant variant = TripletVariant::batch_all;

  void validate() const {
    if (!(margin >= 0.0) || !std::isfinite(margin))
      throw Error(errc::config, "triplet margin must be finite and >= 0");
  }
};

template <class T>
struct TripletResult {
  T loss = T(0);
  int n_active = 0;              // terms strictly greater than zero
  std::int64_t n_enumerated = 0; // batch_all: all triplets; batch_hard: anchors
  std::vector<T> grad;           // dL/d(embeddings), N*d, row-major
};

namespace detail {

template <class T>
T euclidean(const T* a, const T* b, int d) {
  T s = T(0);
  for (int i = 0; i < d; ++i) {
    const T diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(std::max(s, T(0)));
}

// d(D(a,b))/da accumulated into ga with weight w (and -w into gb). The
// subgradient at coincident points is taken as zero.
template <class T>
void add_distance_grad(const T* a, const T* b, int d, T dist, T w, T* ga, T* gb) {
  if (!(dist > T(0))) return;
  for (int i = 0; i < d; ++i) {
    const T g = w * (a[i] - b[i]) / dist;
    ga[i] += g;
    gb[i] -= g;
  }
}

template <class T>
void require_two_labels(const int* labels, int n) {
  for (int i = 1; i < n; ++i)
    if (labels[i] != labels[0]) return;
  throw Error(errc::no_negatives, "no negative pairs: batch has fewer than 2 labels");
}

}  // namespace detail

/// Batch-all: mean of hinge(m + D(a,p) - D(a,n)) over every (anchor,
/// positive != anchor, negative) triplet, averaged over the strictly
/// positive terms only; 0 when none are active. For an exact (P,K) batch
/// the enumerated count is PK(PK-K)(K-1).
template <class T>
TripletResult<T> triplet_batch_all(const T* emb, int n, int d, const int* labels,
                                   T margin, bool with_grad = true) {
  detail::require_two_labels<T>(labels, n);
  TripletResult<T> r;
  if (with_grad) r.grad.assign(static_cast<std::size_t>(n) * d, T(0));

  // Pairwise distances once; triplet enumeration reuses them.
  std::vector<T> dist(static_cast<std::size_t>(n) * n, T(0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const T dij = detail::euclidean(emb + static_cast<std::size_t>(i) * d,
                                      emb + static_cast<std::size_t>(j) * d, d);
      dist[static_cast<std::size_t>(i) * n + j] = dij;
      dist[static_cast<std::size_t>(j) * n + i] = dij;
    }

  T sum = T(0);
  struct Active { int a, p, ng; };
  std::vector<Active> active;
  for (int a = 0; a < n; ++a)
    for (int p = 0; p < n; ++p) {
      if (p == a || labels[p] != labels[a]) continue;
      for (int ng = 0; ng < n; ++ng) {
        if (labels[ng] == labels[a]) continue;
        ++r.n_enumerated;
        const T term = margin + dist[static_cast<std::size_t>(a) * n + p] -
                       dist[static_cast<std::size_t>(a) * n + ng];
        if (term > T(0)) {
          sum += term;
          ++r.n_active;
          if (with_grad) active.push_back({a, p, ng});
        }
      }
    }

  if (r.n_active == 0) return r;
  r.loss = sum / static_cast<T>(r.n_active);
  if (with_grad) {
    const T w = T(1) / static_cast<T>(r.n_active);
    for (const auto& t : active) {
      const T* fa = emb + static_cast<std::size_t>(t.a) * d;
      const T* fp = emb + static_cast<std::size_t>(t.p) * d;
      const T* fn = emb + static_cast<std::size_t>(t.ng) * d;
      T* ga = r.grad.data() + static_cast<std::size_t>(t.a) * d;
      T* gp = r.grad.data() + static_cast<std::size_t>(t.p) * d;
      T* gn = r.grad.data() + static_cast<std::size_t>(t.ng) * d;
      detail::add_distance_grad(fa, fp, d, dist[static_cast<std::size_t>(t.a) * n + t.p],
                                w, ga, gp);
      detail::add_distance_grad(fa, fn, d, dist[static_cast<std::size_t>(t.a) * n + t.ng],
                                -w, ga, gn);
    }
  }
  return r;
}

/// Batch-hard: per anchor, hinge(m + max over positives of D - min over
/// negatives of D); one term per anchor (PK terms for an exact (P,K)
/// batch), averaged over the strictly positive ones. Ties in the hardest
/// positive/negative break to the lowest index.
template <class T>
TripletResult<T> triplet_batch_hard(const T* emb, int n, int d, const int* labels,
                                    T margin, bool with_grad = true) {
  detail::require_two_labels<T>(labels, n);
  TripletResult<T> r;
  if (with_grad) r.grad.assign(static_cast<std::size_t>(n) * d, T(0));

  struct Term { int a, p, ng; T dp, dn; };
  std::vector<Term> active;
  T sum = T(0);
  for (int a = 0; a < n; ++a) {
    int hardest_pos = -1, hardest_neg = -1;
    T max_pos = -T(1), min_neg = T(0);
    const T* fa = emb + static_cast<std::size_t>(a) * d;
    for (int j = 0; j < n; ++j) {
      if (j == a) continue;
      const T dj = detail::euclidean(fa, emb + static_cast<std::size_t>(j) * d, d);
      if (labels[j] == labels[a]) {
        if (dj > max_pos) {
          max_pos = dj;
          hardest_pos = j;
        }
      } else if (hardest_neg < 0 || dj < min_neg) {
        min_neg = dj;
        hardest_neg = j;
      }
    }
    if (hardest_pos < 0 || hardest_neg < 0) continue;  // anchor without a pair
    ++r.n_enumerated;
    const T term = margin + max_pos - min_neg;
    if (term > T(0)) {
      sum += term;
      ++r.n_active;
      if (with_grad) active.push_back({a, hardest_pos, hardest_neg, max_pos, min_neg});
    }
  }

  if (r.n_active == 0) return r;
  r.loss = sum / static_cast<T>(r.n_active);
  if (with_grad) {
    const T w = T(1) / static_cast<T>(r.n_active);
    for (const auto& t : active) {
      const T* fa = emb + static_cast<std::size_t>(t.a) * d;
      const T* fp = emb + static_cast<std::size_t>(t.p) * d;
      const T* fn = emb + static_cast<std::size_t>(t.ng) * d;
      T* ga = r.grad.data() + static_cast<std::size_t>(t.a) * d;
      T* gp = r.grad.data() + static_cast<std::size_t>(t.p) * d;
      T* gn = r.grad.data() + static_cast<std::size_t>(t.ng) * d;
      detail::add_distance_grad(fa, fp, d, t.dp, w, ga, gp);
      detail::add_distance_grad(fa, fn, d, t.dn, -w, ga, gn);
    }
  }
  return r;
}

/// EmbeddingSet front-end dispatching on spec.variant.
TripletResult<double> triplet_loss(const EmbeddingSet& emb, const TripletLossSpec& spec,
                                   bool with_grad = false);

}  // namespace posegait::loss
