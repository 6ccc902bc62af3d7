#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "posegait/embedding.hpp"
#include "posegait/error.hpp"

namespace posegait::loss {

enum class SupConViews { one, two };

SupConViews supcon_views_from_string(const std::string& s);
std::string to_string(SupConViews v);

/// Supervised contrastive loss:
///   L = mean over i of -log{ (1/|S(i)|) sum_{s in S(i)} exp(f_i.f_s / tau)
///                            / sum_{a in A(i)} exp(f_i.f_a / tau) }
/// A(i) = every index except i, S(i) = same-label indices except i.
/// Embeddings are L2-normalized first when `normalize` is set (default).
/// In two-view mode the batch holds 2N entries where i and i+N are views
/// of the same sequence.
struct SupConSpec {
  double temperature = 0.07;
  SupConViews views = SupConViews::one;
  bool normalize = true;

  void validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
      throw Error(errc::config, "supcon temperature must be finite and > 0");
  }
};

template <class T>
struct SupConResult {
  T loss = T(0);
  int denominator_terms = 0;           // |A(i)| = N-1 (one view) or 2N-1 (two view)
  std::vector<int> positives_per_sample;
  std::vector<T> grad;                 // dL/d(embeddings), N*d
};

namespace detail {

template <class T>
void l2_normalize_rows(std::vector<T>& z, std::vector<T>& norms, int n, int d) {
  norms.assign(static_cast<std::size_t>(n), T(0));
  for (int i = 0; i < n; ++i) {
    T s = T(0);
    const T* row = z.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) s += row[j] * row[j];
    const T r = std::sqrt(std::max(s, T(1e-24)));
    norms[static_cast<std::size_t>(i)] = r;
    for (int j = 0; j < d; ++j)
      z[static_cast<std::size_t>(i) * d + j] = row[j] / r;
  }
}

}  // namespace detail

template <class T>
SupConResult<T> supcon_loss(const T* emb, int n, int d, const int* labels,
                            const SupConSpec& spec, bool with_grad = true) {
  spec.validate();
  if (n < 2) throw Error(errc::shape, "supcon requires at least 2 samples");
  if (spec.views == SupConViews::two) {
    if (n % 2 != 0)
      throw Error(errc::shape, "two-view supcon batch must hold 2N entries");
    for (int i = 0; i < n / 2; ++i)
      if (labels[i] != labels[i + n / 2])
        throw Error(errc::shape,
                    "two-view supcon: entries i and i+N must share a label");
  }

  SupConResult<T> r;
  r.denominator_terms = n - 1;

  std::vector<T> z(emb, emb + static_cast<std::size_t>(n) * d);
  std::vector<T> norms;
  if (spec.normalize) detail::l2_normalize_rows(z, norms, n, d);

  for (int i = 0; i < n; ++i) {
    int count = 0;
    for (int j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) ++count;
    if (count == 0)
      throw Error(errc::no_positives,
                  "sample without positives at index " + std::to_string(i));
    r.positives_per_sample.push_back(count);
  }

  // Logits and exponentials accumulate in binary64 regardless of T: at small
  // temperatures exp(logit - max) underflows binary32 (exp(-200) ~ 1e-87)
  // and a fully-underflowed positive set would yield log(0).
  const double inv_tau = 1.0 / spec.temperature;
  std::vector<T> grad_z;
  if (with_grad) grad_z.assign(static_cast<std::size_t>(n) * d, T(0));
  std::vector<double> logits(static_cast<std::size_t>(n));
  std::vector<double> beta(static_cast<std::size_t>(n));   // softmax over A(i)
  std::vector<double> alpha(static_cast<std::size_t>(n));  // softmax over S(i)

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const T* zi = z.data() + static_cast<std::size_t>(i) * d;
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dot = 0.0;
      const T* zj = z.data() + static_cast<std::size_t>(j) * d;
      for (int k = 0; k < d; ++k)
        dot += static_cast<double>(zi[k]) * static_cast<double>(zj[k]);
      logits[static_cast<std::size_t>(j)] = dot * inv_tau;
      max_logit = std::max(max_logit, logits[static_cast<std::size_t>(j)]);
    }
    double den = 0.0, num = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double e = std::exp(logits[static_cast<std::size_t>(j)] - max_logit);
      beta[static_cast<std::size_t>(j)] = e;
      den += e;
      if (labels[j] == labels[i]) num += e;
    }
    const int s_count = r.positives_per_sample[static_cast<std::size_t>(i)];
    // -log((1/|S|) * num / den) with the shared max_logit cancelling.
    total += -(std::log(num) - std::log(static_cast<double>(s_count))) + std::log(den);

    if (with_grad) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        alpha[static_cast<std::size_t>(j)] =
            labels[j] == labels[i] ? beta[static_cast<std::size_t>(j)] / num : 0.0;
        beta[static_cast<std::size_t>(j)] /= den;
      }
      // dL_i/dz_i = (1/tau) (sum_a beta_a z_a - sum_s alpha_s z_s)
      // dL_i/dz_j = (1/tau) (beta_j - [j in S(i)] alpha_j) z_i
      T* gi = grad_z.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const T w = static_cast<T>(inv_tau * (beta[static_cast<std::size_t>(j)] -
                                              alpha[static_cast<std::size_t>(j)]));
        const T* zj = z.data() + static_cast<std::size_t>(j) * d;
        T* gj = grad_z.data() + static_cast<std::size_t>(j) * d;
        for (int k = 0; k < d; ++k) {
          gi[k] += w * zj[k];
          gj[k] += w * zi[k];
        }
      }
    }
  }
  r.loss = static_cast<T>(total / n);

  if (with_grad) {
    const T inv_n = T(1) / static_cast<T>(n);
    if (spec.normalize) {
      // Through z = f / |f|:  df = (dz - (dz . z) z) / |f|.
      r.grad.assign(static_cast<std::size_t>(n) * d, T(0));
      for (int i = 0; i < n; ++i) {
        const T* zi = z.data() + static_cast<std::size_t>(i) * d;
        const T* gz = grad_z.data() + static_cast<std::size_t>(i) * d;
        T dot = T(0);
        for (int k = 0; k < d; ++k) dot += gz[k] * zi[k];
        const T inv_r = T(1) / norms[static_cast<std::size_t>(i)];
        T* gf = r.grad.data() + static_cast<std::size_t>(i) * d;
        for (int k = 0; k < d; ++k)
          gf[k] = (gz[k] - dot * zi[k]) * inv_r * inv_n;
      }
    } else {
      r.grad = std::move(grad_z);
      for (T& g : r.grad) g *= inv_n;
    }
  }
  return r;
}

/// EmbeddingSet front-end.
SupConResult<double> supcon(const EmbeddingSet& emb, const SupConSpec& spec,
                            bool with_grad = false);

}  // namespace posegait::loss
