#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "posegait/error.hpp"
#include "posegait/matrix.hpp"
#include "posegait/model/config.hpp"
#include "posegait/model/tensor.hpp"
#include "posegait/rng.hpp"

namespace posegait::model {

/// Non-owning handle to one named parameter array and its gradient buffer.
template <class T>
struct ParamRef {
  std::string name;
  std::vector<T>* value;
  std::vector<T>* grad;
  std::vector<int> shape;
};

namespace detail {

template <class T>
T act_forward(Activation a, T x) {
  switch (a) {
    case Activation::relu: return x > T(0) ? x : T(0);
    case Activation::tanh: return std::tanh(x);
    default: return x;
  }
}

template <class T>
T act_backward(Activation a, T pre, T grad_out) {
  switch (a) {
    case Activation::relu: return pre > T(0) ? grad_out : T(0);
    case Activation::tanh: {
      const T th = std::tanh(pre);
      return grad_out * (T(1) - th * th);
    }
    default: return grad_out;
  }
}

template <class T>
void fan_in_uniform(std::vector<T>& w, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (T& x : w) x = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace detail

/// A basic layer: maps N x C x T x V to N x C' x T x V with T, V preserved.
/// Eval forward is const and side-effect free (safe for concurrent readers);
/// forward_train caches activations consumed by the next backward call,
/// which accumulates into the unit-owned gradient buffers.
template <class T>
class Unit {
 public:
  virtual ~Unit() = default;
  virtual const UnitConfig& config() const = 0;
  virtual Tensor4<T> forward(const Tensor4<T>& x) const = 0;
  virtual Tensor4<T> forward_train(const Tensor4<T>& x) = 0;
  virtual Tensor4<T> backward(const Tensor4<T>& grad_out) = 0;
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef<T>>& out) = 0;
  virtual void init(Rng& rng) = 0;
  /// Zeroes the unit's output-side parameters so it maps anything to 0;
  /// used on the final unit of residual blocks (identity at init).
  virtual void init_zero() = 0;
};

template <class T>
class GraphConvUnit final : public Unit<T> {
 public:
  GraphConvUnit(const UnitConfig& cfg, const MatD& adjacency)
      : cfg_(cfg), vcount_(adjacency.rows) {
    adj_.assign(adjacency.data.begin(), adjacency.data.end());
    w_.assign(static_cast<std::size_t>(cfg.in_channels) * cfg.out_channels, T(0));
    b_.assign(static_cast<std::size_t>(cfg.out_channels), T(0));
    gw_ = w_;
    gb_ = b_;
    if (cfg_.learnable_edge_mask) {
      mask_.assign(adj_.size(), T(0));
      gmask_ = mask_;
    }
  }

  const UnitConfig& config() const override { return cfg_; }

  Tensor4<T> forward(const Tensor4<T>& x) const override {
    Tensor4<T> z, pre;
    run_forward(x, z, pre);
    Tensor4<T> y = pre;
    for (auto& e : y.data) e = detail::act_forward(cfg_.activation, e);
    return y;
  }

  Tensor4<T> forward_train(const Tensor4<T>& x) override {
    x_ = x;
    run_forward(x, z_, pre_);
    Tensor4<T> y = pre_;
    for (auto& e : y.data) e = detail::act_forward(cfg_.activation, e);
    return y;
  }

  Tensor4<T> backward(const Tensor4<T>& grad_out) override {
    const int n = x_.n, t = x_.t, vv = x_.v;
    const int ci_n = cfg_.in_channels, co_n = cfg_.out_channels;
    Tensor4<T> dpre = grad_out;
    for (std::size_t i = 0; i < dpre.data.size(); ++i)
      dpre.data[i] = detail::act_backward(cfg_.activation, pre_.data[i],
                                          grad_out.data[i]);

    for (int in = 0; in < n; ++in)
      for (int co = 0; co < co_n; ++co)
        for (int it = 0; it < t; ++it)
          for (int iv = 0; iv < vv; ++iv)
            gb_[static_cast<std::size_t>(co)] += dpre.at(in, co, it, iv);

    // dz[u] = sum_v dpre[v] * Aeff[u,v]; dMask[u,v] += z[u] * dpre[v].
    Tensor4<T> dz(n, co_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int co = 0; co < co_n; ++co)
        for (int it = 0; it < t; ++it)
          for (int u = 0; u < vv; ++u) {
            T acc = T(0);
            for (int iv = 0; iv < vv; ++iv) {
              const T a = adj_eff(u, iv);
              acc += dpre.at(in, co, it, iv) * a;
              if (cfg_.learnable_edge_mask)
                gmask_[static_cast<std::size_t>(u) * vv + iv] +=
                    z_.at(in, co, it, u) * dpre.at(in, co, it, iv);
            }
            dz.at(in, co, it, u) = acc;
          }

    Tensor4<T> dx(n, ci_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int it = 0; it < t; ++it)
        for (int u = 0; u < vv; ++u)
          for (int ci = 0; ci < ci_n; ++ci) {
            const T xval = x_.at(in, ci, it, u);
            T acc = T(0);
            for (int co = 0; co < co_n; ++co) {
              const T d = dz.at(in, co, it, u);
              gw_[static_cast<std::size_t>(ci) * co_n + co] += xval * d;
              acc += w_[static_cast<std::size_t>(ci) * co_n + co] * d;
            }
            dx.at(in, ci, it, u) = acc;
          }
    return dx;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + ".W", &w_, &gw_, {cfg_.in_channels, cfg_.out_channels}});
    out.push_back({prefix + ".b", &b_, &gb_, {cfg_.out_channels}});
    if (cfg_.learnable_edge_mask)
      out.push_back({prefix + ".edge_mask", &mask_, &gmask_, {vcount_, vcount_}});
  }

  void init(Rng& rng) override {
    detail::fan_in_uniform(w_, cfg_.in_channels, rng);
    std::fill(b_.begin(), b_.end(), T(0));
    if (cfg_.learnable_edge_mask) std::fill(mask_.begin(), mask_.end(), T(0));
  }

  void init_zero() override {
    std::fill(w_.begin(), w_.end(), T(0));
    std::fill(b_.begin(), b_.end(), T(0));
  }

  /// Test hook: overrides the weight matrix (row-major in x out).
  void set_weights(const std::vector<T>& w) { w_ = w; }

 private:
  T adj_eff(int u, int v) const {
    const std::size_t i = static_cast<std::size_t>(u) * vcount_ + v;
    return cfg_.learnable_edge_mask ? adj_[i] + mask_[i] : adj_[i];
  }

  // y[n,:,t,:] = act(W^T x[n,:,t,:] Aeff + b)
  void run_forward(const Tensor4<T>& x, Tensor4<T>& z, Tensor4<T>& pre) const {
    if (x.c != cfg_.in_channels)
      throw Error(errc::shape, "graph_conv expects " + std::to_string(cfg_.in_channels) +
                                   " input channels, got " + std::to_string(x.c));
    if (x.v != vcount_)
      throw Error(errc::shape, "graph_conv adjacency is " + std::to_string(vcount_) +
                                   " nodes, input has " + std::to_string(x.v));
    const int n = x.n, t = x.t, vv = x.v;
    const int ci_n = cfg_.in_channels, co_n = cfg_.out_channels;
    z = Tensor4<T>(n, co_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int it = 0; it < t; ++it)
        for (int u = 0; u < vv; ++u)
          for (int ci = 0; ci < ci_n; ++ci) {
            const T xval = x.at(in, ci, it, u);
            if (xval == T(0)) continue;
            for (int co = 0; co < co_n; ++co)
              z.at(in, co, it, u) += w_[static_cast<std::size_t>(ci) * co_n + co] * xval;
          }
    pre = Tensor4<T>(n, co_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int co = 0; co < co_n; ++co)
        for (int it = 0; it < t; ++it)
          for (int iv = 0; iv < vv; ++iv) {
            T acc = b_[static_cast<std::size_t>(co)];
            for (int u = 0; u < vv; ++u)
              acc += z.at(in, co, it, u) * adj_eff(u, iv);
            pre.at(in, co, it, iv) = acc;
          }
  }

  UnitConfig cfg_;
  int vcount_;
  std::vector<T> adj_;
  std::vector<T> w_, b_, mask_;
  std::vector<T> gw_, gb_, gmask_;
  Tensor4<T> x_, z_, pre_;  // training cache
};

template <class T>
class TemporalConvUnit final : public Unit<T> {
 public:
  explicit TemporalConvUnit(const UnitConfig& cfg) : cfg_(cfg) {
    if (cfg.kernel_size < 1 || cfg.kernel_size % 2 == 0)
      throw Error(errc::config, "temporal kernel must be odd, got " +
                                    std::to_string(cfg.kernel_size));
    w_.assign(static_cast<std::size_t>(cfg.out_channels) * cfg.in_channels *
                  cfg.kernel_size,
              T(0));
    b_.assign(static_cast<std::size_t>(cfg.out_channels), T(0));
    gw_ = w_;
    gb_ = b_;
  }

  const UnitConfig& config() const override { return cfg_; }

  Tensor4<T> forward(const Tensor4<T>& x) const override {
    Tensor4<T> pre = run_forward(x);
    for (auto& e : pre.data) e = detail::act_forward(cfg_.activation, e);
    return pre;
  }

  Tensor4<T> forward_train(const Tensor4<T>& x) override {
    x_ = x;
    pre_ = run_forward(x);
    Tensor4<T> y = pre_;
    for (auto& e : y.data) e = detail::act_forward(cfg_.activation, e);
    return y;
  }

  Tensor4<T> backward(const Tensor4<T>& grad_out) override {
    const int n = x_.n, t = x_.t, vv = x_.v;
    const int ci_n = cfg_.in_channels, co_n = cfg_.out_channels;
    const int k = cfg_.kernel_size, off = (k - 1) / 2;
    Tensor4<T> dpre = grad_out;
    for (std::size_t i = 0; i < dpre.data.size(); ++i)
      dpre.data[i] = detail::act_backward(cfg_.activation, pre_.data[i],
                                          grad_out.data[i]);
    Tensor4<T> dx(n, ci_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int co = 0; co < co_n; ++co)
        for (int it = 0; it < t; ++it)
          for (int iv = 0; iv < vv; ++iv) {
            const T d = dpre.at(in, co, it, iv);
            if (d == T(0)) continue;
            gb_[static_cast<std::size_t>(co)] += d;
            for (int dt = 0; dt < k; ++dt) {
              const int src = it + dt - off;
              if (src < 0 || src >= t) continue;
              for (int ci = 0; ci < ci_n; ++ci) {
                const std::size_t wi =
                    (static_cast<std::size_t>(co) * ci_n + ci) * k + dt;
                gw_[wi] += x_.at(in, ci, src, iv) * d;
                dx.at(in, ci, src, iv) += w_[wi] * d;
              }
            }
          }
    return dx;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + ".W", &w_, &gw_,
                   {cfg_.out_channels, cfg_.in_channels, cfg_.kernel_size}});
    out.push_back({prefix + ".b", &b_, &gb_, {cfg_.out_channels}});
  }

  void init(Rng& rng) override {
    detail::fan_in_uniform(w_, cfg_.in_channels * cfg_.kernel_size, rng);
    std::fill(b_.begin(), b_.end(), T(0));
  }

  void init_zero() override {
    std::fill(w_.begin(), w_.end(), T(0));
    std::fill(b_.begin(), b_.end(), T(0));
  }

  void set_weights(const std::vector<T>& w) { w_ = w; }

 private:
  Tensor4<T> run_forward(const Tensor4<T>& x) const {
    if (x.c != cfg_.in_channels)
      throw Error(errc::shape, "temporal_conv expects " +
                                   std::to_string(cfg_.in_channels) +
                                   " input channels, got " + std::to_string(x.c));
    const int n = x.n, t = x.t, vv = x.v;
    const int ci_n = cfg_.in_channels, co_n = cfg_.out_channels;
    const int k = cfg_.kernel_size, off = (k - 1) / 2;
    Tensor4<T> pre(n, co_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int co = 0; co < co_n; ++co)
        for (int it = 0; it < t; ++it)
          for (int iv = 0; iv < vv; ++iv) {
            T acc = b_[static_cast<std::size_t>(co)];
            for (int dt = 0; dt < k; ++dt) {
              const int src = it + dt - off;
              if (src < 0 || src >= t) continue;  // symmetric zero padding
              for (int ci = 0; ci < ci_n; ++ci)
                acc += w_[(static_cast<std::size_t>(co) * ci_n + ci) * k + dt] *
                       x.at(in, ci, src, iv);
            }
            pre.at(in, co, it, iv) = acc;
          }
    return pre;
  }

  UnitConfig cfg_;
  std::vector<T> w_, b_, gw_, gb_;
  Tensor4<T> x_, pre_;
};

/// Per-frame multi-head scaled dot-product self-attention over keypoints.
/// No positional terms, so the unit is permutation-equivariant over V.
template <class T>
class SpatialTransformerUnit final : public Unit<T> {
 public:
  explicit SpatialTransformerUnit(const UnitConfig& cfg) : cfg_(cfg) {
    if (cfg.heads < 1 || cfg.in_channels % cfg.heads != 0)
      throw Error(errc::config, "heads = " + std::to_string(cfg.heads) +
                                    " must divide in_channels = " +
                                    std::to_string(cfg.in_channels));
    const std::size_t cc = static_cast<std::size_t>(cfg.in_channels) * cfg.in_channels;
    wq_.assign(cc, T(0));
    wk_.assign(cc, T(0));
    wv_.assign(cc, T(0));
    bq_.assign(static_cast<std::size_t>(cfg.in_channels), T(0));
    bk_ = bq_;
    bv_ = bq_;
    wo_.assign(static_cast<std::size_t>(cfg.out_channels) * cfg.in_channels, T(0));
    bo_.assign(static_cast<std::size_t>(cfg.out_channels), T(0));
    gwq_ = wq_; gwk_ = wk_; gwv_ = wv_;
    gbq_ = bq_; gbk_ = bk_; gbv_ = bv_;
    gwo_ = wo_; gbo_ = bo_;
  }

  const UnitConfig& config() const override { return cfg_; }

  Tensor4<T> forward(const Tensor4<T>& x) const override {
    Cache cache;
    Tensor4<T> pre = run_forward(x, cache);
    for (auto& e : pre.data) e = detail::act_forward(cfg_.activation, e);
    return pre;
  }

  Tensor4<T> forward_train(const Tensor4<T>& x) override {
    cache_ = Cache{};
    x_ = x;
    pre_ = run_forward(x, cache_);
    Tensor4<T> y = pre_;
    for (auto& e : y.data) e = detail::act_forward(cfg_.activation, e);
    return y;
  }

  /// Attention probabilities for one (sample, frame): heads x V x V,
  /// head-major. Rows sum to 1. Introspection for tests and debugging.
  std::vector<T> attention(const Tensor4<T>& x, int sample, int frame) const {
    Cache cache;
    run_forward(x, cache);
    const int vv = x.v;
    const std::size_t frame_sz =
        static_cast<std::size_t>(cfg_.heads) * vv * vv;
    const std::size_t base =
        (static_cast<std::size_t>(sample) * x.t + frame) * frame_sz;
    return std::vector<T>(cache.p.begin() + base, cache.p.begin() + base + frame_sz);
  }

  Tensor4<T> backward(const Tensor4<T>& grad_out) override {
    const int n = x_.n, t = x_.t, vv = x_.v;
    const int c = cfg_.in_channels, co_n = cfg_.out_channels;
    const int heads = cfg_.heads, dh = c / heads;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));

    Tensor4<T> dpre = grad_out;
    for (std::size_t i = 0; i < dpre.data.size(); ++i)
      dpre.data[i] = detail::act_backward(cfg_.activation, pre_.data[i],
                                          grad_out.data[i]);

    Tensor4<T> dx(n, c, t, vv);
    std::vector<T> dO(static_cast<std::size_t>(c) * vv);
    std::vector<T> dP(static_cast<std::size_t>(vv) * vv);
    std::vector<T> dS(static_cast<std::size_t>(vv) * vv);
    std::vector<T> dQ(static_cast<std::size_t>(c) * vv);
    std::vector<T> dK(static_cast<std::size_t>(c) * vv);
    std::vector<T> dV(static_cast<std::size_t>(c) * vv);

    for (int in = 0; in < n; ++in)
      for (int it = 0; it < t; ++it) {
        const std::size_t fb = (static_cast<std::size_t>(in) * t + it);
        const T* q = cache_.q.data() + fb * c * vv;
        const T* k = cache_.k.data() + fb * c * vv;
        const T* vvv = cache_.v.data() + fb * c * vv;
        const T* o = cache_.o.data() + fb * c * vv;
        const T* p = cache_.p.data() + fb * heads * vv * vv;

        // Output projection: pre = Wo O + bo.
        std::fill(dO.begin(), dO.end(), T(0));
        for (int i = 0; i < vv; ++i)
          for (int co = 0; co < co_n; ++co) {
            const T d = dpre.at(in, co, it, i);
            if (d == T(0)) continue;
            gbo_[static_cast<std::size_t>(co)] += d;
            for (int cc = 0; cc < c; ++cc) {
              gwo_[static_cast<std::size_t>(co) * c + cc] +=
                  d * o[static_cast<std::size_t>(cc) * vv + i];
              dO[static_cast<std::size_t>(cc) * vv + i] +=
                  wo_[static_cast<std::size_t>(co) * c + cc] * d;
            }
          }

        std::fill(dQ.begin(), dQ.end(), T(0));
        std::fill(dK.begin(), dK.end(), T(0));
        std::fill(dV.begin(), dV.end(), T(0));
        for (int h = 0; h < heads; ++h) {
          const T* ph = p + static_cast<std::size_t>(h) * vv * vv;
          const int c0 = h * dh;
          // dP[i,j] = sum_{ch in head} dO[ch,i] V[ch,j]; dV[ch,j] += P[i,j] dO[ch,i].
          std::fill(dP.begin(), dP.end(), T(0));
          for (int i = 0; i < vv; ++i)
            for (int ch = c0; ch < c0 + dh; ++ch) {
              const T doi = dO[static_cast<std::size_t>(ch) * vv + i];
              if (doi == T(0)) continue;
              for (int j = 0; j < vv; ++j) {
                dP[static_cast<std::size_t>(i) * vv + j] +=
                    doi * vvv[static_cast<std::size_t>(ch) * vv + j];
                dV[static_cast<std::size_t>(ch) * vv + j] +=
                    ph[static_cast<std::size_t>(i) * vv + j] * doi;
              }
            }
          // Softmax rows: dS[i,j] = P[i,j] (dP[i,j] - sum_k dP[i,k] P[i,k]).
          for (int i = 0; i < vv; ++i) {
            T dot = T(0);
            for (int j = 0; j < vv; ++j)
              dot += dP[static_cast<std::size_t>(i) * vv + j] *
                     ph[static_cast<std::size_t>(i) * vv + j];
            for (int j = 0; j < vv; ++j)
              dS[static_cast<std::size_t>(i) * vv + j] =
                  ph[static_cast<std::size_t>(i) * vv + j] *
                  (dP[static_cast<std::size_t>(i) * vv + j] - dot);
          }
          // Scores S[i,j] = scale * sum_ch Q[ch,i] K[ch,j].
          for (int i = 0; i < vv; ++i)
            for (int j = 0; j < vv; ++j) {
              const T ds = scale * dS[static_cast<std::size_t>(i) * vv + j];
              if (ds == T(0)) continue;
              for (int ch = c0; ch < c0 + dh; ++ch) {
                dQ[static_cast<std::size_t>(ch) * vv + i] +=
                    ds * k[static_cast<std::size_t>(ch) * vv + j];
                dK[static_cast<std::size_t>(ch) * vv + j] +=
                    ds * q[static_cast<std::size_t>(ch) * vv + i];
              }
            }
        }

        // Through the three input projections into dx and parameter grads.
        for (int i = 0; i < vv; ++i)
          for (int r = 0; r < c; ++r) {
            const T dq = dQ[static_cast<std::size_t>(r) * vv + i];
            const T dk = dK[static_cast<std::size_t>(r) * vv + i];
            const T dv = dV[static_cast<std::size_t>(r) * vv + i];
            if (dq != T(0)) gbq_[static_cast<std::size_t>(r)] += dq;
            if (dk != T(0)) gbk_[static_cast<std::size_t>(r)] += dk;
            if (dv != T(0)) gbv_[static_cast<std::size_t>(r)] += dv;
            for (int cc = 0; cc < c; ++cc) {
              const T xci = x_.at(in, cc, it, i);
              gwq_[static_cast<std::size_t>(r) * c + cc] += dq * xci;
              gwk_[static_cast<std::size_t>(r) * c + cc] += dk * xci;
              gwv_[static_cast<std::size_t>(r) * c + cc] += dv * xci;
              dx.at(in, cc, it, i) += wq_[static_cast<std::size_t>(r) * c + cc] * dq +
                                      wk_[static_cast<std::size_t>(r) * c + cc] * dk +
                                      wv_[static_cast<std::size_t>(r) * c + cc] * dv;
            }
          }
      }
    return dx;
  }

  void collect_params(const std::string& prefix,
                      std::vector<ParamRef<T>>& out) override {
    const int c = cfg_.in_channels;
    out.push_back({prefix + ".Wq", &wq_, &gwq_, {c, c}});
    out.push_back({prefix + ".bq", &bq_, &gbq_, {c}});
    out.push_back({prefix + ".Wk", &wk_, &gwk_, {c, c}});
    out.push_back({prefix + ".bk", &bk_, &gbk_, {c}});
    out.push_back({prefix + ".Wv", &wv_, &gwv_, {c, c}});
    out.push_back({prefix + ".bv", &bv_, &gbv_, {c}});
    out.push_back({prefix + ".Wo", &wo_, &gwo_, {cfg_.out_channels, c}});
    out.push_back({prefix + ".bo", &bo_, &gbo_, {cfg_.out_channels}});
  }

  void init(Rng& rng) override {
    detail::fan_in_uniform(wq_, cfg_.in_channels, rng);
    detail::fan_in_uniform(wk_, cfg_.in_channels, rng);
    detail::fan_in_uniform(wv_, cfg_.in_channels, rng);
    detail::fan_in_uniform(wo_, cfg_.in_channels, rng);
    std::fill(bq_.begin(), bq_.end(), T(0));
    std::fill(bk_.begin(), bk_.end(), T(0));
    std::fill(bv_.begin(), bv_.end(), T(0));
    std::fill(bo_.begin(), bo_.end(), T(0));
  }

  void init_zero() override {
    // Zeroing the output projection suffices to make the unit emit 0.
    std::fill(wo_.begin(), wo_.end(), T(0));
    std::fill(bo_.begin(), bo_.end(), T(0));
  }

 private:
  struct Cache {
    std::vector<T> q, k, v, o;  // per frame: C x V, frame-major
    std::vector<T> p;           // per frame: heads x V x V
  };

  Tensor4<T> run_forward(const Tensor4<T>& x, Cache& cache) const {
    if (x.c != cfg_.in_channels)
      throw Error(errc::shape, "spatial_transformer expects " +
                                   std::to_string(cfg_.in_channels) +
                                   " input channels, got " + std::to_string(x.c));
    const int n = x.n, t = x.t, vv = x.v;
    const int c = cfg_.in_channels, co_n = cfg_.out_channels;
    const int heads = cfg_.heads, dh = c / heads;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));

    const std::size_t frames = static_cast<std::size_t>(n) * t;
    cache.q.assign(frames * c * vv, T(0));
    cache.k.assign(frames * c * vv, T(0));
    cache.v.assign(frames * c * vv, T(0));
    cache.o.assign(frames * c * vv, T(0));
    cache.p.assign(frames * heads * vv * vv, T(0));

    std::vector<T> s(static_cast<std::size_t>(vv) * vv);
    Tensor4<T> pre(n, co_n, t, vv);
    for (int in = 0; in < n; ++in)
      for (int it = 0; it < t; ++it) {
        const std::size_t fb = (static_cast<std::size_t>(in) * t + it);
        T* q = cache.q.data() + fb * c * vv;
        T* k = cache.k.data() + fb * c * vv;
        T* vbuf = cache.v.data() + fb * c * vv;
        T* o = cache.o.data() + fb * c * vv;
        T* p = cache.p.data() + fb * heads * vv * vv;

        for (int r = 0; r < c; ++r)
          for (int i = 0; i < vv; ++i) {
            T aq = bq_[static_cast<std::size_t>(r)];
            T ak = bk_[static_cast<std::size_t>(r)];
            T av = bv_[static_cast<std::size_t>(r)];
            for (int cc = 0; cc < c; ++cc) {
              const T xci = x.at(in, cc, it, i);
              aq += wq_[static_cast<std::size_t>(r) * c + cc] * xci;
              ak += wk_[static_cast<std::size_t>(r) * c + cc] * xci;
              av += wv_[static_cast<std::size_t>(r) * c + cc] * xci;
            }
            q[static_cast<std::size_t>(r) * vv + i] = aq;
            k[static_cast<std::size_t>(r) * vv + i] = ak;
            vbuf[static_cast<std::size_t>(r) * vv + i] = av;
          }

        for (int h = 0; h < heads; ++h) {
          const int c0 = h * dh;
          T* ph = p + static_cast<std::size_t>(h) * vv * vv;
          for (int i = 0; i < vv; ++i) {
            T row_max = -std::numeric_limits<T>::infinity();
            for (int j = 0; j < vv; ++j) {
              T acc = T(0);
              for (int ch = c0; ch < c0 + dh; ++ch)
                acc += q[static_cast<std::size_t>(ch) * vv + i] *
                       k[static_cast<std::size_t>(ch) * vv + j];
              acc *= scale;
              s[static_cast<std::size_t>(i) * vv + j] = acc;
              row_max = std::max(row_max, acc);
            }
            T den = T(0);
            for (int j = 0; j < vv; ++j) {
              const T e = std::exp(s[static_cast<std::size_t>(i) * vv + j] - row_max);
              ph[static_cast<std::size_t>(i) * vv + j] = e;
              den += e;
            }
            for (int j = 0; j < vv; ++j)
              ph[static_cast<std::size_t>(i) * vv + j] /= den;
          }
          for (int ch = c0; ch < c0 + dh; ++ch)
            for (int i = 0; i < vv; ++i) {
              T acc = T(0);
              for (int j = 0; j < vv; ++j)
                acc += ph[static_cast<std::size_t>(i) * vv + j] *
                       vbuf[static_cast<std::size_t>(ch) * vv + j];
              o[static_cast<std::size_t>(ch) * vv + i] = acc;
            }
        }

        for (int co = 0; co < co_n; ++co)
          for (int i = 0; i < vv; ++i) {
            T acc = bo_[static_cast<std::size_t>(co)];
            for (int cc = 0; cc < c; ++cc)
              acc += wo_[static_cast<std::size_t>(co) * c + cc] *
                     o[static_cast<std::size_t>(cc) * vv + i];
            pre.at(in, co, it, i) = acc;
          }
      }
    return pre;
  }

  UnitConfig cfg_;
  std::vector<T> wq_, wk_, wv_, bq_, bk_, bv_, wo_, bo_;
  std::vector<T> gwq_, gwk_, gwv_, gbq_, gbk_, gbv_, gwo_, gbo_;
  Tensor4<T> x_, pre_;
  Cache cache_;
};

template <class T>
std::unique_ptr<Unit<T>> make_unit(const UnitConfig& cfg, const MatD& adjacency) {
  switch (cfg.kind) {
    case UnitKind::graph_conv:
      return std::make_unique<GraphConvUnit<T>>(cfg, adjacency);
    case UnitKind::spatial_transformer:
      return std::make_unique<SpatialTransformerUnit<T>>(cfg);
    default:
      return std::make_unique<TemporalConvUnit<T>>(cfg);
  }
}

}  // namespace posegait::model
