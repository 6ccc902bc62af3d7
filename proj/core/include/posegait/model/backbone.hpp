#pragma once

#include <memory>
#include <string>
#include <vector>

#include "posegait/batch.hpp"
#include "posegait/graph.hpp"
#include "posegait/model/units.hpp"

namespace posegait::model {

/// A repeatable group of units, optionally wrapped in a residual connection
/// (with a linear channel projection when in != out). The final unit of a
/// residual block is zero-initialized, so the block is exactly the identity
/// map right after init().
template <class T>
class Block {
 public:
  Block(const BlockConfig& cfg, const MatD& adjacency) : cfg_(cfg) {
    for (const auto& ucfg : cfg.units)
      units_.push_back(make_unit<T>(ucfg, adjacency));
    if (cfg_.residual && cfg_.projection) {
      in_ch_ = cfg.units.front().in_channels;
      out_ch_ = cfg.units.back().out_channels;
      proj_w_.assign(static_cast<std::size_t>(out_ch_) * in_ch_, T(0));
      proj_gw_ = proj_w_;
    }
  }

  Tensor4<T> forward(const Tensor4<T>& x) const {
    Tensor4<T> h = x;
    for (const auto& u : units_) h = u->forward(h);
    if (cfg_.residual) add_shortcut(x, h);
    return h;
  }

  Tensor4<T> forward_train(const Tensor4<T>& x) {
    if (cfg_.residual) x_ = x;
    Tensor4<T> h = x;
    for (auto& u : units_) h = u->forward_train(h);
    if (cfg_.residual) add_shortcut(x, h);
    return h;
  }

  Tensor4<T> backward(const Tensor4<T>& grad_out) {
    Tensor4<T> g = grad_out;
    for (auto it = units_.rbegin(); it != units_.rend(); ++it) g = (*it)->backward(g);
    if (cfg_.residual) {
      if (cfg_.projection) {
        const int n = x_.n, t = x_.t, vv = x_.v;
        for (int in = 0; in < n; ++in)
          for (int it = 0; it < t; ++it)
            for (int iv = 0; iv < vv; ++iv)
              for (int co = 0; co < out_ch_; ++co) {
                const T d = grad_out.at(in, co, it, iv);
                for (int ci = 0; ci < in_ch_; ++ci) {
                  proj_gw_[static_cast<std::size_t>(co) * in_ch_ + ci] +=
                      d * x_.at(in, ci, it, iv);
                  g.at(in, ci, it, iv) +=
                      proj_w_[static_cast<std::size_t>(co) * in_ch_ + ci] * d;
                }
              }
      } else {
        for (std::size_t i = 0; i < g.data.size(); ++i)
          g.data[i] += grad_out.data[i];
      }
    }
    return g;
  }

  void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    for (std::size_t i = 0; i < units_.size(); ++i)
      units_[i]->collect_params(prefix + ".unit" + std::to_string(i), out);
    if (!proj_w_.empty())
      out.push_back({prefix + ".proj", &proj_w_, &proj_gw_, {out_ch_, in_ch_}});
  }

  void init(Rng& rng) {
    for (auto& u : units_) u->init(rng);
    if (!proj_w_.empty()) detail::fan_in_uniform(proj_w_, in_ch_, rng);
    if (cfg_.residual) units_.back()->init_zero();
  }

  const std::vector<std::unique_ptr<Unit<T>>>& units() const { return units_; }
  const BlockConfig& config() const { return cfg_; }

 private:
  void add_shortcut(const Tensor4<T>& x, Tensor4<T>& h) const {
    if (cfg_.projection) {
      for (int in = 0; in < h.n; ++in)
        for (int it = 0; it < h.t; ++it)
          for (int iv = 0; iv < h.v; ++iv)
            for (int co = 0; co < out_ch_; ++co) {
              T acc = T(0);
              for (int ci = 0; ci < in_ch_; ++ci)
                acc += proj_w_[static_cast<std::size_t>(co) * in_ch_ + ci] *
                       x.at(in, ci, it, iv);
              h.at(in, co, it, iv) += acc;
            }
    } else {
      for (std::size_t i = 0; i < h.data.size(); ++i) h.data[i] += x.data[i];
    }
  }

  BlockConfig cfg_;
  std::vector<std::unique_ptr<Unit<T>>> units_;
  int in_ch_ = 0, out_ch_ = 0;
  std::vector<T> proj_w_, proj_gw_;
  Tensor4<T> x_;
};

/// Full feature extractor: per-branch stems (resgcn_like) or direct input
/// (gait_tr_like), the block stack, mean pooling over (T, V) and a linear
/// embedding head. Immutable during inference; training (forward_train /
/// backward / optimizer steps) requires exclusive access.
template <class T>
class Backbone {
 public:
  Backbone(const BackboneConfig& cfg, const SkeletonGraph& graph,
           std::uint64_t init_seed = 0)
      : cfg_(cfg), adjacency_(normalized_adjacency(graph)) {
    validate_backbone_config(cfg);
    if (cfg.family == BackboneFamily::resgcn_like) {
      const int stem_out = cfg.blocks.front().units.front().in_channels;
      for (std::size_t b = 0; b < cfg.input_branches.size(); ++b) {
        UnitConfig stem;
        stem.kind = UnitKind::graph_conv;
        stem.in_channels = 2;
        stem.out_channels = stem_out;
        stem.activation = Activation::relu;
        stems_.push_back(std::make_unique<GraphConvUnit<T>>(stem, adjacency_));
      }
    }
    for (const auto& bcfg : cfg.blocks) blocks_.emplace_back(bcfg, adjacency_);
    last_channels_ = cfg.blocks.back().units.back().out_channels;
    head_w_.assign(static_cast<std::size_t>(last_channels_) * cfg.embedding_dim, T(0));
    head_b_.assign(static_cast<std::size_t>(cfg.embedding_dim), T(0));
    head_gw_ = head_w_;
    head_gb_ = head_b_;
    Rng rng(derive_seed(init_seed, 0x1217));
    for (auto& s : stems_) s->init(rng);
    for (auto& b : blocks_) b.init(rng);
    detail::fan_in_uniform(head_w_, last_channels_, rng);
  }

  const BackboneConfig& config() const { return cfg_; }
  int layer_count() const { return cfg_.total_units(); }
  int input_channels() const { return cfg_.input_channels(); }
  int embedding_dim() const { return cfg_.embedding_dim; }

  Matrix<T> embed(const Tensor4<T>& input) const {
    Tensor4<T> h = run_stems<false>(const_cast<Backbone*>(this), input);
    check_finite(h.data, "stem");
    int bi = 0;
    for (const auto& b : blocks_) {
      h = b.forward(h);
      check_finite(h.data, "block" + std::to_string(bi++));
    }
    Matrix<T> pooled = pool(h);
    Matrix<T> e = head(pooled);
    check_finite(e.data, "embedding head");
    return e;
  }

  Matrix<T> embed_train(const Tensor4<T>& input) {
    Tensor4<T> h = run_stems<true>(this, input);
    check_finite(h.data, "stem");
    int bi = 0;
    for (auto& b : blocks_) {
      h = b.forward_train(h);
      check_finite(h.data, "block" + std::to_string(bi++));
    }
    pooled_ = pool(h);
    feat_t_ = h.t;
    feat_v_ = h.v;
    Matrix<T> e = head(pooled_);
    check_finite(e.data, "embedding head");
    return e;
  }

  /// Backpropagates d(loss)/d(embeddings) through head, pooling, blocks and
  /// stems, accumulating into every parameter gradient buffer.
  void backward(const Matrix<T>& grad_embed) {
    const int n = pooled_.rows, cl = last_channels_, d = cfg_.embedding_dim;
    Matrix<T> dpooled(n, cl, T(0));
    for (int in = 0; in < n; ++in)
      for (int j = 0; j < d; ++j) {
        const T g = grad_embed.at(in, j);
        if (g == T(0)) continue;
        head_gb_[static_cast<std::size_t>(j)] += g;
        for (int c = 0; c < cl; ++c) {
          head_gw_[static_cast<std::size_t>(c) * d + j] += pooled_.at(in, c) * g;
          dpooled.at(in, c) += head_w_[static_cast<std::size_t>(c) * d + j] * g;
        }
      }
    Tensor4<T> dh(n, cl, feat_t_, feat_v_);
    const T inv = T(1) / static_cast<T>(static_cast<std::size_t>(feat_t_) * feat_v_);
    for (int in = 0; in < n; ++in)
      for (int c = 0; c < cl; ++c) {
        const T g = dpooled.at(in, c) * inv;
        for (int it = 0; it < feat_t_; ++it)
          for (int iv = 0; iv < feat_v_; ++iv) dh.at(in, c, it, iv) = g;
      }
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
      dh = it->backward(dh);
    if (!stems_.empty()) {
      for (std::size_t b = 0; b < stems_.size(); ++b)
        stems_[b]->backward(dh);  // input gradients are discarded
    }
  }

  std::vector<ParamRef<T>> parameters() {
    std::vector<ParamRef<T>> out;
    for (std::size_t i = 0; i < stems_.size(); ++i)
      stems_[i]->collect_params("stem" + std::to_string(i), out);
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i].collect_params("block" + std::to_string(i), out);
    out.push_back({"head.W", &head_w_, &head_gw_, {last_channels_, cfg_.embedding_dim}});
    out.push_back({"head.b", &head_b_, &head_gb_, {cfg_.embedding_dim}});
    return out;
  }

  void zero_grads() {
    for (auto& p : parameters())
      std::fill(p.grad->begin(), p.grad->end(), T(0));
  }

  std::vector<Block<T>>& blocks() { return blocks_; }

 private:
  template <bool Train>
  static Tensor4<T> run_stems(Backbone* self, const Tensor4<T>& input) {
    if (input.c != self->cfg_.input_channels())
      throw Error(errc::shape,
                  "model expects " + std::to_string(self->cfg_.input_channels()) +
                      " input channels (2 per branch), got " + std::to_string(input.c));
    if (self->stems_.empty()) return input;
    Tensor4<T> sum;
    for (std::size_t b = 0; b < self->stems_.size(); ++b) {
      Tensor4<T> slice(input.n, 2, input.t, input.v);
      for (int in = 0; in < input.n; ++in)
        for (int ch = 0; ch < 2; ++ch)
          for (int it = 0; it < input.t; ++it)
            for (int iv = 0; iv < input.v; ++iv)
              slice.at(in, ch, it, iv) =
                  input.at(in, static_cast<int>(2 * b) + ch, it, iv);
      Tensor4<T> y = Train ? self->stems_[b]->forward_train(slice)
                           : self->stems_[b]->forward(slice);
      if (b == 0) {
        sum = std::move(y);
      } else {
        for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += y.data[i];
      }
    }
    return sum;
  }

  Matrix<T> pool(const Tensor4<T>& h) const {
    Matrix<T> pooled(h.n, h.c, T(0));
    const T inv = T(1) / static_cast<T>(static_cast<std::size_t>(h.t) * h.v);
    for (int in = 0; in < h.n; ++in)
      for (int c = 0; c < h.c; ++c) {
        T acc = T(0);
        for (int it = 0; it < h.t; ++it)
          for (int iv = 0; iv < h.v; ++iv) acc += h.at(in, c, it, iv);
        pooled.at(in, c) = acc * inv;
      }
    return pooled;
  }

  Matrix<T> head(const Matrix<T>& pooled) const {
    Matrix<T> e(pooled.rows, cfg_.embedding_dim, T(0));
    for (int in = 0; in < pooled.rows; ++in)
      for (int j = 0; j < cfg_.embedding_dim; ++j) {
        T acc = head_b_[static_cast<std::size_t>(j)];
        for (int c = 0; c < last_channels_; ++c)
          acc += pooled.at(in, c) * head_w_[static_cast<std::size_t>(c) * cfg_.embedding_dim + j];
        e.at(in, j) = acc;
      }
    return e;
  }

  static void check_finite(const std::vector<T>& values, const std::string& where) {
    for (const T& x : values)
      if (!std::isfinite(static_cast<double>(x)))
        throw Error(errc::non_finite, "non-finite activation after " + where);
  }

  BackboneConfig cfg_;
  MatD adjacency_;
  std::vector<std::unique_ptr<GraphConvUnit<T>>> stems_;
  std::vector<Block<T>> blocks_;
  int last_channels_ = 0;
  std::vector<T> head_w_, head_b_, head_gw_, head_gb_;
  Matrix<T> pooled_;
  int feat_t_ = 0, feat_v_ = 0;
};

/// Stacks a batch of T x V x C feature arrays into an N x C x T x V tensor.
/// All sequences must share one (T, V, C) shape.
template <class T>
Tensor4<T> batch_to_tensor(const SampleBatch& batch) {
  if (batch.sequences.empty()) throw Error(errc::shape, "empty batch");
  const auto& first = batch.sequences.front();
  Tensor4<T> out(batch.size(), first.c, first.t, first.v);
  for (int i = 0; i < batch.size(); ++i) {
    const FeatureArray& f = batch.sequences[static_cast<std::size_t>(i)];
    if (f.t != first.t || f.v != first.v || f.c != first.c)
      throw Error(errc::shape, "batch sequences have mixed shapes");
    for (int it = 0; it < f.t; ++it)
      for (int iv = 0; iv < f.v; ++iv)
        for (int ic = 0; ic < f.c; ++ic)
          out.at(i, ic, it, iv) = static_cast<T>(f.at(it, iv, ic));
  }
  return out;
}

}  // namespace posegait::model
