#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "posegait/engine/checkpoint.hpp"
#include "posegait/engine/config.hpp"
#include "posegait/engine/optimizer.hpp"
#include "posegait/engine/schedule.hpp"
#include "posegait/model/backbone.hpp"
#include "posegait/sampling/sampler.hpp"

namespace posegait::engine {

struct StepLog {
  std::int64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
  int n_active = 0;
  std::int64_t wall_ms = 0;

  /// Deterministic fields only (excludes wall_ms); %.17g keeps the values
  /// bit-recoverable so log equality means trajectory equality.
  std::string deterministic_csv() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%d",
                  static_cast<long long>(step), lr, loss, n_active);
    return buf;
  }
};

/// Config-driven training loop. One trainer per process; a (config, seed)
/// pair fixes the whole loss trajectory on a device because every stochastic
/// choice is derived from (seed, step ordinal), never from shared stream
/// position. save/load round-trips make resumed runs step-for-step identical
/// to uninterrupted ones.
template <class T>
class Trainer {
 public:
  Trainer(const RunConfig& cfg, const ingest::DatasetIndex& index,
          const SkeletonGraph& graph)
      : cfg_(cfg),
        index_(&index),
        graph_(graph),
        store_(index),
        net_(cfg.backbone_config(), graph, cfg.seed),
        rng_(derive_seed(cfg.seed, 0x7E57)),
        optimizer_(cfg.optimizer, net_.parameters()) {}

  model::Backbone<T>& net() { return net_; }
  const model::Backbone<T>& net() const { return net_; }
  std::int64_t step() const { return step_; }

  StepLog train_step() {
    const auto t0 = std::chrono::steady_clock::now();
    const SampleBatch batch = sampling::assemble_batch(
        *index_, store_, cfg_.sampler, cfg_.transform, graph_,
        static_cast<std::uint64_t>(step_), cfg_.two_view());
    const model::Tensor4<T> input = model::batch_to_tensor<T>(batch);

    net_.zero_grads();
    Matrix<T> emb;
    try {
      emb = net_.embed_train(input);
    } catch (const Error& e) {
      if (e.code() != errc::non_finite) throw;
      throw Error(errc::non_finite,
                  std::string(e.what()) + " at step " + std::to_string(step_));
    }

    StepLog log;
    log.step = step_;
    log.lr = onecycle_lr(step_, cfg_.schedule.total_steps, cfg_.schedule.max_lr,
                         cfg_.schedule.pct_start, cfg_.schedule.div,
                         cfg_.schedule.final_div);

    Matrix<T> grad(emb.rows, emb.cols, T(0));
    if (cfg_.loss.kind == LossKind::triplet) {
      const auto r =
          cfg_.loss.triplet.variant == loss::TripletVariant::batch_all
              ? loss::triplet_batch_all<T>(emb.data.data(), emb.rows, emb.cols,
                                           batch.labels.data(),
                                           static_cast<T>(cfg_.loss.triplet.margin))
              : loss::triplet_batch_hard<T>(emb.data.data(), emb.rows, emb.cols,
                                            batch.labels.data(),
                                            static_cast<T>(cfg_.loss.triplet.margin));
      log.loss = static_cast<double>(r.loss);
      log.n_active = r.n_active;
      if (!r.grad.empty()) grad.data = r.grad;
    } else {
      const auto r = loss::supcon_loss<T>(emb.data.data(), emb.rows, emb.cols,
                                          batch.labels.data(), cfg_.loss.supcon);
      log.loss = static_cast<double>(r.loss);
      log.n_active = emb.rows;
      grad.data = r.grad;
    }
    if (!std::isfinite(log.loss))
      throw Error(errc::non_finite,
                  "non-finite loss at step " + std::to_string(step_));

    net_.backward(grad);
    auto params = net_.parameters();
    optimizer_.step(params, log.lr);
    for (const auto& p : params)
      for (const T& x : *p.value)
        if (!std::isfinite(static_cast<double>(x)))
          throw Error(errc::non_finite, "non-finite parameter '" + p.name +
                                            "' after step " + std::to_string(step_));

    ++loss_count_;
    loss_sum_ += log.loss;
    loss_last_ = log.loss;
    ++step_;
    log.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return log;
  }

  /// Runs until total_steps, appending to <out_dir>/train_log.csv and
  /// checkpointing per config. Returns the final mean loss.
  double fit(bool quiet = false) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.run.out_dir);
    const std::string log_path = cfg_.run.out_dir + "/train_log.csv";
    const bool fresh = step_ == 0;
    std::ofstream log(log_path, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw Error(errc::io, "cannot open log '" + log_path + "'");
    if (fresh) log << "step,lr,loss,n_active,wall_ms\n";

    std::ofstream cfg_dump(cfg_.run.out_dir + "/effective_config.json",
                           std::ios::trunc);
    cfg_dump << dump_run_config(cfg_);
    cfg_dump.close();

    while (step_ < cfg_.schedule.total_steps) {
      const StepLog entry = train_step();
      if (entry.step % cfg_.run.log_every == 0 ||
          entry.step + 1 == cfg_.schedule.total_steps)
        log << entry.deterministic_csv() << ',' << entry.wall_ms << "\n" << std::flush;
      if (!quiet && cfg_.run.steps_per_epoch > 0 &&
          (entry.step + 1) % cfg_.run.steps_per_epoch == 0)
        std::cout << "epoch " << (entry.step + 1) / cfg_.run.steps_per_epoch
                  << " step " << entry.step + 1 << " loss " << entry.loss << "\n";
      if (cfg_.run.checkpoint_every > 0 && step_ % cfg_.run.checkpoint_every == 0 &&
          step_ < cfg_.schedule.total_steps)
        save(cfg_.run.out_dir + "/step" + std::to_string(step_) + ".ckpt");
    }
    save(cfg_.run.out_dir + "/final.ckpt");
    return loss_count_ > 0 ? loss_sum_ / static_cast<double>(loss_count_) : 0.0;
  }

  void save(const std::string& path) const {
    CheckpointState state;
    state.config_json = dump_run_config(cfg_);
    state.step = static_cast<std::uint64_t>(step_);
    state.optimizer_steps = static_cast<std::uint64_t>(optimizer_.step_count());
    state.rng_state = rng_.serialize();
    state.loss_count = loss_count_;
    state.loss_sum = loss_sum_;
    state.loss_last = loss_last_;
    auto params = const_cast<Trainer*>(this)->net_.parameters();
    save_checkpoint<T>(path, state, params, optimizer_.first_moments(),
                       optimizer_.second_moments());
  }

  void load(const std::string& path) {
    auto params = net_.parameters();
    CheckpointState state = load_checkpoint<T>(
        path, params, &optimizer_.first_moments(), &optimizer_.second_moments());
    step_ = static_cast<std::int64_t>(state.step);
    optimizer_.set_step_count(static_cast<std::int64_t>(state.optimizer_steps));
    rng_.restore(state.rng_state);
    loss_count_ = state.loss_count;
    loss_sum_ = state.loss_sum;
    loss_last_ = state.loss_last;
  }

 private:
  RunConfig cfg_;
  const ingest::DatasetIndex* index_;
  SkeletonGraph graph_;
  ingest::SequenceStore store_;
  model::Backbone<T> net_;
  Rng rng_;
  Optimizer<T> optimizer_;
  std::int64_t step_ = 0;
  std::uint64_t loss_count_ = 0;
  double loss_sum_ = 0.0;
  double loss_last_ = 0.0;
};

/// Embeds every entry of one split with the deterministic eval pipeline
/// (full sequence, multi-input only, batch of one). Labels are dense codes
/// over all subjects in the index so gallery and probe codes agree.
template <class T>
EmbeddingSet compute_embeddings(const model::Backbone<T>& net,
                                const ingest::DatasetIndex& index,
                                ingest::SequenceStore& store, ingest::Split split,
                                const transforms::TransformSpec& transform,
                                const SkeletonGraph& graph) {
  std::map<std::string, int> codes;
  for (const auto& e : index.entries)
    codes.emplace(e.subject_id, 0);
  int next = 0;
  for (auto& [subject, code] : codes) code = next++;

  const std::vector<int> ids = index.split_ids(split);
  if (ids.empty())
    throw Error(errc::no_sequences,
                "split '" + ingest::to_string(split) + "' is empty");
  EmbeddingSet out;
  out.vectors = Matrix<double>(static_cast<int>(ids.size()), net.embedding_dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& entry = index.entries[static_cast<std::size_t>(ids[i])];
    const SkeletonSequence& seq = store.load(ids[i]);
    const FeatureArray feat = transforms::eval_features(seq, graph, transform);
    SampleBatch one;
    one.sequences.push_back(feat);
    one.labels.push_back(codes.at(entry.subject_id));
    one.views.push_back(entry.view);
    const Matrix<T> emb = net.embed(model::batch_to_tensor<T>(one));
    for (int j = 0; j < emb.cols; ++j)
      out.vectors.at(static_cast<int>(i), j) = static_cast<double>(emb.at(0, j));
    out.labels.push_back(codes.at(entry.subject_id));
    out.views.push_back(entry.view);
    out.conditions.push_back(entry.condition);
  }
  return out;
}

}  // namespace posegait::engine
