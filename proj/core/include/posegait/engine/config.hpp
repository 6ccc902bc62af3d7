#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posegait/engine/optimizer.hpp"
#include "posegait/loss/supcon.hpp"
#include "posegait/loss/triplet.hpp"
#include "posegait/model/config.hpp"
#include "posegait/sampling/spec.hpp"
#include "posegait/transforms/pipeline.hpp"

namespace posegait::engine {

struct DataConfig {
  std::string root;
  std::string protocol = "synthetic";      // builtin id, unless protocol_file set
  std::string protocol_file;
  std::string layout = "coco17";
  std::string layout_file;                 // optional layout registration
};

enum class LossKind { triplet, supcon };

struct LossConfig {
  LossKind kind = LossKind::triplet;
  loss::TripletLossSpec triplet;
  loss::SupConSpec supcon;
};

struct ModelGenConfig {
  model::BackboneFamily family = model::BackboneFamily::gait_tr_like;
  int num_layers = 4;
  int base_channels = 32;
  int heads = 2;
  int temporal_kernel = 5;
  int embedding_dim = 64;
  bool edge_mask = false;
  std::optional<std::vector<model::BlockConfig>> explicit_blocks;
};

struct ScheduleConfig {
  double max_lr = 0.001;
  std::int64_t total_steps = 300;
  double pct_start = 0.3;
  double div = 25.0;
  double final_div = 1e4;
};

struct RunPaths {
  std::string out_dir = "runs/default";
  std::int64_t checkpoint_every = 0;  // 0 = final checkpoint only
  std::int64_t log_every = 1;
  std::int64_t steps_per_epoch = 0;   // 0 = no epoch progress lines
};

struct RunConfig {
  std::string description;
  std::uint64_t seed = 0;
  std::string dtype = "float32";  // "float32" | "float64"
  DataConfig data;
  sampling::SamplerSpec sampler;
  transforms::TransformSpec transform;
  std::string transform_preset;  // informational: where `transform` came from
  ModelGenConfig model;
  LossConfig loss;
  OptimizerSpec optimizer;
  ScheduleConfig schedule;
  RunPaths run;

  /// Builds the backbone config (explicit blocks, or the family generator
  /// sized from the multi-input branch set).
  model::BackboneConfig backbone_config() const;
  bool two_view() const {
    return loss.kind == LossKind::supcon &&
           loss.supcon.views == loss::SupConViews::two;
  }
};

/// Strict load: unknown keys anywhere are rejected, and every problem is
/// collected into one Error("config") message listing each offending key.
/// `search_dirs` are tried in order when resolving transform preset names.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text,
                           const std::vector<std::string>& search_dirs);

/// The defaults-resolved effective config; reloading the dump reproduces
/// the run (transform presets are inlined).
std::string dump_run_config(const RunConfig& cfg);

/// Loads a transform preset file ({"description"?, "select_length"?,
/// "ops": [...], "branches"?}).
transforms::TransformSpec load_transform_preset(const std::string& path);

}  // namespace posegait::engine
