#pragma once

#include <string>
#include <vector>

#include "posegait/error.hpp"
#include "posegait/transforms/multi_input.hpp"

namespace posegait::model {

enum class UnitKind { graph_conv, spatial_transformer, temporal_conv };
enum class Activation { identity, relu, tanh };
enum class BackboneFamily { resgcn_like, gait_tr_like };
enum class Pooling { mean_over_tv };

UnitKind unit_kind_from_string(const std::string& s);
std::string to_string(UnitKind k);
Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);
BackboneFamily family_from_string(const std::string& s);
std::string to_string(BackboneFamily f);

struct UnitConfig {
  UnitKind kind = UnitKind::graph_conv;
  int in_channels = 0;
  int out_channels = 0;
  int kernel_size = 5;  // temporal_conv: odd so T is preserved
  int heads = 1;        // spatial_transformer: must divide in_channels
  Activation activation = Activation::relu;
  bool learnable_edge_mask = false;  // graph_conv: additive V x V mask
};

struct BlockConfig {
  std::vector<UnitConfig> units;  // typically spatial then temporal
  bool residual = false;
  bool projection = false;  // required when residual and in != out channels
};

struct BackboneConfig {
  BackboneFamily family = BackboneFamily::gait_tr_like;
  std::vector<BlockConfig> blocks;
  int num_layers = 0;  // must equal the total unit count across blocks
  std::vector<transforms::Branch> input_branches = {transforms::Branch::joint};
  int embedding_dim = 64;
  Pooling pooling = Pooling::mean_over_tv;

  int input_channels() const {
    return 2 * static_cast<int>(input_branches.size());
  }
  int total_units() const {
    int n = 0;
    for (const auto& b : blocks) n += static_cast<int>(b.units.size());
    return n;
  }
};

/// Reconstruction-style config generators for the two supported families.
/// Widths and kernel sizes are this project's defaults, not sourced values;
/// explicit block lists in the run config override them entirely.
BackboneConfig make_gait_tr_config(int num_layers, int in_channels,
                                   int base_channels, int heads,
                                   int temporal_kernel, int embedding_dim);
BackboneConfig make_resgcn_config(int num_layers,
                                  const std::vector<transforms::Branch>& branches,
                                  int base_channels, int temporal_kernel,
                                  int embedding_dim);

/// Throws Error("config") or Error("shape") on any structural problem:
/// channel chaining breaks, num_layers mismatch, even temporal kernels,
/// heads not dividing channels, residual without matching channels or
/// projection.
void validate_backbone_config(const BackboneConfig& cfg);

}  // namespace posegait::model
