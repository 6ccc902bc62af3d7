#include "posegait/model/config.hpp"

namespace posegait::model {

UnitKind unit_kind_from_string(const std::string& s) {
  if (s == "graph_conv") return UnitKind::graph_conv;
  if (s == "spatial_transformer") return UnitKind::spatial_transformer;
  if (s == "temporal_conv") return UnitKind::temporal_conv;
  throw Error(errc::config, "unknown unit kind '" + s + "'");
}

std::string to_string(UnitKind k) {
  switch (k) {
    case UnitKind::graph_conv: return "graph_conv";
    case UnitKind::spatial_transformer: return "spatial_transformer";
    default: return "temporal_conv";
  }
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw Error(errc::config, "unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    default: return "tanh";
  }
}

BackboneFamily family_from_string(const std::string& s) {
  if (s == "resgcn_like") return BackboneFamily::resgcn_like;
  if (s == "gait_tr_like") return BackboneFamily::gait_tr_like;
  throw Error(errc::config, "unknown backbone family '" + s + "'");
}

std::string to_string(BackboneFamily f) {
  return f == BackboneFamily::resgcn_like ? "resgcn_like" : "gait_tr_like";
}

BackboneConfig make_gait_tr_config(int num_layers, int in_channels,
                                   int base_channels, int heads,
                                   int temporal_kernel, int embedding_dim) {
  if (num_layers < 2 || num_layers % 2 != 0)
    throw Error(errc::config,
                "gait_tr_like generator needs an even num_layers >= 2, got " +
                    std::to_string(num_layers));
  BackboneConfig cfg;
  cfg.family = BackboneFamily::gait_tr_like;
  cfg.num_layers = num_layers;
  cfg.embedding_dim = embedding_dim;
  const int blocks = num_layers / 2;
  int in = in_channels;
  for (int b = 0; b < blocks; ++b) {
    BlockConfig block;
    UnitConfig spatial;
    spatial.kind = UnitKind::spatial_transformer;
    spatial.in_channels = in;
    spatial.out_channels = base_channels;
    spatial.heads = heads;
    spatial.activation = Activation::relu;
    UnitConfig temporal;
    temporal.kind = UnitKind::temporal_conv;
    temporal.in_channels = base_channels;
    temporal.out_channels = base_channels;
    temporal.kernel_size = temporal_kernel;
    temporal.activation = Activation::identity;  // residual-final unit
    block.units = {spatial, temporal};
    block.residual = true;
    block.projection = in != base_channels;
    cfg.blocks.push_back(block);
    in = base_channels;
  }
  return cfg;
}

BackboneConfig make_resgcn_config(int num_layers,
                                  const std::vector<transforms::Branch>& branches,
                                  int base_channels, int temporal_kernel,
                                  int embedding_dim) {
  if (num_layers < 2 || num_layers % 2 != 0)
    throw Error(errc::config,
                "resgcn_like generator needs an even num_layers >= 2, got " +
                    std::to_string(num_layers));
  BackboneConfig cfg;
  cfg.family = BackboneFamily::resgcn_like;
  cfg.num_layers = num_layers;
  cfg.embedding_dim = embedding_dim;
  cfg.input_branches = transforms::normalize_branches(branches);
  const int blocks = num_layers / 2;
  for (int b = 0; b < blocks; ++b) {
    BlockConfig block;
    UnitConfig spatial;
    spatial.kind = UnitKind::graph_conv;
    spatial.in_channels = base_channels;
    spatial.out_channels = base_channels;
    spatial.activation = Activation::relu;
    UnitConfig temporal;
    temporal.kind = UnitKind::temporal_conv;
    temporal.in_channels = base_channels;
    temporal.out_channels = base_channels;
    temporal.kernel_size = temporal_kernel;
    temporal.activation = Activation::identity;
    block.units = {spatial, temporal};
    block.residual = true;
    cfg.blocks.push_back(block);
  }
  return cfg;
}

void validate_backbone_config(const BackboneConfig& cfg) {
  if (cfg.blocks.empty()) throw Error(errc::config, "backbone has no blocks");
  if (cfg.embedding_dim < 1) throw Error(errc::config, "embedding_dim must be >= 1");
  if (cfg.input_branches.empty())
    throw Error(errc::config, "backbone needs at least one input branch");
  if (cfg.num_layers != cfg.total_units())
    throw Error(errc::config, "num_layers = " + std::to_string(cfg.num_layers) +
                                  " does not match total unit count " +
                                  std::to_string(cfg.total_units()));
  int expected_in = cfg.family == BackboneFamily::resgcn_like
                        ? cfg.blocks.front().units.front().in_channels
                        : cfg.input_channels();
  for (std::size_t bi = 0; bi < cfg.blocks.size(); ++bi) {
    const BlockConfig& block = cfg.blocks[bi];
    if (block.units.empty())
      throw Error(errc::config, "block " + std::to_string(bi) + " has no units");
    for (const UnitConfig& u : block.units) {
      if (u.in_channels < 1 || u.out_channels < 1)
        throw Error(errc::config, "unit channels must be >= 1");
      if (u.in_channels != expected_in)
        throw Error(errc::config,
                    "channel chaining broken at block " + std::to_string(bi) +
                        ": expected in=" + std::to_string(expected_in) + ", got " +
                        std::to_string(u.in_channels));
      if (u.kind == UnitKind::temporal_conv &&
          (u.kernel_size < 1 || u.kernel_size % 2 == 0))
        throw Error(errc::config, "temporal kernel must be odd, got " +
                                      std::to_string(u.kernel_size));
      if (u.kind == UnitKind::spatial_transformer &&
          (u.heads < 1 || u.in_channels % u.heads != 0))
        throw Error(errc::config,
                    "heads = " + std::to_string(u.heads) + " must divide in_channels = " +
                        std::to_string(u.in_channels));
      expected_in = u.out_channels;
    }
    const int block_in = block.units.front().in_channels;
    const int block_out = block.units.back().out_channels;
    if (block.residual && block_in != block_out && !block.projection)
      throw Error(errc::config,
                  "residual block " + std::to_string(bi) + " has in=" +
                      std::to_string(block_in) + " out=" + std::to_string(block_out) +
                      " and no projection");
  }
}

}  // namespace posegait::model
