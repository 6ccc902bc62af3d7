#include "posegait/engine/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace posegait::engine {

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "adamw") return OptimizerKind::adamw;
  throw Error(errc::config, "unknown optimizer '" + s + "'");
}

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "adamw";
}

namespace {

/// Collects every config problem so the error message lists all offending
/// keys at once instead of failing one at a time.
struct Problems {
  std::vector<std::string> items;

  void add(const std::string& msg) { items.push_back(msg); }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string msg = "invalid config:";
    for (const auto& it : items) msg += "\n  - " + it;
    throw Error(errc::config, msg);
  }
};

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed, Problems& problems) {
  if (!j.is_object()) {
    problems.add(path + " must be an object");
    return;
  }
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) problems.add("unknown key '" + path + "." + key + "'");
}

template <class T>
T get_or(const json& j, const std::string& key, const T& fallback,
         const std::string& path, Problems& problems) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    problems.add("bad value for '" + path + "." + key + "'");
    return fallback;
  }
}

transforms::TransformSpec parse_transform_ops(const json& j, const std::string& path,
                                              Problems& problems) {
  transforms::TransformSpec spec;
  spec.branches.clear();
  if (!j.is_array()) {
    problems.add(path + " must be an array of op objects");
    return spec;
  }
  int i = 0;
  for (const auto& oj : j) {
    const std::string opath = path + "[" + std::to_string(i++) + "]";
    check_keys(oj, opath, {"name", "probability", "std", "amplitude", "length", "mode"},
               problems);
    transforms::OpSpec op;
    const std::string name = get_or<std::string>(oj, "name", "", opath, problems);
    if (name.empty()) {
      problems.add(opath + " needs a 'name'");
      continue;
    }
    try {
      op.kind = transforms::op_kind_from_string(name);
    } catch (const Error& e) {
      problems.add(opath + ": " + e.what());
      continue;
    }
    op.probability = get_or<double>(oj, "probability", 1.0, opath, problems);
    switch (op.kind) {
      case transforms::OpKind::point_noise:
      case transforms::OpKind::joint_noise:
        op.value = get_or<double>(oj, "std", 0.01, opath, problems);
        break;
      case transforms::OpKind::random_move:
        op.value = get_or<double>(oj, "amplitude", 0.1, opath, problems);
        break;
      case transforms::OpKind::random_select: {
        op.value = get_or<double>(oj, "length", 30.0, opath, problems);
        const std::string mode = get_or<std::string>(oj, "mode", "window", opath, problems);
        if (mode == "subset")
          op.select_mode = transforms::SelectMode::subset;
        else if (mode != "window")
          problems.add(opath + ".mode must be 'window' or 'subset'");
        break;
      }
      default:
        if (!oj.contains("probability")) op.probability = 0.5;
        break;
    }
    spec.ops.push_back(op);
  }
  return spec;
}

std::vector<transforms::Branch> parse_branches(const json& j, const std::string& path,
                                               Problems& problems) {
  std::vector<transforms::Branch> out;
  if (!j.is_array()) {
    problems.add(path + " must be an array of branch names");
    return {transforms::Branch::joint};
  }
  for (const auto& bj : j) {
    try {
      out.push_back(transforms::branch_from_string(bj.get<std::string>()));
    } catch (const std::exception& e) {
      problems.add(path + ": " + e.what());
    }
  }
  if (out.empty()) {
    problems.add(path + " must list at least one branch");
    out.push_back(transforms::Branch::joint);
  }
  return transforms::normalize_branches(out);
}

std::vector<model::BlockConfig> parse_blocks(const json& j, const std::string& path,
                                             Problems& problems) {
  std::vector<model::BlockConfig> blocks;
  int bi = 0;
  for (const auto& bj : j) {
    const std::string bpath = path + "[" + std::to_string(bi++) + "]";
    check_keys(bj, bpath, {"residual", "projection", "units"}, problems);
    model::BlockConfig block;
    block.residual = get_or<bool>(bj, "residual", false, bpath, problems);
    block.projection = get_or<bool>(bj, "projection", false, bpath, problems);
    if (!bj.contains("units") || !bj.at("units").is_array()) {
      problems.add(bpath + " needs a 'units' array");
      continue;
    }
    int ui = 0;
    for (const auto& uj : bj.at("units")) {
      const std::string upath = bpath + ".units[" + std::to_string(ui++) + "]";
      check_keys(uj, upath,
                 {"kind", "in_channels", "out_channels", "kernel_size", "heads",
                  "activation", "edge_mask"},
                 problems);
      model::UnitConfig unit;
      try {
        unit.kind = model::unit_kind_from_string(
            get_or<std::string>(uj, "kind", "graph_conv", upath, problems));
        unit.activation = model::activation_from_string(
            get_or<std::string>(uj, "activation", "relu", upath, problems));
      } catch (const Error& e) {
        problems.add(upath + ": " + e.what());
      }
      unit.in_channels = get_or<int>(uj, "in_channels", 0, upath, problems);
      unit.out_channels = get_or<int>(uj, "out_channels", 0, upath, problems);
      unit.kernel_size = get_or<int>(uj, "kernel_size", 5, upath, problems);
      unit.heads = get_or<int>(uj, "heads", 1, upath, problems);
      unit.learnable_edge_mask = get_or<bool>(uj, "edge_mask", false, upath, problems);
      block.units.push_back(unit);
    }
    blocks.push_back(block);
  }
  return blocks;
}

std::string resolve_preset(const std::string& name,
                           const std::vector<std::string>& search_dirs) {
  if (name.find('/') != std::string::npos || name.ends_with(".json")) {
    if (fs::exists(name)) return name;
  }
  for (const auto& dir : search_dirs) {
    const fs::path candidate = fs::path(dir) / (name + ".json");
    if (fs::exists(candidate)) return candidate.string();
  }
  throw Error(errc::config, "transform preset '" + name + "' not found");
}

}  // namespace

transforms::TransformSpec load_transform_preset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open transform preset '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "transform preset '" + path + "': " + e.what());
  }
  Problems problems;
  check_keys(j, "preset", {"description", "ops", "branches"}, problems);
  transforms::TransformSpec spec;
  if (j.contains("ops")) spec = parse_transform_ops(j.at("ops"), "preset.ops", problems);
  if (j.contains("branches"))
    spec.branches = parse_branches(j.at("branches"), "preset.branches", problems);
  else
    spec.branches = {transforms::Branch::joint};
  problems.raise_if_any();
  spec.validate();
  return spec;
}

RunConfig parse_run_config(const std::string& json_text,
                           const std::vector<std::string>& search_dirs) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(errc::parse, std::string("config is not valid JSON: ") + e.what());
  }
  Problems problems;
  RunConfig cfg;

  check_keys(j, "config",
             {"description", "seed", "dtype", "data", "sampler", "transforms",
              "multi_input", "model", "loss", "optimizer", "schedule", "run"},
             problems);

  cfg.description = get_or<std::string>(j, "description", "", "config", problems);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0, "config", problems);
  cfg.dtype = get_or<std::string>(j, "dtype", "float32", "config", problems);
  if (cfg.dtype != "float32" && cfg.dtype != "float64")
    problems.add("config.dtype must be 'float32' or 'float64'");

  if (j.contains("data")) {
    const json& dj = j.at("data");
    check_keys(dj, "data", {"root", "protocol", "protocol_file", "layout", "layout_file"},
               problems);
    cfg.data.root = get_or<std::string>(dj, "root", "", "data", problems);
    cfg.data.protocol = get_or<std::string>(dj, "protocol", "synthetic", "data", problems);
    cfg.data.protocol_file = get_or<std::string>(dj, "protocol_file", "", "data", problems);
    cfg.data.layout = get_or<std::string>(dj, "layout", "coco17", "data", problems);
    cfg.data.layout_file = get_or<std::string>(dj, "layout_file", "", "data", problems);
  }

  if (j.contains("sampler")) {
    const json& sj = j.at("sampler");
    check_keys(sj, "sampler", {"kind", "batch_size", "p", "k"}, problems);
    try {
      cfg.sampler.kind = sampling::sampler_kind_from_string(
          get_or<std::string>(sj, "kind", "random", "sampler", problems));
    } catch (const Error& e) {
      problems.add(std::string("sampler: ") + e.what());
    }
    cfg.sampler.p = get_or<int>(sj, "p", 0, "sampler", problems);
    cfg.sampler.k = get_or<int>(sj, "k", 0, "sampler", problems);
    cfg.sampler.batch_size = get_or<int>(
        sj, "batch_size",
        cfg.sampler.kind == sampling::SamplerKind::triplet ? cfg.sampler.p * cfg.sampler.k
                                                           : 0,
        "sampler", problems);
    if (cfg.sampler.kind == sampling::SamplerKind::triplet)
      cfg.sampler.batch_size = cfg.sampler.p * cfg.sampler.k;
  }
  cfg.sampler.seed = cfg.seed;

  if (j.contains("transforms")) {
    const json& tj = j.at("transforms");
    check_keys(tj, "transforms", {"preset", "ops", "select_length"}, problems);
    const bool has_preset = tj.contains("preset");
    const bool has_ops = tj.contains("ops");
    if (has_preset && has_ops)
      problems.add("transforms: give either 'preset' or 'ops', not both");
    if (has_preset) {
      try {
        const std::string path = resolve_preset(
            get_or<std::string>(tj, "preset", "", "transforms", problems), search_dirs);
        cfg.transform = load_transform_preset(path);
        cfg.transform_preset = tj.at("preset").get<std::string>();
      } catch (const Error& e) {
        problems.add(std::string("transforms.preset: ") + e.what());
      }
    } else if (has_ops) {
      cfg.transform = parse_transform_ops(tj.at("ops"), "transforms.ops", problems);
    }
    if (tj.contains("select_length")) {
      const int len = get_or<int>(tj, "select_length", 0, "transforms", problems);
      bool found = false;
      for (auto& op : cfg.transform.ops)
        if (op.kind == transforms::OpKind::random_select) {
          op.value = len;
          found = true;
        }
      if (!found) {
        transforms::OpSpec op;
        op.kind = transforms::OpKind::random_select;
        op.value = len;
        cfg.transform.ops.push_back(op);
      }
    }
  }

  if (j.contains("multi_input"))
    cfg.transform.branches = parse_branches(j.at("multi_input"), "multi_input", problems);
  else if (cfg.transform.branches.empty())
    cfg.transform.branches = {transforms::Branch::joint};

  if (j.contains("model")) {
    const json& mj = j.at("model");
    check_keys(mj, "model",
               {"family", "num_layers", "base_channels", "heads", "temporal_kernel",
                "embedding_dim", "edge_mask", "blocks"},
               problems);
    try {
      cfg.model.family = model::family_from_string(
          get_or<std::string>(mj, "family", "gait_tr_like", "model", problems));
    } catch (const Error& e) {
      problems.add(std::string("model: ") + e.what());
    }
    cfg.model.num_layers = get_or<int>(mj, "num_layers", 4, "model", problems);
    cfg.model.base_channels = get_or<int>(mj, "base_channels", 32, "model", problems);
    cfg.model.heads = get_or<int>(mj, "heads", 2, "model", problems);
    cfg.model.temporal_kernel = get_or<int>(mj, "temporal_kernel", 5, "model", problems);
    cfg.model.embedding_dim = get_or<int>(mj, "embedding_dim", 64, "model", problems);
    cfg.model.edge_mask = get_or<bool>(mj, "edge_mask", false, "model", problems);
    if (mj.contains("blocks") && mj.at("blocks").is_array())
      cfg.model.explicit_blocks = parse_blocks(mj.at("blocks"), "model.blocks", problems);
  }

  if (j.contains("loss")) {
    const json& lj = j.at("loss");
    check_keys(lj, "loss", {"kind", "variant", "margin", "temperature", "views", "normalize"},
               problems);
    const std::string kind = get_or<std::string>(lj, "kind", "triplet", "loss", problems);
    if (kind == "triplet") {
      cfg.loss.kind = LossKind::triplet;
      try {
        cfg.loss.triplet.variant = loss::triplet_variant_from_string(
            get_or<std::string>(lj, "variant", "batch_all", "loss", problems));
      } catch (const Error& e) {
        problems.add(std::string("loss: ") + e.what());
      }
      cfg.loss.triplet.margin = get_or<double>(lj, "margin", 0.2, "loss", problems);
    } else if (kind == "supcon") {
      cfg.loss.kind = LossKind::supcon;
      cfg.loss.supcon.temperature =
          get_or<double>(lj, "temperature", 0.07, "loss", problems);
      try {
        cfg.loss.supcon.views = loss::supcon_views_from_string(
            get_or<std::string>(lj, "views", "one", "loss", problems));
      } catch (const Error& e) {
        problems.add(std::string("loss: ") + e.what());
      }
      cfg.loss.supcon.normalize = get_or<bool>(lj, "normalize", true, "loss", problems);
    } else {
      problems.add("loss.kind must be 'triplet' or 'supcon'");
    }
  }

  if (j.contains("optimizer")) {
    const json& oj = j.at("optimizer");
    check_keys(oj, "optimizer", {"kind", "weight_decay", "beta1", "beta2", "eps"},
               problems);
    try {
      cfg.optimizer.kind = optimizer_kind_from_string(
          get_or<std::string>(oj, "kind", "adam", "optimizer", problems));
    } catch (const Error& e) {
      problems.add(std::string("optimizer: ") + e.what());
    }
    cfg.optimizer.weight_decay = get_or<double>(oj, "weight_decay", 0.0, "optimizer", problems);
    cfg.optimizer.beta1 = get_or<double>(oj, "beta1", 0.9, "optimizer", problems);
    cfg.optimizer.beta2 = get_or<double>(oj, "beta2", 0.999, "optimizer", problems);
    cfg.optimizer.eps = get_or<double>(oj, "eps", 1e-8, "optimizer", problems);
  }

  if (j.contains("schedule")) {
    const json& sj = j.at("schedule");
    check_keys(sj, "schedule", {"max_lr", "total_steps", "pct_start", "div", "final_div"},
               problems);
    cfg.schedule.max_lr = get_or<double>(sj, "max_lr", 0.001, "schedule", problems);
    cfg.schedule.total_steps =
        get_or<std::int64_t>(sj, "total_steps", 300, "schedule", problems);
    cfg.schedule.pct_start = get_or<double>(sj, "pct_start", 0.3, "schedule", problems);
    cfg.schedule.div = get_or<double>(sj, "div", 25.0, "schedule", problems);
    cfg.schedule.final_div = get_or<double>(sj, "final_div", 1e4, "schedule", problems);
  }
  if (!(cfg.schedule.max_lr > 0.0)) problems.add("schedule.max_lr must be > 0");
  if (cfg.schedule.total_steps < 1) problems.add("schedule.total_steps must be >= 1");

  if (j.contains("run")) {
    const json& rj = j.at("run");
    check_keys(rj, "run", {"out_dir", "checkpoint_every", "log_every", "steps_per_epoch"},
               problems);
    cfg.run.out_dir = get_or<std::string>(rj, "out_dir", "runs/default", "run", problems);
    cfg.run.checkpoint_every =
        get_or<std::int64_t>(rj, "checkpoint_every", 0, "run", problems);
    cfg.run.log_every = get_or<std::int64_t>(rj, "log_every", 1, "run", problems);
    cfg.run.steps_per_epoch =
        get_or<std::int64_t>(rj, "steps_per_epoch", 0, "run", problems);
  }

  // Environment overrides, paths only.
  if (const char* root = std::getenv("POSEGAIT_DATA_ROOT"); root && *root)
    cfg.data.root = root;
  if (const char* out = std::getenv("POSEGAIT_OUT_DIR"); out && *out)
    cfg.run.out_dir = out;

  try {
    sampling::validate_spec(cfg.sampler);
  } catch (const Error& e) {
    problems.add(std::string("sampler: ") + e.what());
  }
  try {
    cfg.transform.validate();
  } catch (const Error& e) {
    problems.add(std::string("transforms: ") + e.what());
  }
  try {
    cfg.loss.kind == LossKind::triplet ? cfg.loss.triplet.validate()
                                       : cfg.loss.supcon.validate();
  } catch (const Error& e) {
    problems.add(std::string("loss: ") + e.what());
  }
  try {
    model::validate_backbone_config(cfg.backbone_config());
  } catch (const Error& e) {
    problems.add(std::string("model: ") + e.what());
  }

  problems.raise_if_any();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const fs::path dir = fs::path(path).parent_path();
  std::vector<std::string> search_dirs = {
      (dir / "transforms").string(), (dir.parent_path() / "transforms").string(),
      (dir / "..").string(), "configs/transforms"};
  if (const char* cdir = std::getenv("POSEGAIT_CONFIG_DIR"); cdir && *cdir)
    search_dirs.insert(search_dirs.begin(), (fs::path(cdir) / "transforms").string());
  return parse_run_config(buffer.str(), search_dirs);
}

model::BackboneConfig RunConfig::backbone_config() const {
  const int in_channels = 2 * static_cast<int>(transform.branches.size());
  if (model.explicit_blocks.has_value()) {
    model::BackboneConfig bc;
    bc.family = model.family;
    bc.blocks = *model.explicit_blocks;
    bc.num_layers = model.num_layers;
    bc.input_branches = transform.branches;
    bc.embedding_dim = model.embedding_dim;
    return bc;
  }
  model::BackboneConfig bc =
      model.family == model::BackboneFamily::gait_tr_like
          ? model::make_gait_tr_config(model.num_layers, in_channels,
                                       model.base_channels, model.heads,
                                       model.temporal_kernel, model.embedding_dim)
          : model::make_resgcn_config(model.num_layers, transform.branches,
                                      model.base_channels, model.temporal_kernel,
                                      model.embedding_dim);
  bc.input_branches = transform.branches;
  if (model.edge_mask)
    for (auto& block : bc.blocks)
      for (auto& unit : block.units)
        if (unit.kind == model::UnitKind::graph_conv) unit.learnable_edge_mask = true;
  return bc;
}

std::string dump_run_config(const RunConfig& cfg) {
  json j;
  if (!cfg.description.empty()) j["description"] = cfg.description;
  j["seed"] = cfg.seed;
  j["dtype"] = cfg.dtype;
  j["data"] = {{"root", cfg.data.root},
               {"protocol", cfg.data.protocol},
               {"layout", cfg.data.layout}};
  if (!cfg.data.protocol_file.empty()) j["data"]["protocol_file"] = cfg.data.protocol_file;
  if (!cfg.data.layout_file.empty()) j["data"]["layout_file"] = cfg.data.layout_file;

  j["sampler"] = {{"kind", sampling::to_string(cfg.sampler.kind)},
                  {"batch_size", cfg.sampler.batch_size}};
  if (cfg.sampler.kind != sampling::SamplerKind::random) {
    j["sampler"]["p"] = cfg.sampler.p;
    if (cfg.sampler.kind == sampling::SamplerKind::triplet)
      j["sampler"]["k"] = cfg.sampler.k;
  }

  json ops = json::array();
  for (const auto& op : cfg.transform.ops) {
    json oj;
    oj["name"] = transforms::to_string(op.kind);
    switch (op.kind) {
      case transforms::OpKind::point_noise:
      case transforms::OpKind::joint_noise:
        oj["std"] = op.value;
        break;
      case transforms::OpKind::random_move:
        oj["amplitude"] = op.value;
        break;
      case transforms::OpKind::random_select:
        oj["length"] = static_cast<int>(op.value);
        if (op.select_mode == transforms::SelectMode::subset) oj["mode"] = "subset";
        break;
      default:
        oj["probability"] = op.probability;
        break;
    }
    ops.push_back(oj);
  }
  j["transforms"] = {{"ops", ops}};

  json branches = json::array();
  for (const auto& b : cfg.transform.branches) branches.push_back(transforms::to_string(b));
  j["multi_input"] = branches;

  j["model"] = {{"family", model::to_string(cfg.model.family)},
                {"num_layers", cfg.model.num_layers},
                {"base_channels", cfg.model.base_channels},
                {"heads", cfg.model.heads},
                {"temporal_kernel", cfg.model.temporal_kernel},
                {"embedding_dim", cfg.model.embedding_dim},
                {"edge_mask", cfg.model.edge_mask}};
  if (cfg.model.explicit_blocks.has_value()) {
    json blocks = json::array();
    for (const auto& block : *cfg.model.explicit_blocks) {
      json bj;
      bj["residual"] = block.residual;
      bj["projection"] = block.projection;
      json units = json::array();
      for (const auto& u : block.units) {
        json uj = {{"kind", model::to_string(u.kind)},
                   {"in_channels", u.in_channels},
                   {"out_channels", u.out_channels},
                   {"activation", model::to_string(u.activation)}};
        if (u.kind == model::UnitKind::temporal_conv) uj["kernel_size"] = u.kernel_size;
        if (u.kind == model::UnitKind::spatial_transformer) uj["heads"] = u.heads;
        if (u.learnable_edge_mask) uj["edge_mask"] = true;
        units.push_back(uj);
      }
      bj["units"] = units;
      blocks.push_back(bj);
    }
    j["model"]["blocks"] = blocks;
  }

  if (cfg.loss.kind == LossKind::triplet)
    j["loss"] = {{"kind", "triplet"},
                 {"variant", loss::to_string(cfg.loss.triplet.variant)},
                 {"margin", cfg.loss.triplet.margin}};
  else
    j["loss"] = {{"kind", "supcon"},
                 {"temperature", cfg.loss.supcon.temperature},
                 {"views", loss::to_string(cfg.loss.supcon.views)},
                 {"normalize", cfg.loss.supcon.normalize}};

  j["optimizer"] = {{"kind", to_string(cfg.optimizer.kind)},
                    {"weight_decay", cfg.optimizer.weight_decay},
                    {"beta1", cfg.optimizer.beta1},
                    {"beta2", cfg.optimizer.beta2},
                    {"eps", cfg.optimizer.eps}};
  j["schedule"] = {{"max_lr", cfg.schedule.max_lr},
                   {"total_steps", cfg.schedule.total_steps},
                   {"pct_start", cfg.schedule.pct_start},
                   {"div", cfg.schedule.div},
                   {"final_div", cfg.schedule.final_div}};
  j["run"] = {{"out_dir", cfg.run.out_dir},
              {"checkpoint_every", cfg.run.checkpoint_every},
              {"log_every", cfg.run.log_every},
              {"steps_per_epoch", cfg.run.steps_per_epoch}};
  return j.dump(2) + "\n";
}

}  // namespace posegait::engine
