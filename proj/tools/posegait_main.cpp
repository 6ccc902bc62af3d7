// posegait command-line interface: dataset preparation, training, and
// evaluation. Exit codes: 0 ok, 1 runtime failure, 2 usage/config error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "posegait/engine/config.hpp"
#include "posegait/engine/trainer.hpp"
#include "posegait/error.hpp"
#include "posegait/eval/embedding_io.hpp"
#include "posegait/eval/rank.hpp"
#include "posegait/eval/registry.hpp"
#include "posegait/ingest/index.hpp"
#include "posegait/ingest/psg.hpp"
#include "posegait/ingest/synthetic.hpp"

namespace fs = std::filesystem;
using namespace posegait;

namespace {

constexpr const char* kConfigKeyHelp = R"(Config keys (JSON; unknown keys are rejected):
  description                     free-form run note
  seed                            master RNG seed (all randomness derives from it)
  dtype                           "float32" (training default) or "float64"
  data.root                       dataset root (tree of subject/condition/view/*.psg1)
  data.protocol                   built-in protocol id: "synthetic" | "casia_b"
  data.protocol_file              JSON protocol spec (overrides data.protocol)
  data.layout                     keypoint layout id: "coco17" | "pose18" | registered
  data.layout_file                JSON layout to register before loading
  sampler.kind                    "random" | "triplet" | "random_triplet"
  sampler.batch_size              sequences per batch (random / random_triplet)
  sampler.p, sampler.k            subjects per batch / sequences per subject
  transforms.preset               named preset file (configs/transforms/<name>.json)
  transforms.ops[]                inline pipeline; each {name, probability|std|amplitude|length|mode}
  transforms.select_length        overrides the random_select length
  multi_input                     subset of ["joint","bone","angle","velocity"]
  model.family                    "gait_tr_like" | "resgcn_like"
  model.num_layers                total unit count of the block stack
  model.base_channels             width of generated blocks
  model.heads                     attention heads (gait_tr_like)
  model.temporal_kernel           odd temporal kernel size
  model.embedding_dim             output feature dimension
  model.edge_mask                 learnable additive adjacency mask (graph_conv)
  model.blocks[]                  explicit block list (overrides the generator)
  loss.kind                       "triplet" | "supcon"
  loss.variant                    "batch_all" | "batch_hard" (triplet)
  loss.margin                     triplet margin m >= 0
  loss.temperature                supcon temperature > 0
  loss.views                      "one" | "two" (two-view doubles the batch)
  loss.normalize                  L2-normalize embeddings before supcon
  optimizer.kind                  "adam" | "adamw"
  optimizer.weight_decay          decoupled decay (adamw) / L2 (adam)
  optimizer.beta1/beta2/eps       Adam moments and epsilon
  schedule.max_lr                 one-cycle peak learning rate
  schedule.total_steps            training steps
  schedule.pct_start/div/final_div  one-cycle shape parameters
  run.out_dir                     logs, effective config and checkpoints go here
  run.checkpoint_every            periodic checkpoint interval (0 = final only)
  run.log_every                   CSV logging interval
  run.steps_per_epoch             progress print interval (0 = off)
Environment overrides (paths only): POSEGAIT_DATA_ROOT, POSEGAIT_OUT_DIR,
POSEGAIT_CONFIG_DIR.)";

eval::ProtocolSpec resolve_protocol(const std::string& name, const std::string& file) {
  if (!file.empty()) return eval::load_protocol_file(file);
  return eval::builtin_protocol(name);
}

ingest::DatasetIndex open_index(const std::string& root,
                                const eval::ProtocolSpec& protocol) {
  const fs::path index_file = fs::path(root) / "index.psgidx";
  if (fs::exists(index_file))
    return ingest::read_index(index_file.string(), protocol);
  return ingest::build_index(root, protocol);
}

SkeletonSequence read_csv_sequence(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.back().size() != row.size())
      throw Error(errc::parse, "ragged csv rows in '" + path.string() + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(errc::parse, "empty csv '" + path.string() + "'");
  const std::size_t width = rows[0].size();
  int channels = 0;
  if (width % 2 == 0) channels = 2;
  if (width % 3 == 0 && channels == 0) channels = 3;
  if (channels == 0)
    throw Error(errc::parse, "csv width " + std::to_string(width) +
                                 " is not 2*V or 3*V in '" + path.string() + "'");
  SkeletonSequence seq = SkeletonSequence::zeros(
      static_cast<int>(rows.size()), static_cast<int>(width) / channels, channels);
  for (int t = 0; t < seq.t; ++t)
    for (int v = 0; v < seq.v; ++v)
      for (int c = 0; c < seq.c; ++c)
        seq.at(t, v, c) = rows[static_cast<std::size_t>(t)]
                              [static_cast<std::size_t>(v) * channels + c];
  return seq;
}

int cmd_prepare(const std::string& out_dir, bool synthetic,
                const std::vector<int>& synth_svt, std::uint64_t seed, int conditions,
                const std::string& layout, const std::string& from_csv,
                const std::string& reorder_file) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw Error(errc::config, "cannot create output directory '" + out_dir +
                                  "': " + ec.message());
  if (synthetic) {
    ingest::SyntheticSpec spec;
    spec.subjects = synth_svt[0];
    spec.views = synth_svt[1];
    spec.frames = synth_svt[2];
    spec.conditions = conditions;
    spec.layout_id = layout;
    spec.seed = seed;
    ingest::generate_dataset(spec, out_dir);
    std::cout << "wrote synthetic dataset: " << spec.subjects << " subjects x "
              << spec.conditions << " conditions x " << spec.views << " views, "
              << spec.frames << " frames @ " << out_dir << "\n";
    return 0;
  }
  if (from_csv.empty())
    throw Error(errc::config, "prepare needs --synthetic or --from-csv");

  std::vector<int> mapping;
  if (!reorder_file.empty()) {
    std::ifstream in(reorder_file);
    if (!in) throw Error(errc::io, "cannot open '" + reorder_file + "'");
    std::string cell;
    while (std::getline(in, cell, ',')) mapping.push_back(std::stoi(cell));
  }

  int written = 0;
  for (const auto& entry : fs::recursive_directory_iterator(from_csv)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(entry.path(), from_csv);
    std::vector<std::string> parts;
    for (const auto& p : rel) parts.push_back(p.string());
    if (parts.size() != 3)
      throw Error(errc::config, "expected subject/condition/<view>.csv, got '" +
                                    rel.string() + "'");
    SkeletonSequence seq = read_csv_sequence(entry.path());
    if (!mapping.empty()) seq = ingest::reorder_keypoints(seq, mapping);
    const fs::path dir =
        fs::path(out_dir) / parts[0] / parts[1] / entry.path().stem().string();
    fs::create_directories(dir);
    ingest::write_sequence(seq, (dir / "seq.psg1").string());
    ++written;
  }
  if (written == 0)
    throw Error(errc::no_sequences, "no csv sequences under '" + from_csv + "'");
  ingest::DatasetIndex index =
      ingest::build_index(out_dir, eval::builtin_protocol("synthetic"));
  index.layout_id = layout;
  ingest::write_index(index, (fs::path(out_dir) / "index.psgidx").string());
  std::cout << "converted " << written << " sequences into " << out_dir << "\n";
  return 0;
}

template <class T>
int run_train(const engine::RunConfig& cfg, const ingest::DatasetIndex& index,
              const SkeletonGraph& graph, const std::string& resume) {
  engine::Trainer<T> trainer(cfg, index, graph);
  if (!resume.empty()) {
    trainer.load(resume);
    std::cout << "resumed from step " << trainer.step() << "\n";
  }
  const double mean_loss = trainer.fit();
  std::cout << "trained " << cfg.schedule.total_steps << " steps; mean loss "
            << mean_loss << "; final checkpoint " << cfg.run.out_dir
            << "/final.ckpt\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& resume) {
  engine::RunConfig cfg = engine::load_run_config(config_path);
  if (!cfg.data.layout_file.empty()) load_layout_file(cfg.data.layout_file);
  const SkeletonGraph graph = build_graph(cfg.data.layout);
  const eval::ProtocolSpec protocol =
      resolve_protocol(cfg.data.protocol, cfg.data.protocol_file);
  const ingest::DatasetIndex index = open_index(cfg.data.root, protocol);
  return cfg.dtype == "float64"
             ? run_train<double>(cfg, index, graph, resume)
             : run_train<float>(cfg, index, graph, resume);
}

template <class T>
int run_eval(const engine::RunConfig& cfg, const std::string& checkpoint,
             const ingest::DatasetIndex& index, const SkeletonGraph& graph,
             const eval::ProtocolSpec& protocol, const std::string& out_dir) {
  model::Backbone<T> net(cfg.backbone_config(), graph, cfg.seed);
  {
    auto params = net.parameters();
    engine::load_checkpoint<T>(checkpoint, params, nullptr, nullptr);
  }
  if (index.layout_id != graph.layout_id)
    throw Error(errc::shape, "checkpoint layout '" + graph.layout_id +
                                 "' does not match dataset layout '" +
                                 index.layout_id + "'");
  ingest::SequenceStore store(index);
  const EmbeddingSet gallery = engine::compute_embeddings<T>(
      net, index, store, ingest::Split::gallery, cfg.transform, graph);
  const EmbeddingSet probe = engine::compute_embeddings<T>(
      net, index, store, ingest::Split::probe, cfg.transform, graph);

  const eval::RankResult result = eval::rank_k(gallery, probe, protocol);
  std::cout << "gallery " << gallery.size() << ", probes " << probe.size();
  if (result.probes_skipped > 0)
    std::cout << " (" << result.probes_skipped << " skipped: empty gallery after view exclusion)";
  std::cout << "\n";
  for (std::size_t i = 0; i < result.ranks.size(); ++i)
    std::printf("rank-%-2d %6.2f%%\n", result.ranks[i], result.accuracy[i]);

  // Per-condition, per-view grid when the protocol defines probe groups
  // with condition metadata (the CASIA-B style report).
  EmbeddingSet merged = gallery;
  merged.vectors = Matrix<double>(gallery.size() + probe.size(), gallery.dim());
  for (int i = 0; i < gallery.size(); ++i)
    for (int j = 0; j < gallery.dim(); ++j)
      merged.vectors.at(i, j) = gallery.vectors.at(i, j);
  for (int i = 0; i < probe.size(); ++i) {
    for (int j = 0; j < probe.dim(); ++j)
      merged.vectors.at(gallery.size() + i, j) = probe.vectors.at(i, j);
    merged.labels.push_back(probe.labels[static_cast<std::size_t>(i)]);
    merged.views.push_back(probe.views[static_cast<std::size_t>(i)]);
    merged.conditions.push_back(probe.conditions[static_cast<std::size_t>(i)]);
  }
  std::string grid_csv;
  try {
    const eval::CasiabReport grid = eval::casiab_report(merged, protocol);
    std::cout << grid.to_text();
    grid_csv = grid.to_csv();
  } catch (const Error& e) {
    std::cout << "(no per-condition grid: " << e.what() << ")\n";
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    eval::write_embeddings(gallery, out_dir + "/gallery.pge1");
    eval::write_embeddings(probe, out_dir + "/probe.pge1");
    std::ofstream csv(out_dir + "/rank_report.csv", std::ios::trunc);
    csv << "rank,accuracy_percent\n";
    for (std::size_t i = 0; i < result.ranks.size(); ++i)
      csv << result.ranks[i] << ',' << result.accuracy[i] << "\n";
    if (!grid_csv.empty()) {
      std::ofstream gcsv(out_dir + "/condition_grid.csv", std::ios::trunc);
      gcsv << grid_csv;
    }
    std::cout << "wrote " << out_dir << "/{gallery,probe}.pge1 and rank_report.csv\n";
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data_root,
             const std::string& protocol_name, const std::string& protocol_file,
             const std::string& out_dir) {
  std::ifstream in(checkpoint, std::ios::binary);
  if (!in) throw Error(errc::io, "cannot open checkpoint '" + checkpoint + "'");
  // The stored effective config carries dtype, layout, branches and model.
  engine::CheckpointState state;
  try {
    state = engine::read_checkpoint_header<float>(in, checkpoint);
  } catch (const Error& e) {
    if (e.code() != errc::version) throw;
    in.seekg(0);
    state = engine::read_checkpoint_header<double>(in, checkpoint);
  }
  in.close();
  engine::RunConfig cfg = engine::parse_run_config(state.config_json, {});
  if (!data_root.empty()) cfg.data.root = data_root;
  if (!cfg.data.layout_file.empty()) load_layout_file(cfg.data.layout_file);
  const SkeletonGraph graph = build_graph(cfg.data.layout);
  const eval::ProtocolSpec protocol = resolve_protocol(
      protocol_name.empty() ? cfg.data.protocol : protocol_name, protocol_file);
  const ingest::DatasetIndex index = open_index(cfg.data.root, protocol);
  return cfg.dtype == "float64"
             ? run_eval<double>(cfg, checkpoint, index, graph, protocol, out_dir)
             : run_eval<float>(cfg, checkpoint, index, graph, protocol, out_dir);
}

int cmd_check_registry(const std::string& dir) {
  const eval::BenchmarkRegistry registry = eval::load_registry_dir(dir);
  const eval::RegistryCheckReport report = eval::registry_check(registry);
  std::cout << report.to_text();
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posegait: pose-based gait recognition toolkit"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Build a PSG1 dataset tree + index");
  std::string out_dir, from_csv, reorder_file, layout = "coco17";
  std::vector<int> synth_svt;
  std::uint64_t seed = 1;
  int conditions = 6;
  prepare->add_option("out_dir", out_dir, "output dataset root")->required();
  auto* synth_opt = prepare->add_option(
      "--synthetic", synth_svt,
      "generate a synthetic dataset: SUBJECTS VIEWS FRAMES")->expected(3);
  prepare->add_option("--conditions", conditions, "sequences per subject/view")
      ->capture_default_str();
  prepare->add_option("--seed", seed, "generator seed")->capture_default_str();
  prepare->add_option("--layout", layout, "keypoint layout id")->capture_default_str();
  prepare->add_option("--from-csv", from_csv,
                      "convert a tree of subject/condition/<view>.csv files");
  prepare->add_option("--reorder", reorder_file,
                      "comma-separated keypoint permutation applied on ingest");

  // train
  auto* train = app.add_subcommand("train", "Train a model from a run config");
  std::string config_path, resume;
  train->add_option("config", config_path, "run config JSON")->required();
  train->add_option("--resume", resume, "checkpoint to continue from");
  train->footer(kConfigKeyHelp);

  // eval
  auto* evalc = app.add_subcommand("eval", "Evaluate a checkpoint or the registry");
  std::string checkpoint, data_root, protocol_name, protocol_file, eval_out;
  std::string registry_dir;
  bool check_registry = false;
  evalc->add_option("--checkpoint", checkpoint, "trained model checkpoint");
  evalc->add_option("--data", data_root, "dataset root (defaults to the checkpoint's)");
  evalc->add_option("--protocol", protocol_name, "built-in protocol id");
  evalc->add_option("--protocol-file", protocol_file, "protocol JSON file");
  evalc->add_option("--out", eval_out, "directory for embeddings + CSV report");
  evalc->add_flag("--check-registry", check_registry,
                  "verify the shipped benchmark tables' mean consistency");
  evalc->add_option("--registry-dir", registry_dir, "registry table directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (prepare->parsed())
      return cmd_prepare(out_dir, synth_opt->count() > 0, synth_svt, seed, conditions,
                         layout, from_csv, reorder_file);
    if (train->parsed()) return cmd_train(config_path, resume);
    if (evalc->parsed()) {
      if (check_registry)
        return cmd_check_registry(registry_dir.empty() ? POSEGAIT_DEFAULT_REGISTRY_DIR
                                                       : registry_dir);
      if (checkpoint.empty())
        throw Error(errc::config, "eval needs --checkpoint or --check-registry");
      return cmd_eval(checkpoint, data_root, protocol_name, protocol_file, eval_out);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return (e.code() == errc::config || e.code() == errc::parse ||
            e.code() == errc::constraint)
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
