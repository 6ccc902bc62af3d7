#include "posegait/ingest/index.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "posegait/error.hpp"
#include "posegait/ingest/psg.hpp"

namespace fs = std::filesystem;

namespace posegait::ingest {

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::gallery: return "gallery";
    case Split::probe: return "probe";
    default: return "unused";
  }
}

std::vector<int> DatasetIndex::split_ids(Split s) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(entries.size()); ++i)
    if (entries[static_cast<std::size_t>(i)].split == s) out.push_back(i);
  return out;
}

std::map<std::string, int> DatasetIndex::label_codes(Split s) const {
  std::set<std::string> subjects;
  for (const auto& e : entries)
    if (e.split == s) subjects.insert(e.subject_id);
  std::map<std::string, int> codes;
  int next = 0;
  for (const auto& sub : subjects) codes[sub] = next++;
  return codes;
}

std::string DatasetIndex::entry_abspath(int id) const {
  return (fs::path(root) / entries[static_cast<std::size_t>(id)].path).string();
}

void assign_splits(DatasetIndex& index, const eval::ProtocolSpec& protocol) {
  std::set<std::string> subjects;
  for (const auto& e : index.entries) subjects.insert(e.subject_id);
  std::set<std::string> train_pool, test_pool;
  if (protocol.train_subject_count < 0) {
    train_pool = subjects;
    test_pool = subjects;
  } else {
    int i = 0;
    for (const auto& s : subjects) {  // std::set iterates in sorted order
      if (i < protocol.train_subject_count)
        train_pool.insert(s);
      else
        test_pool.insert(s);
      ++i;
    }
  }
  for (auto& e : index.entries) {
    e.split = Split::unused;
    if (test_pool.count(e.subject_id)) {
      if (protocol.in_gallery(e.condition))
        e.split = Split::gallery;
      else if (protocol.in_probe(e.condition))
        e.split = Split::probe;
    }
    // Overlapping pools only occur when the protocol separates train and
    // eval by condition, so train assignment must not steal eval entries.
    if (e.split == Split::unused && train_pool.count(e.subject_id) &&
        protocol.in_train(e.condition))
      e.split = Split::train;
  }
}

DatasetIndex build_index(const std::string& root_dir,
                         const eval::ProtocolSpec& protocol) {
  if (!fs::exists(root_dir) || !fs::is_directory(root_dir))
    throw Error(errc::io, "dataset root '" + root_dir + "' does not exist");

  DatasetIndex index;
  index.root = root_dir;
  for (const auto& entry : fs::recursive_directory_iterator(root_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".psg1") continue;
    const fs::path rel = fs::relative(entry.path(), root_dir);
    // Expect subject/condition/view/<file>.psg1.
    std::vector<std::string> parts;
    for (const auto& p : rel) parts.push_back(p.string());
    if (parts.size() != 4) continue;
    IndexEntry e;
    e.subject_id = parts[0];
    e.condition = parts[1];
    e.view = parts[2];
    e.path = rel.generic_string();
    const SkeletonSequence seq = read_sequence(entry.path().string());
    e.frame_count = seq.t;
    if (index.layout_id.empty()) {
      if (seq.v == 17) index.layout_id = "coco17";
      else if (seq.v == 18) index.layout_id = "pose18";
    }
    index.entries.push_back(std::move(e));
  }
  if (index.entries.empty())
    throw Error(errc::no_sequences, "no sequences found under '" + root_dir + "'");
  std::sort(index.entries.begin(), index.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) {
              return std::tie(a.subject_id, a.condition, a.view, a.path) <
                     std::tie(b.subject_id, b.condition, b.view, b.path);
            });
  assign_splits(index, protocol);
  return index;
}

void write_index(const DatasetIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(errc::io, "cannot open '" + path + "' for writing");
  out << "#PSGIDX1 layout=" << index.layout_id << "\n";
  for (const auto& e : index.entries)
    out << e.subject_id << ',' << e.condition << ',' << e.view << ',' << e.path
        << ',' << e.frame_count << "\n";
  if (!out) throw Error(errc::io, "write failed for '" + path + "'");
}

DatasetIndex read_index(const std::string& path, const eval::ProtocolSpec& protocol) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open index '" + path + "'");
  DatasetIndex index;
  index.root = fs::path(path).parent_path().string();
  std::string line;
  if (!std::getline(in, line) || line.rfind("#PSGIDX1", 0) != 0)
    throw Error(errc::bad_magic, "'" + path + "' is not a PSGIDX1 index");
  const auto eq = line.find("layout=");
  if (eq != std::string::npos) index.layout_id = line.substr(eq + 7);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    IndexEntry e;
    std::string frames;
    if (!std::getline(ls, e.subject_id, ',') || !std::getline(ls, e.condition, ',') ||
        !std::getline(ls, e.view, ',') || !std::getline(ls, e.path, ',') ||
        !std::getline(ls, frames))
      throw Error(errc::parse, "index '" + path + "' line " + std::to_string(lineno) +
                                   ": expected 5 comma-separated fields");
    try {
      e.frame_count = std::stoi(frames);
    } catch (const std::exception&) {
      throw Error(errc::parse, "index '" + path + "' line " + std::to_string(lineno) +
                                   ": bad frame count '" + frames + "'");
    }
    index.entries.push_back(std::move(e));
  }
  if (index.entries.empty())
    throw Error(errc::no_sequences, "index '" + path + "' lists no sequences");
  assign_splits(index, protocol);
  return index;
}

SkeletonSequence reorder_keypoints(const SkeletonSequence& seq,
                                   const std::vector<int>& mapping) {
  const int v = seq.v;
  if (static_cast<int>(mapping.size()) != v)
    throw Error(errc::not_permutation,
                "mapping length " + std::to_string(mapping.size()) +
                    " does not match keypoint count " + std::to_string(v));
  std::vector<bool> seen(static_cast<std::size_t>(v), false);
  for (int m : mapping) {
    if (m < 0 || m >= v || seen[static_cast<std::size_t>(m)])
      throw Error(errc::not_permutation, "mapping is not a permutation of [0, V)");
    seen[static_cast<std::size_t>(m)] = true;
  }
  SkeletonSequence out = seq;
  for (int it = 0; it < seq.t; ++it)
    for (int iv = 0; iv < v; ++iv)
      for (int ic = 0; ic < seq.c; ++ic)
        out.at(it, iv, ic) = seq.at(it, mapping[static_cast<std::size_t>(iv)], ic);
  return out;
}

const SkeletonSequence& SequenceStore::load(int entry_id) {
  auto it = cache_.find(entry_id);
  if (it != cache_.end()) return it->second;
  const IndexEntry& e = index_->entries[static_cast<std::size_t>(entry_id)];
  SkeletonSequence seq = read_sequence(index_->entry_abspath(entry_id));
  seq.subject_id = e.subject_id;
  seq.condition = e.condition;
  seq.view = e.view;
  seq.layout_id = index_->layout_id;
  return cache_.emplace(entry_id, std::move(seq)).first->second;
}

}  // namespace posegait::ingest
