#pragma once

#include <map>
#include <string>
#include <vector>

namespace posegait::eval {

/// Retrieval protocol: how a dataset index is partitioned into train,
/// gallery and probe sets, and how ranking is scored.
///
/// Subject assignment: the first `train_subject_count` subjects (sorted
/// lexicographically) form the train pool and the rest the test pool;
/// a count of -1 puts every subject in both pools (disjointness then comes
/// from the condition predicates, as in the synthetic protocol).
struct ProtocolSpec {
  std::string dataset_id;
  int train_subject_count = -1;
  std::vector<std::string> train_conditions;    // empty = all conditions
  std::vector<std::string> gallery_conditions;  // on the test pool
  /// Probe groups keyed by report label (e.g. "NM" -> {nm-05, nm-06}).
  std::map<std::string, std::vector<std::string>> probe_groups;
  bool exclude_identical_view = true;
  std::vector<int> ranks = {1, 5, 10};

  std::vector<std::string> probe_conditions() const;
  bool in_train(const std::string& condition) const;
  bool in_gallery(const std::string& condition) const;
  bool in_probe(const std::string& condition) const;
};

/// Built-in protocols: "casia_b" (74/50 subject split, NM#1-4 gallery,
/// NM#5-6 / BG#1-2 / CL#1-2 probes) and "synthetic" (all subjects, nm-01..04
/// train, nm-05 gallery, nm-06 probe). Unknown ids raise Error("protocol").
ProtocolSpec builtin_protocol(const std::string& protocol_id);
bool is_builtin_protocol(const std::string& protocol_id);

/// Loads a protocol from a JSON file (same keys as the struct fields).
ProtocolSpec load_protocol_file(const std::string& path);

}  // namespace posegait::eval
