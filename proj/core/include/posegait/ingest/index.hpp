#pragma once

#include <map>
#include <string>
#include <vector>

#include "posegait/eval/protocol.hpp"
#include "posegait/sequence.hpp"

namespace posegait::ingest {

enum class Split { train, gallery, probe, unused };

std::string to_string(Split s);

struct IndexEntry {
  std::string subject_id;
  std::string condition;
  std::string view;
  std::string path;  // relative to the index root
  int frame_count = 0;
  Split split = Split::unused;
};

/// Sorted, deterministic view of an on-disk dataset tree
/// (root/subject/condition/view/seq.psg1) plus the protocol-assigned split.
struct DatasetIndex {
  std::string root;
  std::string layout_id;
  std::vector<IndexEntry> entries;

  std::vector<int> split_ids(Split s) const;
  /// Dense label codes over the subjects present in the given split,
  /// assigned in sorted subject order.
  std::map<std::string, int> label_codes(Split s) const;
  std::string entry_abspath(int id) const;
};

/// Scans root/subject/condition/view/*.psg1, sorts entries
/// lexicographically by (subject, condition, view, path), reads frame
/// counts from headers and assigns splits per protocol. Deterministic
/// given the same tree. Throws Error("no_sequences") on an empty tree
/// and Error("io") on a missing root.
DatasetIndex build_index(const std::string& root_dir,
                         const eval::ProtocolSpec& protocol);

/// Index file: a "#PSGIDX1 layout=<id>" header line followed by
/// line-delimited records "subject,condition,view,path,frames".
void write_index(const DatasetIndex& index, const std::string& path);
DatasetIndex read_index(const std::string& path, const eval::ProtocolSpec& protocol);

/// Reassigns entry splits for a (possibly different) protocol.
void assign_splits(DatasetIndex& index, const eval::ProtocolSpec& protocol);

/// Permutes the keypoint axis: output keypoint v takes input keypoint
/// mapping[v]. Metadata unchanged. Throws Error("not_permutation") when
/// mapping is not a permutation of [0, V).
SkeletonSequence reorder_keypoints(const SkeletonSequence& seq,
                                   const std::vector<int>& mapping);

/// Loads sequences by index entry with an in-memory cache; attaches the
/// entry metadata to the returned sequence. Concurrent readers must use
/// separate stores (the cache is not synchronized).
class SequenceStore {
 public:
  explicit SequenceStore(const DatasetIndex& index) : index_(&index) {}

  const SkeletonSequence& load(int entry_id);
  void clear_cache() { cache_.clear(); }

 private:
  const DatasetIndex* index_;
  std::map<int, SkeletonSequence> cache_;
};

}  // namespace posegait::ingest
