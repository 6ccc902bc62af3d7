#pragma once

#include <map>
#include <string>
#include <vector>

#include "posegait/embedding.hpp"
#include "posegait/eval/protocol.hpp"

namespace posegait::eval {

struct RankResult {
  std::vector<int> ranks;
  std::vector<double> accuracy;  // parallel to ranks, in [0, 100]
  int probes_scored = 0;
  int probes_skipped = 0;  // empty post-exclusion gallery, dropped with a warning

  double at_rank(int k) const;
};

/// Cross-view rank-k retrieval: for each probe, gallery entries are sorted
/// by ascending Euclidean distance (ties broken by gallery index), after
/// removing gallery entries sharing the probe's view when
/// `exclude_identical_view` is set. A probe scores a hit at rank k when any
/// of its k nearest gallery entries shares its subject label. Probes whose
/// post-exclusion gallery is empty are excluded from the denominator and
/// counted in `probes_skipped`.
RankResult rank_k(const EmbeddingSet& gallery, const EmbeddingSet& probe,
                  const ProtocolSpec& spec);

struct CasiabReport {
  std::vector<std::string> views;  // sorted probe views
  /// condition label ("NM"/"BG"/"CL") -> per-view rank-1 accuracy.
  std::map<std::string, std::vector<double>> grid;
  std::map<std::string, double> condition_means;
  double mean = 0.0;  // mean over condition means

  std::string to_text() const;
  std::string to_csv() const;
};

/// Per-condition, per-probe-view rank-1 grid with identical-view exclusion.
/// `emb` must carry gallery and probe entries together with condition and
/// view metadata; the protocol's predicates decide which is which. Missing
/// probe conditions raise Error("protocol").
CasiabReport casiab_report(const EmbeddingSet& emb, const ProtocolSpec& spec);

}  // namespace posegait::eval
