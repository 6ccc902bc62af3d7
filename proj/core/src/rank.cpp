#include "posegait/eval/rank.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "posegait/error.hpp"

namespace posegait::eval {

namespace {

double sq_distance(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

EmbeddingSet select(const EmbeddingSet& e, const std::vector<int>& ids) {
  EmbeddingSet out;
  out.vectors = Matrix<double>(static_cast<int>(ids.size()), e.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    for (int j = 0; j < e.dim(); ++j)
      out.vectors.at(static_cast<int>(i), j) = e.vectors.at(id, j);
    out.labels.push_back(e.labels[static_cast<std::size_t>(id)]);
    out.views.push_back(e.views[static_cast<std::size_t>(id)]);
    if (!e.conditions.empty())
      out.conditions.push_back(e.conditions[static_cast<std::size_t>(id)]);
  }
  return out;
}

}  // namespace

double RankResult::at_rank(int k) const {
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (ranks[i] == k) return accuracy[i];
  throw Error(errc::protocol, "rank " + std::to_string(k) + " was not evaluated");
}

RankResult rank_k(const EmbeddingSet& gallery, const EmbeddingSet& probe,
                  const ProtocolSpec& spec) {
  validate_embeddings(gallery);
  validate_embeddings(probe);
  if (gallery.dim() != probe.dim())
    throw Error(errc::shape, "gallery dimension " + std::to_string(gallery.dim()) +
                                 " != probe dimension " + std::to_string(probe.dim()));
  if (spec.exclude_identical_view &&
      (gallery.views.size() != static_cast<std::size_t>(gallery.size()) ||
       probe.views.size() != static_cast<std::size_t>(probe.size())))
    throw Error(errc::protocol, "identical-view exclusion requires view metadata");

  RankResult r;
  r.ranks = spec.ranks;
  r.accuracy.assign(spec.ranks.size(), 0.0);
  std::vector<int> hits(spec.ranks.size(), 0);

  std::vector<std::pair<double, int>> order;  // (squared distance, gallery id)
  for (int p = 0; p < probe.size(); ++p) {
    order.clear();
    for (int g = 0; g < gallery.size(); ++g) {
      if (spec.exclude_identical_view &&
          gallery.views[static_cast<std::size_t>(g)] ==
              probe.views[static_cast<std::size_t>(p)])
        continue;
      order.emplace_back(sq_distance(probe.vec(p), gallery.vec(g), probe.dim()), g);
    }
    if (order.empty()) {
      ++r.probes_skipped;
      continue;
    }
    std::sort(order.begin(), order.end());  // pair ordering breaks ties by index
    ++r.probes_scored;
    int best = -1;  // first position whose gallery entry matches the subject
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      if (gallery.labels[static_cast<std::size_t>(order[pos].second)] ==
          probe.labels[static_cast<std::size_t>(p)]) {
        best = static_cast<int>(pos);
        break;
      }
    if (best >= 0)
      for (std::size_t ki = 0; ki < spec.ranks.size(); ++ki)
        if (best < spec.ranks[ki]) ++hits[ki];
  }
  for (std::size_t ki = 0; ki < spec.ranks.size(); ++ki)
    r.accuracy[ki] = r.probes_scored > 0
                         ? 100.0 * static_cast<double>(hits[ki]) / r.probes_scored
                         : 0.0;
  return r;
}

CasiabReport casiab_report(const EmbeddingSet& emb, const ProtocolSpec& spec) {
  validate_embeddings(emb);
  if (emb.conditions.size() != static_cast<std::size_t>(emb.size()) ||
      emb.views.size() != static_cast<std::size_t>(emb.size()))
    throw Error(errc::protocol, "report requires condition and view metadata");

  std::vector<int> gallery_ids;
  for (int i = 0; i < emb.size(); ++i)
    if (spec.in_gallery(emb.conditions[static_cast<std::size_t>(i)]))
      gallery_ids.push_back(i);
  if (gallery_ids.empty())
    throw Error(errc::protocol, "no gallery entries match the protocol");
  const EmbeddingSet gallery = select(emb, gallery_ids);

  std::set<std::string> view_set;
  for (const auto& v : emb.views) view_set.insert(v);
  CasiabReport report;
  report.views.assign(view_set.begin(), view_set.end());

  ProtocolSpec rank1 = spec;
  rank1.ranks = {1};

  for (const auto& [label, conds] : spec.probe_groups) {
    std::vector<double> row;
    double sum = 0.0;
    for (const auto& view : report.views) {
      std::vector<int> probe_ids;
      for (int i = 0; i < emb.size(); ++i) {
        const auto& cond = emb.conditions[static_cast<std::size_t>(i)];
        if (emb.views[static_cast<std::size_t>(i)] == view &&
            std::find(conds.begin(), conds.end(), cond) != conds.end())
          probe_ids.push_back(i);
      }
      if (probe_ids.empty())
        throw Error(errc::protocol, "missing condition: no probes for group '" +
                                        label + "' at view '" + view + "'");
      const RankResult rr = rank_k(gallery, select(emb, probe_ids), rank1);
      row.push_back(rr.at_rank(1));
      sum += rr.at_rank(1);
    }
    report.grid[label] = row;
    report.condition_means[label] = sum / static_cast<double>(report.views.size());
  }
  double total = 0.0;
  for (const auto& [label, m] : report.condition_means) total += m;
  report.mean = total / static_cast<double>(report.condition_means.size());
  return report;
}

std::string CasiabReport::to_text() const {
  std::ostringstream os;
  os << "cond ";
  for (const auto& v : views) os << "  " << v << " ";
  os << "    mean\n";
  char buf[32];
  for (const auto& [label, row] : grid) {
    os << label << "  ";
    for (double x : row) {
      std::snprintf(buf, sizeof buf, "%7.2f", x);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "  %7.2f", condition_means.at(label));
    os << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.2f", mean);
  os << "Mean " << buf << "\n";
  return os.str();
}

std::string CasiabReport::to_csv() const {
  std::ostringstream os;
  os << "condition";
  for (const auto& v : views) os << ",view_" << v;
  os << ",mean\n";
  for (const auto& [label, row] : grid) {
    os << label;
    for (double x : row) os << ',' << x;
    os << ',' << condition_means.at(label) << "\n";
  }
  os << "Mean";
  for (std::size_t i = 0; i < views.size(); ++i) os << ',';
  os << ',' << mean << "\n";
  return os.str();
}

}  // namespace posegait::eval
