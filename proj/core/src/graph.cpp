#include "posegait/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "posegait/error.hpp"

namespace posegait {

bool SkeletonGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

void validate_graph(const SkeletonGraph& g) {
  std::vector<std::string> problems;
  const int n = g.num_keypoints;
  if (n <= 0) problems.push_back("num_keypoints must be positive");

  for (auto [a, b] : g.edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      problems.push_back("edge (" + std::to_string(a) + "," + std::to_string(b) +
                         ") out of range");
    else if (a == b)
      problems.push_back("self-loop at " + std::to_string(a));
  }

  std::vector<int> pair_of(static_cast<std::size_t>(std::max(n, 0)), -1);
  for (auto [l, r] : g.symmetric_pairs) {
    if (l < 0 || l >= n || r < 0 || r >= n || l == r) {
      problems.push_back("symmetric pair (" + std::to_string(l) + "," +
                         std::to_string(r) + ") invalid");
      continue;
    }
    if (pair_of[static_cast<std::size_t>(l)] != -1 ||
        pair_of[static_cast<std::size_t>(r)] != -1)
      problems.push_back("index appears in more than one symmetric pair");
    pair_of[static_cast<std::size_t>(l)] = r;
    pair_of[static_cast<std::size_t>(r)] = l;
  }

  if (static_cast<int>(g.bone_parent.size()) != n) {
    problems.push_back("bone_parent size != num_keypoints");
  } else if (n > 0) {
    if (g.root < 0 || g.root >= n || g.bone_parent[static_cast<std::size_t>(g.root)] != g.root)
      problems.push_back("root must map to itself in bone_parent");
    // Every node must reach the root without revisiting a node.
    for (int v = 0; v < n; ++v) {
      int cur = v;
      int steps = 0;
      while (cur != g.root && steps <= n) {
        int p = g.bone_parent[static_cast<std::size_t>(cur)];
        if (p < 0 || p >= n) {
          problems.push_back("bone_parent out of range at " + std::to_string(cur));
          break;
        }
        cur = p;
        ++steps;
      }
      if (steps > n) {
        problems.push_back("bone_parent contains a cycle reachable from " +
                           std::to_string(v));
        break;
      }
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid graph '" + g.layout_id + "':";
    for (const auto& p : problems) msg += " " + p + ";";
    throw Error(errc::invalid_graph, msg);
  }
}

namespace {

SkeletonGraph make_coco17() {
  SkeletonGraph g;
  g.layout_id = "coco17";
  g.num_keypoints = 17;
  // 0 nose, 1/2 eyes, 3/4 ears, 5/6 shoulders, 7/8 elbows, 9/10 wrists,
  // 11/12 hips, 13/14 knees, 15/16 ankles (left first in each pair).
  g.edges = {{0, 1},  {0, 2},  {1, 2},  {1, 3},   {2, 4},   {3, 5},  {4, 6},
             {5, 6},  {5, 7},  {6, 8},  {7, 9},   {8, 10},  {5, 11}, {6, 12},
             {11, 12}, {11, 13}, {12, 14}, {13, 15}, {14, 16}};
  g.symmetric_pairs = {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}, {13, 14}, {15, 16}};
  g.bone_parent = {0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 5, 6, 11, 12, 13, 14};
  g.root = 0;
  return g;
}

SkeletonGraph make_pose18() {
  SkeletonGraph g;
  g.layout_id = "pose18";
  g.num_keypoints = 18;
  // 0 nose, 1 neck, 2/5 shoulders, 3/6 elbows, 4/7 wrists, 8/11 hips,
  // 9/12 knees, 10/13 ankles, 14/15 eyes, 16/17 ears (right first).
  g.edges = {{0, 1},  {0, 14}, {0, 15}, {14, 16}, {15, 17}, {1, 2},
             {1, 5},  {2, 3},  {3, 4},  {5, 6},   {6, 7},   {1, 8},
             {1, 11}, {8, 9},  {9, 10}, {11, 12}, {12, 13}};
  g.symmetric_pairs = {{5, 2}, {6, 3}, {7, 4}, {11, 8}, {12, 9}, {13, 10}, {15, 14}, {17, 16}};
  g.bone_parent = {1, 1, 1, 2, 3, 1, 5, 6, 1, 8, 9, 1, 11, 12, 0, 0, 14, 15};
  g.root = 1;
  return g;
}

std::map<std::string, SkeletonGraph>& registry() {
  static std::map<std::string, SkeletonGraph> reg = [] {
    std::map<std::string, SkeletonGraph> m;
    m["coco17"] = make_coco17();
    m["pose18"] = make_pose18();
    return m;
  }();
  return reg;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SkeletonGraph build_graph(const std::string& layout_id) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(layout_id);
  if (it == registry().end())
    throw Error(errc::unknown_layout, "unknown layout '" + layout_id + "'");
  return it->second;
}

bool layout_registered(const std::string& layout_id) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  return registry().count(layout_id) > 0;
}

std::vector<std::string> registered_layouts() {
  std::lock_guard<std::mutex> lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

void register_layout(const SkeletonGraph& g) {
  validate_graph(g);
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[g.layout_id] = g;
}

SkeletonGraph load_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open layout file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "layout file '" + path + "': " + e.what());
  }
  SkeletonGraph g;
  try {
    g.layout_id = j.at("layout_id").get<std::string>();
    g.num_keypoints = j.at("num_keypoints").get<int>();
    for (const auto& e : j.at("edges"))
      g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    for (const auto& p : j.at("symmetric_pairs"))
      g.symmetric_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    g.bone_parent = j.at("bone_parent").get<std::vector<int>>();
    g.root = j.at("root").get<int>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "layout file '" + path + "': " + e.what());
  }
  register_layout(g);
  return g;
}

MatD normalized_adjacency(const SkeletonGraph& g) {
  validate_graph(g);
  const int n = g.num_keypoints;
  MatD a(n, n, 0.0);
  for (auto [u, v] : g.edges) {
    a.at(u, v) = 1.0;
    a.at(v, u) = 1.0;
  }
  for (int i = 0; i < n; ++i) a.at(i, i) = 1.0;  // self-loops

  std::vector<double> dinv_sqrt(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a.at(i, j);
    dinv_sqrt[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(deg);
  }
  MatD out(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.at(i, j) = dinv_sqrt[static_cast<std::size_t>(i)] * a.at(i, j) *
                     dinv_sqrt[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace posegait
