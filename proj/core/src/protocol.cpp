#include "posegait/eval/protocol.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "posegait/error.hpp"

namespace posegait::eval {

namespace {
bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}
}  // namespace

std::vector<std::string> ProtocolSpec::probe_conditions() const {
  std::vector<std::string> out;
  for (const auto& [label, conds] : probe_groups)
    for (const auto& c : conds)
      if (!contains(out, c)) out.push_back(c);
  return out;
}

bool ProtocolSpec::in_train(const std::string& condition) const {
  return train_conditions.empty() || contains(train_conditions, condition);
}

bool ProtocolSpec::in_gallery(const std::string& condition) const {
  return contains(gallery_conditions, condition);
}

bool ProtocolSpec::in_probe(const std::string& condition) const {
  for (const auto& [label, conds] : probe_groups)
    if (contains(conds, condition)) return true;
  return false;
}

ProtocolSpec builtin_protocol(const std::string& protocol_id) {
  if (protocol_id == "casia_b") {
    ProtocolSpec p;
    p.dataset_id = "casia_b";
    p.train_subject_count = 74;
    p.gallery_conditions = {"nm-01", "nm-02", "nm-03", "nm-04"};
    p.probe_groups = {{"NM", {"nm-05", "nm-06"}},
                      {"BG", {"bg-01", "bg-02"}},
                      {"CL", {"cl-01", "cl-02"}}};
    p.exclude_identical_view = true;
    p.ranks = {1, 5, 10};
    return p;
  }
  if (protocol_id == "synthetic") {
    ProtocolSpec p;
    p.dataset_id = "synthetic";
    p.train_subject_count = -1;  // every subject trains and evaluates
    p.train_conditions = {"nm-01", "nm-02", "nm-03", "nm-04"};
    p.gallery_conditions = {"nm-05"};
    p.probe_groups = {{"NM", {"nm-06"}}};
    p.exclude_identical_view = true;
    p.ranks = {1, 5, 10};
    return p;
  }
  throw Error(errc::protocol, "unknown protocol '" + protocol_id + "'");
}

bool is_builtin_protocol(const std::string& protocol_id) {
  return protocol_id == "casia_b" || protocol_id == "synthetic";
}

ProtocolSpec load_protocol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open protocol file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "protocol file '" + path + "': " + e.what());
  }
  ProtocolSpec p;
  try {
    p.dataset_id = j.at("dataset_id").get<std::string>();
    p.train_subject_count = j.value("train_subject_count", -1);
    p.train_conditions = j.value("train_conditions", std::vector<std::string>{});
    p.gallery_conditions = j.at("gallery_conditions").get<std::vector<std::string>>();
    for (const auto& [label, conds] : j.at("probe_groups").items())
      p.probe_groups[label] = conds.get<std::vector<std::string>>();
    p.exclude_identical_view = j.value("exclude_identical_view", true);
    p.ranks = j.value("ranks", std::vector<int>{1, 5, 10});
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "protocol file '" + path + "': " + e.what());
  }
  if (p.gallery_conditions.empty() || p.probe_groups.empty())
    throw Error(errc::protocol, "protocol must define gallery and probe predicates");
  return p;
}

}  // namespace posegait::eval
