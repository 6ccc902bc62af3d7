#include "posegait/eval/registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "posegait/error.hpp"

namespace fs = std::filesystem;

namespace posegait::eval {

const RegistryRow& BenchmarkRegistry::lookup(const std::string& dataset,
                                             const std::string& method,
                                             const std::string& pose_estimator,
                                             const std::string& version) const {
  for (const auto& table : tables) {
    if (table.dataset != dataset) continue;
    for (const auto& row : table.rows)
      if (row.method == method && row.version == version &&
          (pose_estimator.empty() || row.pose_estimator == pose_estimator))
        return row;
  }
  throw Error(errc::protocol, "registry row not found: " + dataset + "/" + method +
                                  "/" + pose_estimator + "/" + version);
}

RegistryTable load_registry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open registry file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "registry file '" + path + "': " + e.what());
  }
  RegistryTable table;
  try {
    table.dataset = j.at("dataset").get<std::string>();
    table.metric = j.at("metric").get<std::string>();
    for (const auto& rj : j.at("rows")) {
      RegistryRow row;
      row.method = rj.at("method").get<std::string>();
      row.pose_estimator = rj.value("pose_estimator", "");
      row.version = rj.at("version").get<std::string>();
      for (const auto& [key, val] : rj.at("cells").items())
        row.cells.emplace_back(key, val.get<double>());
      if (rj.contains("mean")) row.mean = rj.at("mean").get<double>();
      if (rj.contains("paper_reported"))
        for (const auto& [key, val] : rj.at("paper_reported").items())
          row.paper_reported[key] = val.get<double>();
      if (row.cells.empty())
        throw Error(errc::parse, "registry row with no cells in '" + path + "'");
      table.rows.push_back(std::move(row));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(errc::parse, "registry file '" + path + "': " + e.what());
  }
  return table;
}

BenchmarkRegistry load_registry_dir(const std::string& dir) {
  if (!fs::exists(dir) || !fs::is_directory(dir))
    throw Error(errc::io, "registry directory '" + dir + "' does not exist");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json")
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  BenchmarkRegistry reg;
  for (const auto& f : files) reg.tables.push_back(load_registry_file(f));
  if (reg.tables.empty())
    throw Error(errc::io, "no registry tables under '" + dir + "'");
  return reg;
}

RegistryCheckReport registry_check(const BenchmarkRegistry& registry,
                                   double tolerance) {
  RegistryCheckReport report;
  report.tolerance = tolerance;
  for (const auto& table : registry.tables)
    for (const auto& row : table.rows) {
      if (!row.mean.has_value()) continue;
      double sum = 0.0;
      for (const auto& [key, val] : row.cells) sum += val;
      RegistryCheckItem item;
      item.table = table.dataset;
      item.row = row.method +
                 (row.pose_estimator.empty() ? "" : "/" + row.pose_estimator) + "/" +
                 row.version;
      item.stated = *row.mean;
      item.computed = sum / static_cast<double>(row.cells.size());
      item.deviation = std::abs(item.stated - item.computed);
      item.pass = item.deviation <= tolerance;
      if (!item.pass) report.all_pass = false;
      report.items.push_back(item);
    }
  return report;
}

std::string RegistryCheckReport::to_text() const {
  std::ostringstream os;
  char buf[160];
  for (const auto& it : items) {
    std::snprintf(buf, sizeof buf, "[%s] %-40s stated %7.2f computed %8.4f dev %.4f",
                  it.pass ? "ok" : "FAIL", (it.table + " " + it.row).c_str(),
                  it.stated, it.computed, it.deviation);
    os << buf << "\n";
  }
  os << (all_pass ? "registry check: all means consistent"
                  : "registry check: INCONSISTENT MEANS FOUND")
     << " (tolerance " << tolerance << ")\n";
  return os.str();
}

}  // namespace posegait::eval
