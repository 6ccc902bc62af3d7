#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace posegait::eval {

/// One result row: a method/estimator/version cell grid (per view, per
/// condition, or per rank) with an optional stated mean. `paper_reported`
/// carries the numbers the original method papers printed, as annotation;
/// those are not covered by the consistency check (several are internally
/// inconsistent in their sources).
struct RegistryRow {
  std::string method;
  std::string pose_estimator;
  std::string version;  // "vanilla" | "improved"
  std::vector<std::pair<std::string, double>> cells;  // insertion order kept
  std::optional<double> mean;
  std::map<std::string, double> paper_reported;
};

struct RegistryTable {
  std::string dataset;
  std::string metric;
  std::vector<RegistryRow> rows;
};

struct BenchmarkRegistry {
  std::vector<RegistryTable> tables;

  const RegistryRow& lookup(const std::string& dataset, const std::string& method,
                            const std::string& pose_estimator,
                            const std::string& version) const;
};

/// Parses one table file (JSON). Malformed content raises Error("parse").
RegistryTable load_registry_file(const std::string& path);

/// Loads every "*.json" under the directory, sorted by filename.
BenchmarkRegistry load_registry_dir(const std::string& dir);

struct RegistryCheckItem {
  std::string table;
  std::string row;  // "method/estimator/version"
  double stated = 0.0;
  double computed = 0.0;
  double deviation = 0.0;
  bool pass = false;
};

struct RegistryCheckReport {
  double tolerance = 0.0;
  std::vector<RegistryCheckItem> items;
  bool all_pass = true;

  std::string to_text() const;
};

/// Verifies each stated mean against the arithmetic mean of its row's cells.
/// Both the entries and the stated mean are printed rounded to two decimals,
/// so the tightest sound tolerance is 0.01: up to 0.005 of drift from the
/// entries' rounding plus 0.005 from the stated mean's own rounding.
RegistryCheckReport registry_check(const BenchmarkRegistry& registry,
                                   double tolerance = 0.01);

}  // namespace posegait::eval
