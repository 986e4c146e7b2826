#pragma once

// Results of the checkers: convergence tables, scalar metrics and pass flags,
// with JSON and CSV output.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace glocal {

struct TableRow {
  double index = 0;
  double value = 0;
  double target = 0;
  double rel_error = 0;
};

struct Table {
  std::string name;
  std::vector<TableRow> rows;
  void add(double index, double value, double target);
};

struct CheckResult {
  std::string name;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, bool>> criteria;
  std::vector<Table> tables;
  std::vector<std::string> notes;

  void metric(const std::string& key, double v) { metrics.emplace_back(key, v); }
  void criterion(const std::string& key, bool ok) { criteria.emplace_back(key, ok); }
  /// Throws OutOfRange for an unknown key.
  double metric(const std::string& key) const;
  bool criterion(const std::string& key) const;
  const Table& table(const std::string& table_name) const;
  bool passed() const;
};

struct VerificationReport {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<CheckResult> checks;
  bool passed() const;
};

std::string to_json(const VerificationReport& report, int indent = 2);
/// RFC 4180 rows: index,value,target,rel_error.
void write_table_csv(std::ostream& os, const Table& table);

}  // namespace glocal
