#include "glocal/report.hpp"

#include <cmath>
#include <ostream>

#include "glocal/error.hpp"
#include "json.hpp"

namespace glocal {

void Table::add(double index, double value, double target) {
  const double rel = target != 0 ? (value - target) / std::abs(target) : value - target;
  rows.push_back({index, value, target, rel});
}

double CheckResult::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw OutOfRange(name + ": no metric " + key);
}

bool CheckResult::criterion(const std::string& key) const {
  for (const auto& [k, v] : criteria)
    if (k == key) return v;
  throw OutOfRange(name + ": no criterion " + key);
}

const Table& CheckResult::table(const std::string& table_name) const {
  for (const auto& t : tables)
    if (t.name == table_name) return t;
  throw OutOfRange(name + ": no table " + table_name);
}

bool CheckResult::passed() const {
  for (const auto& c : criteria)
    if (!c.second) return false;
  return true;
}

bool VerificationReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed()) return false;
  return true;
}

std::string to_json(const VerificationReport& report, int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : report.meta) meta[k] = v;
  j["meta"] = meta;
  j["passed"] = report.passed();
  ordered_json checks = ordered_json::object();
  for (const auto& c : report.checks) {
    ordered_json cj;
    cj["passed"] = c.passed();
    ordered_json crit = ordered_json::object();
    for (const auto& [k, v] : c.criteria) crit[k] = v;
    cj["criteria"] = crit;
    ordered_json met = ordered_json::object();
    for (const auto& [k, v] : c.metrics) met[k] = v;
    cj["metrics"] = met;
    ordered_json tabs = ordered_json::object();
    for (const auto& t : c.tables) {
      ordered_json rows = ordered_json::array();
      for (const auto& r : t.rows) rows.push_back({r.index, r.value, r.target, r.rel_error});
      tabs[t.name] = {{"columns", {"index", "value", "target", "rel_error"}}, {"rows", rows}};
    }
    cj["tables"] = tabs;
    cj["notes"] = c.notes;
    checks[c.name] = cj;
  }
  j["checks"] = checks;
  return j.dump(indent);
}

void write_table_csv(std::ostream& os, const Table& table) {
  os.precision(17);
  os << "index,value,target,rel_error\n";
  for (const auto& r : table.rows) os << r.index << ',' << r.value << ',' << r.target << ',' << r.rel_error << "\n";
}

}  // namespace glocal
