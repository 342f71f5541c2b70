#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace hamrep {

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ReportFragment {
  std::string module;
  std::vector<CheckRecord> checks;

  // value <= bound convention
  void require(const std::string& name, double value, double bound) {
    checks.push_back({name, value, bound, value <= bound});
  }
  void note(const std::string& name, double value) { checks.push_back({name, value, value, true}); }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  nlohmann::json to_json() const;
};

// Full run record: fragments plus named constants, serialized deterministically.
struct Report {
  std::string pipeline;
  std::vector<ReportFragment> fragments;
  std::vector<std::pair<std::string, double>> constants;

  void add_constant(const std::string& k, double v) { constants.emplace_back(k, v); }
  bool pass() const {
    for (const auto& f : fragments)
      if (!f.pass()) return false;
    return true;
  }
  nlohmann::json to_json() const;
  void save(const std::string& path) const;
};

}  // namespace hamrep
