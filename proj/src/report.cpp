#include "hamrep/report.hpp"

#include <fstream>

#include "hamrep/util.hpp"

namespace hamrep {

nlohmann::json ReportFragment::to_json() const {
  nlohmann::json j;
  j["module"] = module;
  j["pass"] = pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["value"] = format_double(c.value);
    jc["bound"] = format_double(c.bound);
    jc["pass"] = c.pass;
    arr.push_back(jc);
  }
  j["checks"] = arr;
  return j;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["pipeline"] = pipeline;
  j["pass"] = pass();
  nlohmann::json frs = nlohmann::json::array();
  for (const auto& f : fragments) frs.push_back(f.to_json());
  j["fragments"] = frs;
  nlohmann::json cs = nlohmann::json::object();
  for (const auto& [k, v] : constants) cs[k] = format_double(v);
  j["constants"] = cs;
  return j;
}

void Report::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace hamrep
