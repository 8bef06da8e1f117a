#include "exhol/report.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace exhol {

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void Report::add(const std::string& name, double value, double tol, const std::string& anchor) {
  Check c;
  c.name = name;
  c.value = value;
  c.tolerance = tol;
  c.pass = std::isfinite(value) && std::fabs(value) <= tol;
  c.anchor = anchor;
  checks.push_back(std::move(c));
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["scene_hash"] = scene_hash;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    jc["anchor"] = c.anchor;
    j["checks"].push_back(jc);
  }
  j["obstructions"] = nlohmann::ordered_json::array();
  for (const auto& o : obstructions) {
    nlohmann::ordered_json jo;
    jo["name"] = o.name;
    jo["index_kinds"] = o.index_kinds;
    jo["dims"] = o.dims;
    jo["values"] = o.values;
    j["obstructions"].push_back(jo);
  }
  j["timing_ms"] = timing_ms;
  return j.dump(2);
}

std::string Report::obstructions_csv() const {
  std::ostringstream os;
  os << "table,indices,value\n";
  for (const auto& o : obstructions) {
    std::vector<int> idx(o.dims.size(), 0);
    for (std::size_t flat = 0; flat < o.values.size(); ++flat) {
      os << o.name << ",\"";
      std::size_t rem = flat;
      for (std::size_t i = o.dims.size(); i-- > 0;) {
        idx[i] = static_cast<int>(rem % static_cast<std::size_t>(o.dims[i]));
        rem /= static_cast<std::size_t>(o.dims[i]);
      }
      for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? " " : "") << idx[i];
      os << "\"," << o.values[flat] << "\n";
    }
  }
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace exhol
