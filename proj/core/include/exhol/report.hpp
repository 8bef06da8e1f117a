#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace exhol {

/// One numeric check: a named residual/value with its tolerance, the
/// identity it exercises, and the pass verdict.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string anchor;  // identity name, e.g. "gauss-equation"
};

/// A named tensor payload, flattened row-major with index metadata.
struct ObstructionTable {
  std::string name;
  std::vector<std::string> index_kinds;  // per index, e.g. "normal"
  std::vector<int> dims;
  std::vector<double> values;  // row-major
};

struct Report {
  std::string command;
  std::string scene_hash;
  std::vector<Check> checks;
  std::vector<ObstructionTable> obstructions;
  double timing_ms = 0.0;

  bool all_pass() const;
  void add(const std::string& name, double value, double tol, const std::string& anchor);

  /// Deterministic JSON serialization (sorted keys, fixed field order).
  std::string to_json() const;
  /// Obstruction tables as CSV (one row per entry).
  std::string obstructions_csv() const;
};

/// FNV-1a hash of a file's bytes, hex-encoded; the scene fingerprint.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace exhol
