#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "disslab/field.hpp"
#include "disslab/fit.hpp"

namespace disslab {

using Json = nlohmann::ordered_json;

// Shortest text that parses back to the same double (%.17g); inf, -inf and nan spelled out.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Cells are strings or numbers; numbers go through format_number.
  template <typename... Cells>
  void add(const Cells&... cells) {
    rows.push_back({cell(cells)...});
  }
  std::string text() const;

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
};

// All writers go through a temporary file in the target directory and a rename.
void write_text_atomic(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const CsvTable& table);
void write_json(const std::string& path, const Json& value);
void write_dlf_atomic(const std::string& path, const SpaceTimeField& field);

Json fit_json(const ScalingFit& fit);
std::string library_version();
Json dependency_versions();

// Per-command record of inputs, seeds, versions, fitted scalings, checks and artifacts.
// write() produces <dir>/<command>.manifest.json (deterministic) and
// <dir>/<command>.times.json (wall-clock stamps).
class Manifest {
 public:
  explicit Manifest(std::string command);

  Json& inputs() { return data_["inputs"]; }
  void set_seed(std::uint64_t seed);
  void add_fit(const std::string& name, const ScalingFit& fit);
  void add_value(const std::string& name, double value);
  void add_check(const std::string& name, bool passed, const std::string& detail = "");
  void add_artifact(const std::string& file);
  bool checks_passed() const;
  const Json& data() const { return data_; }

  void write(const std::string& dir) const;

 private:
  Json data_;
  std::string started_;
};

std::string utc_timestamp();

}  // namespace disslab
