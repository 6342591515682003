#include "disslab/artifacts.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <fftw3.h>
#include <zlib.h>

#include "disslab/dlf_io.hpp"

namespace disslab {

namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& path) { return path + ".partial"; }

void commit(const std::string& tmp, const std::string& path) {
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move artifact into place: " + path);
  }
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw Error("cannot create directory " + parent.string());
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::text() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        out += cells[i];
        continue;
      }
      out += '"';
      for (char c : cells[i]) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  ensure_parent(path);
  const std::string tmp = temp_path(path);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw Error("write failed: " + tmp);
  }
  commit(tmp, path);
}

void write_csv(const std::string& path, const CsvTable& table) { write_text_atomic(path, table.text()); }

void write_json(const std::string& path, const Json& value) {
  write_text_atomic(path, value.dump(2) + "\n");
}

void write_dlf_atomic(const std::string& path, const SpaceTimeField& field) {
  ensure_parent(path);
  const std::string tmp = temp_path(path);
  write_dlf(tmp, field);
  commit(tmp, path);
}

Json fit_json(const ScalingFit& fit) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(format_number(v)); };
  return Json{{"exponent", num(fit.exponent)},       {"intercept", num(fit.intercept)},
              {"r2", num(fit.r2)},                   {"stderr", num(fit.stderr_exponent)},
              {"window", {num(fit.window_min), num(fit.window_max)}}, {"npoints", fit.points}};
}

std::string library_version() { return "1.0.0"; }

Json dependency_versions() {
  return Json{{"disslab", library_version()},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                            "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"fftw", std::string(fftw_version)},
              {"zlib", std::string(ZLIB_VERSION)}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Manifest::Manifest(std::string command) : started_(utc_timestamp()) {
  data_["command"] = std::move(command);
  data_["versions"] = dependency_versions();
  data_["inputs"] = Json::object();
  data_["seed"] = nullptr;
  data_["fits"] = Json::object();
  data_["values"] = Json::object();
  data_["checks"] = Json::array();
  data_["artifacts"] = Json::array();
}

void Manifest::set_seed(std::uint64_t seed) { data_["seed"] = seed; }

void Manifest::add_fit(const std::string& name, const ScalingFit& fit) { data_["fits"][name] = fit_json(fit); }

void Manifest::add_value(const std::string& name, double value) {
  data_["values"][name] = std::isfinite(value) ? Json(value) : Json(format_number(value));
}

void Manifest::add_check(const std::string& name, bool passed, const std::string& detail) {
  data_["checks"].push_back(Json{{"name", name}, {"passed", passed}, {"detail", detail}});
}

void Manifest::add_artifact(const std::string& file) { data_["artifacts"].push_back(file); }

bool Manifest::checks_passed() const {
  for (const auto& c : data_["checks"])
    if (!c["passed"].get<bool>()) return false;
  return true;
}

void Manifest::write(const std::string& dir) const {
  const std::string command = data_["command"].get<std::string>();
  write_json((fs::path(dir) / (command + ".manifest.json")).string(), data_);
  write_json((fs::path(dir) / (command + ".times.json")).string(),
             Json{{"command", command}, {"started", started_}, {"finished", utc_timestamp()}});
}

}  // namespace disslab
