#pragma once

// Config ingestion and output writers for the dirac-green driver.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dirac_green/certify.hpp"
#include "dirac_green/green.hpp"
#include "dirac_green/model.hpp"

namespace cli {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// ---- logging ------------------------------------------------------------

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_threshold();
void log(LogLevel level, const std::string& msg);

// ---- config -------------------------------------------------------------

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Applies "a.b.c=value" onto the config tree; values parse as JSON first,
// falling back to a plain string.
void apply_override(json& cfg, const std::string& assignment);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const json& cfg);

dg::OperatorSpec spec_from_config(const json& cfg);
dg::GreenOptions green_options(const json& section, const json& root);
dg::Window window_from_config(const json& section);

// ---- output -------------------------------------------------------------

std::string fmt17(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash);
  void header(const std::string& columns);
  void field(const std::string& s);
  void field(double v);
  void endrow();
  ~CsvWriter();

 private:
  std::ofstream out_;
  bool first_in_row_ = true;
};

void write_json_file(const std::filesystem::path& path, const json& j);

void emit_plot_script(const std::filesystem::path& dir);

}  // namespace cli
