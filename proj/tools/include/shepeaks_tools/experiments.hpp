#pragma once

// Experiment registry, configuration handling and run orchestration behind
// the `shepeaks` command-line tool.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace shepeaks::experiments {

using json = nlohmann::json;

enum class ParamType { Number, Integer, NumberList, String, Sigma };

struct ParamSpec {
  std::string name;
  ParamType type;
  json default_value;
  std::string help;
};

/// One CSV output. Cells are already formatted.
struct Table {
  std::string name;  // file stem, e.g. "results"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json streams;  // seed streams consumed to produce the rows
};

struct ExperimentResult {
  std::vector<Table> tables;
  json summary;
};

struct RunContext {
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  /// Invariant checks on fully resolved parameters; empty when valid.
  std::function<std::vector<std::string>(const json&)> check;
  std::function<ExperimentResult(const json&, const RunContext&)> run;
};

const std::vector<ExperimentInfo>& registry();

/// Throws ConfigError for an unknown name.
const ExperimentInfo& find_experiment(std::string_view name);

struct RunSettings {
  std::string experiment;
  json parameters = json::object();  // as given; defaults are filled on resolve
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
  std::filesystem::path output_dir = "results";
};

/// Reads a JSON config: {"experiment", "master_seed", "workers",
/// "output_dir", "parameters": {...}}. Every key is optional. Throws IoError
/// if the file cannot be read and ConfigError if it is not valid JSON.
RunSettings load_config(const std::filesystem::path& path);

/// Schema and invariant diagnostics; empty means the settings can run.
std::vector<std::string> diagnose(const RunSettings& settings);

/// Diagnostics for a config file, which must name its experiment.
std::vector<std::string> diagnose_file(const std::filesystem::path& path);

/// Parameters with defaults filled in. Throws ConfigError on diagnostics.
json resolve_parameters(const RunSettings& settings);

/// 16 hex digits of FNV-1a over the canonical JSON of experiment, master
/// seed and resolved parameters. Worker count and output location are
/// excluded, so they never change the hash.
std::string config_hash(const RunSettings& settings);

/// Runs the experiment without writing anything.
ExperimentResult execute(const RunSettings& settings);

struct RunManifest {
  std::string config_hash;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  json document;
};

/// Runs and writes <output_dir>/<experiment>/<hash>/ with one CSV and JSON
/// sidecar per table, then manifest.json (written last, atomically).
RunManifest run(const RunSettings& settings);

/// FNV-1a 64-bit hash of bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Renders a table as CSV text (LF line endings, header first).
std::string to_csv(const Table& table);

/// Human-readable parameter reference for one experiment.
std::string describe(const ExperimentInfo& info);

}  // namespace shepeaks::experiments
