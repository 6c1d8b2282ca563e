#include <shepeaks_tools/experiments.hpp>

#include <shepeaks/errors.hpp>
#include <shepeaks/version.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace shepeaks::experiments {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTopLevelKeys{"experiment", "master_seed", "workers", "output_dir",
                                          "parameters"};

bool is_integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d);
}

std::string type_name(ParamType t) {
  switch (t) {
    case ParamType::Number:
      return "a number";
    case ParamType::Integer:
      return "an integer";
    case ParamType::NumberList:
      return "a list of numbers";
    case ParamType::String:
      return "a string";
    case ParamType::Sigma:
      return "a sigma object {kind, a, b}";
  }
  return "a value";
}

bool matches(const ParamSpec& spec, const json& v, std::vector<std::string>& diags) {
  switch (spec.type) {
    case ParamType::Number:
      return v.is_number() && std::isfinite(v.get<double>());
    case ParamType::Integer:
      return is_integral(v);
    case ParamType::NumberList:
      if (!v.is_array()) return false;
      for (const auto& e : v) {
        if (!e.is_number()) return false;
      }
      return true;
    case ParamType::String:
      return v.is_string();
    case ParamType::Sigma: {
      if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string()) return false;
      const std::string kind = v["kind"].get<std::string>();
      if (kind != "constant" && kind != "affine" && kind != "bounded_smooth") {
        diags.push_back("sigma.kind must be constant, affine or bounded_smooth");
      }
      for (const auto& [key, value] : v.items()) {
        if (key == "kind") continue;
        if (key != "a" && key != "b") {
          diags.push_back("sigma has unknown field '" + key + "'");
        } else if (!value.is_number()) {
          diags.push_back("sigma." + key + " must be a number");
        }
      }
      if (kind == "constant" || kind == "bounded_smooth") {
        if (v.contains("b") && v["b"].is_number() && v["b"].get<double>() != 0.0) {
          diags.push_back("sigma.b is only meaningful for kind affine");
        }
      }
      return true;
    }
  }
  return false;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

json canonical_config(const RunSettings& settings, const json& resolved) {
  return json{{"experiment", settings.experiment},
              {"master_seed", settings.master_seed},
              {"parameters", resolved}};
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunSettings load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevelKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunSettings s;
  if (doc.contains("experiment")) {
    if (!doc["experiment"].is_string()) throw ConfigError("experiment must be a string");
    s.experiment = doc["experiment"].get<std::string>();
  }
  if (doc.contains("master_seed")) {
    if (!doc["master_seed"].is_number_unsigned()) {
      throw ConfigError("master_seed must be a non-negative integer");
    }
    s.master_seed = doc["master_seed"].get<std::uint64_t>();
  }
  if (doc.contains("workers")) {
    if (!doc["workers"].is_number_unsigned() || doc["workers"].get<std::uint64_t>() == 0) {
      throw ConfigError("workers must be a positive integer");
    }
    s.workers = static_cast<unsigned>(doc["workers"].get<std::uint64_t>());
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("output_dir must be a string");
    s.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object()) throw ConfigError("parameters must be an object");
    s.parameters = doc["parameters"];
  }
  return s;
}

std::vector<std::string> diagnose(const RunSettings& settings) {
  std::vector<std::string> d;
  const ExperimentInfo* info = nullptr;
  for (const auto& e : registry()) {
    if (e.name == settings.experiment) info = &e;
  }
  if (!info) {
    d.push_back("unknown experiment '" + settings.experiment + "'");
    return d;
  }
  if (settings.workers == 0) d.emplace_back("workers must be at least 1");
  if (!settings.parameters.is_object()) {
    d.emplace_back("parameters must be an object");
    return d;
  }
  for (const auto& [key, value] : settings.parameters.items()) {
    bool known = false;
    for (const auto& p : info->params) known = known || p.name == key;
    if (!known) d.push_back("unknown parameter '" + key + "' for " + info->name);
  }
  for (const auto& p : info->params) {
    if (!settings.parameters.contains(p.name)) continue;
    if (!matches(p, settings.parameters[p.name], d)) {
      d.push_back("parameter '" + p.name + "' must be " + type_name(p.type));
    }
  }
  if (!d.empty()) return d;
  json resolved = json::object();
  for (const auto& p : info->params) {
    resolved[p.name] = settings.parameters.contains(p.name) ? settings.parameters[p.name]
                                                            : p.default_value;
  }
  for (auto& m : info->check(resolved)) d.push_back(std::move(m));
  return d;
}

std::vector<std::string> diagnose_file(const fs::path& path) {
  RunSettings s;
  try {
    s = load_config(path);
  } catch (const ConfigError& e) {
    return {e.what()};
  }
  if (s.experiment.empty()) return {"config does not name an experiment"};
  return diagnose(s);
}

json resolve_parameters(const RunSettings& settings) {
  const auto d = diagnose(settings);
  if (!d.empty()) throw ConfigError("invalid configuration: " + join(d));
  const ExperimentInfo& info = find_experiment(settings.experiment);
  json resolved = json::object();
  for (const auto& p : info.params) {
    resolved[p.name] = settings.parameters.contains(p.name) ? settings.parameters[p.name]
                                                            : p.default_value;
  }
  return resolved;
}

std::string config_hash(const RunSettings& settings) {
  return hex64(fnv1a64(canonical_config(settings, resolve_parameters(settings)).dump()));
}

ExperimentResult execute(const RunSettings& settings) {
  const json resolved = resolve_parameters(settings);
  const ExperimentInfo& info = find_experiment(settings.experiment);
  return info.run(resolved, RunContext{settings.master_seed, settings.workers});
}

std::string to_csv(const Table& table) {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

RunManifest run(const RunSettings& settings) {
  const std::string started = utc_timestamp();
  const json resolved = resolve_parameters(settings);
  const std::string hash = config_hash(settings);
  const ExperimentResult result = execute(settings);

  RunManifest m;
  m.config_hash = hash;
  m.directory = settings.output_dir / settings.experiment / hash;
  std::error_code ec;
  fs::create_directories(m.directory, ec);
  if (ec) throw IoError("cannot create " + m.directory.string() + ": " + ec.message());

  const json versions = {{"shepeaks_core", kVersion}, {"shepeaks_tool", kVersion}};
  json outputs = json::array();
  const auto record = [&](const fs::path& file, const std::string& bytes) {
    write_atomic(file, bytes);
    m.files.push_back(file);
    outputs.push_back({{"file", file.filename().string()},
                       {"bytes", bytes.size()},
                       {"fnv1a64", hex64(fnv1a64(bytes))}});
  };
  for (const auto& table : result.tables) {
    record(m.directory / (table.name + ".csv"), to_csv(table));
    const json sidecar = {{"table", table.name},
                          {"experiment", settings.experiment},
                          {"config_hash", hash},
                          {"master_seed", settings.master_seed},
                          {"parameters", resolved},
                          {"columns", table.header},
                          {"rows", table.rows.size()},
                          {"seed_streams", table.streams},
                          {"versions", versions}};
    record(m.directory / (table.name + ".json"), sidecar.dump(2) + "\n");
  }

  m.document = {{"config_hash", hash},
                {"experiment", settings.experiment},
                {"master_seed", settings.master_seed},
                {"workers", settings.workers},
                {"tool_version", kVersion},
                {"started_at", started},
                {"finished_at", utc_timestamp()},
                {"outputs", outputs},
                {"summary", result.summary}};
  const fs::path manifest = m.directory / "manifest.json";
  write_atomic(manifest, m.document.dump(2) + "\n");
  m.files.push_back(manifest);
  return m;
}

std::string describe(const ExperimentInfo& info) {
  std::ostringstream os;
  os << info.summary << "\n\nParameters (config key: meaning [default]):\n";
  for (const auto& p : info.params) {
    os << "  " << p.name << ": " << p.help << " [" << p.default_value.dump() << "]\n";
  }
  return os.str();
}

}  // namespace shepeaks::experiments
