#include <shepeaks_tools/experiments.hpp>

#include <shepeaks/errors.hpp>
#include <shepeaks/version.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace ex = shepeaks::experiments;

namespace {

constexpr const char* kWorkersEnv = "SHEPEAKS_WORKERS";

int fail(const std::string& type, const std::string& message, int code) {
  const ex::json err = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

std::optional<unsigned> workers_from_env() {
  const char* raw = std::getenv(kWorkersEnv);
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v == 0) {
    throw shepeaks::ConfigError(std::string(kWorkersEnv) + " must be a positive integer");
  }
  return static_cast<unsigned>(v);
}

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

int run_experiment(const std::string& name, const RunFlags& flags) {
  ex::RunSettings settings;
  if (!flags.config.empty()) settings = ex::load_config(flags.config);
  if (!settings.experiment.empty() && settings.experiment != name) {
    throw shepeaks::ConfigError("config names experiment '" + settings.experiment +
                                "' but '" + name + "' was requested");
  }
  settings.experiment = name;
  if (flags.seed) settings.master_seed = *flags.seed;
  if (auto env = workers_from_env()) settings.workers = *env;
  if (flags.workers) settings.workers = *flags.workers;
  if (flags.out) settings.output_dir = *flags.out;

  const ex::RunManifest m = ex::run(settings);
  const ex::json report = {{"directory", m.directory.string()},
                           {"config_hash", m.config_hash},
                           {"summary", m.document["summary"]}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

int validate_file(const std::string& path) {
  const auto diags = ex::diagnose_file(path);
  const ex::json report = {{"valid", diags.empty()}, {"diagnostics", diags}};
  std::cout << report.dump(2) << '\n';
  return diags.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peaks of the stochastic heat equation: exact Gaussian samplers, a "
               "finite-difference solver and fractal estimators."};
  app.set_version_flag("--version", std::string(shepeaks::kVersion));
  app.require_subcommand(1);
  app.footer(std::string("Worker count: --workers overrides the ") + kWorkersEnv +
             " environment variable, which overrides the config file.\n"
             "Exit status: 0 success, 2 invalid configuration, 3 numerical or model "
             "failure, 4 I/O failure.");

  RunFlags flags;
  std::string action;
  std::string validate_path;

  auto* validate = app.add_subcommand("validate", "Check a config file without running it.");
  validate->add_option("config", validate_path, "JSON config naming its experiment")->required();
  validate->callback([&] { action = "validate"; });

  for (const auto& info : ex::registry()) {
    auto* sub = app.add_subcommand(info.name, info.summary);
    sub->footer(ex::describe(info));
    sub->add_option("--config", flags.config, "JSON config file");
    sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
    sub->add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output root directory");
    sub->callback([&action, name = info.name] { action = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (action == "validate") return validate_file(validate_path);
    return run_experiment(action, flags);
  } catch (const shepeaks::ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const shepeaks::DomainError& e) {
    return fail("domain", e.what(), 2);
  } catch (const shepeaks::ModelError& e) {
    return fail("model", e.what(), 3);
  } catch (const shepeaks::EstimatorError& e) {
    return fail("estimator", e.what(), 3);
  } catch (const shepeaks::IoError& e) {
    return fail("io", e.what(), 4);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("io", e.what(), 4);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 3);
  }
}
