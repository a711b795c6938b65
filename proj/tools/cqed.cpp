#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cqed/experiments.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kNumerical = 2, kChecksFailed = 3 };

struct Outcome {
  int code = kOk;
  std::string message;
  std::optional<cqed::ExperimentResult> result;
};

// Loads, applies overrides, runs and writes one experiment.
Outcome execute(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out,
                const std::string& format, std::ostream* fallback) {
  cqed::ExperimentConfig config;
  try {
    config = cqed::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!out.empty()) config.output_path = out;
    if (!format.empty()) config.format = cqed::output_format_from_string(format);
  } catch (const cqed::ConfigError& e) {
    return {kConfig, std::string("config error: ") + e.what(), std::nullopt};
  } catch (const cqed::DomainError& e) {
    return {kConfig, std::string("config error: ") + e.what(), std::nullopt};
  }

  cqed::ExperimentResult result;
  try {
    result = cqed::run_experiment(config);
  } catch (const cqed::StabilityError& e) {
    return {kNumerical, std::string("numerical failure (stability): ") + e.what(), std::nullopt};
  } catch (const cqed::ConvergenceError& e) {
    return {kNumerical, std::string("numerical failure (convergence): ") + e.what(), std::nullopt};
  } catch (const cqed::Error& e) {
    return {kNumerical, std::string("numerical failure: ") + e.what(), std::nullopt};
  }

  if (!config.output_path.empty()) {
    std::ofstream f(config.output_path, std::ios::binary);
    if (!f) return {kConfig, "cannot open output file '" + config.output_path + "'", std::nullopt};
    cqed::write_result(f, config, result, config.format);
  } else if (fallback) {
    cqed::write_result(*fallback, config, result, config.format);
  }
  return {kOk, {}, std::move(result)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven cavity QED under homodyne detection: information-rate experiments"};
  app.require_subcommand(1);

  std::string config_path, out, format, config_dir, out_dir;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("--config", config_path, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the RNG seed");
  run->add_option("--out", out, "Output file (default: config 'output' or stdout)");
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* all = app.add_subcommand("all", "Run every *.cfg in a directory and print a pass/fail summary");
  all->add_option("--config-dir", config_dir, "Directory of experiment configs")
      ->required()
      ->check(CLI::ExistingDirectory);
  all->add_option("--out-dir", out_dir, "Write each result to <out-dir>/<config name>.<format>");
  all->add_option("--seed", seed, "Override the RNG seed of every config");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    const Outcome o = execute(config_path, seed, out, format, &std::cout);
    if (o.code != kOk) {
      std::cerr << o.message << '\n';
      return o.code;
    }
    for (const auto& c : o.result->checks)
      std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    return kOk;
  }

  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(config_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << "no *.cfg files in " << config_dir << '\n';
    return kConfig;
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);

  int worst = kOk;
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const auto& path : configs) {
    std::string target;
    if (!out_dir.empty()) target = (fs::path(out_dir) / path.stem()).string() + ".csv";
    const Outcome o = execute(path.string(), seed, target, "", nullptr);
    nlohmann::ordered_json item;
    item["config"] = path.filename().string();
    if (o.code != kOk) {
      item["status"] = o.code == kConfig ? "config-error" : "numerical-failure";
      item["passed"] = false;
      item["message"] = o.message;
      worst = std::max(worst, o.code);
    } else {
      item["experiment"] = o.result->experiment;
      item["status"] = "ok";
      item["passed"] = o.result->passed();
      nlohmann::ordered_json checks = nlohmann::ordered_json::array();
      for (const auto& c : o.result->checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      item["checks"] = checks;
      if (!o.result->passed() && worst == kOk) worst = kChecksFailed;
    }
    std::cout << item.dump() << '\n' << std::flush;
    summary.push_back(item);
  }
  long passed = 0;
  for (const auto& s : summary) passed += s["passed"].get<bool>() ? 1 : 0;
  std::cout << nlohmann::ordered_json{{"total", summary.size()}, {"passed", passed}, {"failed", summary.size() - passed}}.dump()
            << '\n';
  return worst;
}
