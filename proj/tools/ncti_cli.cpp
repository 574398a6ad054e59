// Command-line driver: validate/run experiment configs, list presets.
// Exit codes: 0 success, 1 config/compute error, 2 assertion failure.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "ncti/experiment.hpp"
#include "ncti/version.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("NCTI_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? (int)hw : 1;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void print_reports(const ncti::ExperimentResult& res) {
  for (const auto& r : res.reports) {
    std::cout << "route=" << r.route << " I=";
    for (size_t i = 0; i < r.I.size(); ++i) std::cout << (i ? ";" : "") << r.I[i];
    std::cout << " L=" << r.L << " samples=" << r.samples.size() << " mean=" << r.mean
              << " stddev=" << r.stddev << " rounded=" << r.rounded
              << " deviation=" << r.deviation << (r.rounded_valid ? "" : " (not integral)")
              << "\n";
  }
  for (const auto& f : res.failures)
    std::cout << "FAILED L=" << f.L << " seed=" << f.seed << ": " << f.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological invariants of disordered tight-binding crystals (v" +
               std::string(ncti::kVersion) + ")"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "ncti_out";
  int threads = default_threads();
  bool assert_flag = false;

  auto* run = app.add_subcommand("run", "run an experiment config and write result files");
  run->add_option("config", config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (result.json, samples.csv)");
  run->add_option("--threads", threads, "worker threads (default: NCTI_THREADS or hardware)");
  run->add_flag("--assert", assert_flag,
                "exit 2 unless all values round within threshold and routes agree");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "schema-check a config without computing");
  validate->add_option("config", validate_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* presets = app.add_subcommand("presets", "print ready-to-run preset configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // collapse CLI11's exit-code zoo onto the documented contract: 0 help, 1 error
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (presets->parsed()) {
      for (const auto& [name, cfg] : ncti::preset_examples())
        std::cout << "# " << name << "\n" << cfg.dump(2) << "\n";
      return 0;
    }
    if (validate->parsed()) {
      ncti::parse_experiment_config(load_json(validate_path));
      std::cout << "valid\n";
      return 0;
    }
    // run
    const auto cfg = ncti::parse_experiment_config(load_json(config_path));
    const auto res = ncti::run_experiment(cfg, out_dir, threads);
    print_reports(res);
    std::cout << "wrote " << out_dir << "/result.json and " << out_dir << "/samples.csv\n";
    if (!res.failures.empty()) return 1;
    if ((assert_flag || cfg.assert_mode) && !res.assert_ok) {
      std::cout << "assertion failed: see the assert block in result.json\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
