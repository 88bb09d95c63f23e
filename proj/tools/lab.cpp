// lab <subcommand> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]
#include "symlab/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for symmetric-measure diagnostics"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"gen", "write the measure table"},
      {"sla", "small local action scans"},
      {"alpha", "transport number scans"},
      {"pv", "truncated principal values"},
      {"defect", "symmetry defects at points"},
      {"density", "density ratio scans"},
      {"multiplier", "Fourier multiplier on sphere nodes"},
      {"blowup", "blow-up moments and tangent symmetry"},
      {"verify", "acceptance battery"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    symlab::ExperimentConfig cfg = symlab::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (app.get_subcommands().front()->count("--seed")) {
      cfg.seed = seed;
      cfg.source["seed"] = seed;
    }
    if (threads > 0) cfg.threads = threads;
    const symlab::RunManifest manifest = symlab::run(command, cfg);
    int failed = 0;
    for (const auto& [name, ok] : manifest.verdicts) {
      std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
      failed += ok ? 0 : 1;
    }
    for (const auto& path : manifest.outputs) std::cout << "wrote " << path << "\n";
    return command == "verify" && failed > 0 ? 1 : 0;
  } catch (const symlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const symlab::RefusalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
