#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rmtlab/experiment.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

int execute(rmtlab::ExperimentKind kind, const Options& opt) {
  using namespace rmtlab;
  std::string text;
  if (opt.config_path.empty()) {
    text = "[experiment]\nkind = " + std::string(to_string(kind)) + "\n";
  } else {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config " << opt.config_path << "\n";
      return exit_validation;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  ExperimentConfig config;
  try {
    config = parse_config(text, opt.seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  if (config.kind != kind) {
    std::cerr << "error: experiment.kind: config declares '" << to_string(config.kind)
              << "' but the subcommand is '" << to_string(kind) << "'\n";
    return exit_validation;
  }
  if (opt.threads) {
    if (*opt.threads < 1) {
      std::cerr << "error: --threads must be at least 1\n";
      return exit_validation;
    }
    config.threads = *opt.threads;
  }

  RunResult r;
  try {
    r = run(config, opt.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  if (!r.message.empty()) std::cerr << (r.exit_code ? "error: " : "") << r.message << "\n";
  for (const auto& f : r.files) std::cout << f.string() << "\n";
  return r.exit_code;
}

}  // namespace

const char* describe(rmtlab::ExperimentKind kind) {
  using rmtlab::ExperimentKind;
  switch (kind) {
    case ExperimentKind::selftest: return "deterministic combinatorial and quadrature checks";
    case ExperimentKind::moments: return "trace-moment gap between two ensembles";
    case ExperimentKind::delta: return "sup distance of the mean spectral CDF to the semicircle";
    case ExperimentKind::localization: return "E|lambda_i - sqrt(n) gamma_i|^2 per index";
    case ExperimentKind::shift: return "per-index mean eigenvalue shift between two ensembles";
    case ExperimentKind::walks: return "admissible closed-walk counts against closed forms";
    case ExperimentKind::counting_variance: return "eigenvalue counting variance on an interval";
  }
  return "";
}

int main(int argc, char** argv) {
  CLI::App app{"Wigner-matrix spectral statistics experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rmtlab::artifact_version));

  Options opt;
  std::optional<rmtlab::ExperimentKind> chosen;
  for (auto kind : rmtlab::all_experiment_kinds) {
    auto* sub = app.add_subcommand(std::string(rmtlab::to_string(kind)), describe(kind));
    sub->add_option("--config", opt.config_path, "INI experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads (results do not depend on it)");
    sub->add_option("--seed", opt.seed, "64-bit seed, overrides the config");
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rmtlab::exit_validation;
  }
  return execute(*chosen, opt);
}
