// wfr: command-line runner for the sampling, oracle, equivalence, geodesic
// and diagnostic experiments.

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfr/config.hpp"
#include "wfr/error.hpp"
#include "wfr/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> particles;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "overrides the config seed");
  cmd->add_option("--output-dir", f.output_dir, "overrides the config output directory");
  cmd->add_option("--particles", f.particles, "overrides the config particle count")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "worker threads (default: all cores; never changes results)")
      ->check(CLI::PositiveNumber);
}

void print_error(const std::string& kind, const std::string& message, const std::string& field = {}) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein-Fisher-Rao particle sampling experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wfr::version()));

  CommonFlags flags;
  std::optional<std::string> kind;
  std::vector<double> t_values;
  std::optional<std::string> check;
  std::optional<std::size_t> states, trials;

  auto* sample = app.add_subcommand("sample", "weighted SDE run: ensemble snapshots + summary");
  add_common(sample, flags, true);
  auto* oracle = app.add_subcommand("oracle", "grid PDE solve: density CSV");
  add_common(oracle, flags, true);
  auto* equivalence = app.add_subcommand("equivalence", "paired jump vs reweight runs: distance report");
  add_common(equivalence, flags, true);
  auto* geodesic = app.add_subcommand("geodesic", "geodesic and triangle trajectories");
  add_common(geodesic, flags, false);
  geodesic->add_option("--kind", kind, "wasserstein|mixture|exponential|fisher_rao|all");
  geodesic->add_option("--t", t_values, "geodesic parameters to emit (repeatable)");
  auto* diagnose = app.add_subcommand("diagnose", "adjoint / gamma / variance-decay / chi2 checks");
  add_common(diagnose, flags, false);
  diagnose->add_option("--check", check, "adjoint|gamma|variance-decay|chi2");
  diagnose->add_option("--states", states, "adjoint: number of states")->check(CLI::PositiveNumber);
  diagnose->add_option("--trials", trials, "adjoint: number of random instances")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage_error", e.what());
    return 2;
  }

  try {
    wfr::RunConfig cfg;
    if (!flags.config.empty()) cfg = wfr::load_run_config(flags.config);

    wfr::Experiment wanted = wfr::Experiment::sample;
    if (app.got_subcommand(oracle)) wanted = wfr::Experiment::oracle;
    if (app.got_subcommand(equivalence)) wanted = wfr::Experiment::jump_equivalence;
    if (app.got_subcommand(geodesic)) wanted = wfr::Experiment::geodesic;
    if (app.got_subcommand(diagnose)) wanted = wfr::Experiment::diagnostics;
    if (cfg.source.contains("experiment") && cfg.experiment != wanted) {
      throw wfr::ConfigError("experiment", "config is for '" + std::string(wfr::to_string(cfg.experiment)) +
                                               "', not '" + std::string(wfr::to_string(wanted)) + "'");
    }
    cfg.experiment = wanted;

    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.output_dir) cfg.output_dir = *flags.output_dir;
    if (flags.particles) cfg.particles = *flags.particles;
    if (kind) {
      if (*kind == "all") {
        cfg.geodesic.kind.reset();
      } else {
        try {
          cfg.geodesic.kind = wfr::parse_geodesic_kind(*kind);
        } catch (const wfr::Error&) {
          throw wfr::ConfigError("--kind", "unknown geodesic kind '" + *kind + "'");
        }
      }
    }
    for (double t : t_values) {
      if (!(t >= 0.0 && t <= 1.0)) throw wfr::ConfigError("--t", "values must lie in [0,1]");
    }
    if (!t_values.empty()) cfg.geodesic.t_values = t_values;
    if (check) {
      try {
        cfg.diagnose.check = wfr::parse_diagnostic_check(*check);
      } catch (const wfr::ConfigError&) {
        throw wfr::ConfigError("--check", "unknown check '" + *check + "'");
      }
    }
    if (states) cfg.diagnose.states = *states;
    if (trials) cfg.diagnose.trials = *trials;

    std::optional<int> threads = flags.threads;
    if (!threads) {
      if (const char* env = std::getenv("WFR_THREADS")) {
        try {
          threads = std::stoi(env);
        } catch (const std::exception&) {
          throw wfr::ConfigError("WFR_THREADS", "must be a positive integer");
        }
        if (*threads < 1) throw wfr::ConfigError("WFR_THREADS", "must be a positive integer");
      }
    }
    if (threads) omp_set_num_threads(*threads);

    const wfr::ExperimentResult r = wfr::run_experiment(cfg);
    for (const auto& f : r.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const wfr::ConfigError& e) {
    print_error("config_error", e.what(), e.field());
    return 1;
  } catch (const wfr::Error& e) {
    print_error(std::string(wfr::to_string(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal_error", e.what());
    return 1;
  }
}
