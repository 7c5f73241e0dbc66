#include <cstdio>
#include <optional>

#include <CLI11.hpp>

#include "arcrom/parallel.hpp"
#include "commands.hpp"

using namespace arcrom;

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order elastic scattering by multiple open arcs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples, threads, reference_N;
  std::optional<std::string> out;
  bool skip_hf = false;
  app.add_option("--config", config_path, "Experiment configuration (JSON)")->required();
  app.add_option("--seed", seed, "Seed for sampled configurations");
  app.add_option("--samples", samples, "Number of sampled configurations")->check(CLI::PositiveNumber);
  app.add_flag("--skip-hf", skip_hf, "Report residuals only, without HF reference solves");
  app.add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "Output directory");

  auto* hf = app.add_subcommand("hf-solve", "Solve sampled configurations with the HF solver");
  hf->add_option("--reference-N", reference_N, "Overkill order for convergence errors");
  auto* offline = app.add_subcommand("offline", "Build and store the reduced model");
  auto* rb = app.add_subcommand("rb-solve", "Solve sampled configurations with the stored model");
  auto* sweep = app.add_subcommand("sweep", "Tabulate errors over a tolerance grid");
  auto* validate = app.add_subcommand("validate", "Check the geometry family assumptions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto cfg = cli::load_config(config_path);
    if (seed) cfg.run.seed = *seed;
    if (samples) cfg.run.samples = *samples;
    if (threads) cfg.run.threads = *threads;
    if (out) cfg.run.out = *out;
    if (skip_hf) cfg.run.skip_hf = true;
    if (reference_N) {
      if (*reference_N <= cfg.discretization.N) throw cli::ConfigError("--reference-N must exceed N");
      cfg.discretization.reference_N = *reference_N;
    }
    if (cfg.run.threads > 0) set_default_threads(cfg.run.threads);

    if (*hf) return cli::cmd_hf_solve(cfg);
    if (*offline) return cli::cmd_offline(cfg);
    if (*rb) return cli::cmd_rb_solve(cfg);
    if (*sweep) return cli::cmd_sweep(cfg);
    if (*validate) return cli::cmd_validate(cfg);
  } catch (const cli::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const cli::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
