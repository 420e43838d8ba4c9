// regcomply command-line tool. See README.md for the commands and output schema.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include "regcomply/cli/commands.hpp"
#include "regcomply/errors.hpp"

namespace {

namespace fs = std::filesystem;
using regcomply::cli::RunConfig;

enum Exit : int { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3, kBudget = 4 };

// Write to a temporary sibling, then rename over the target.
void write_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw regcomply::ConfigError("cannot open output file " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw regcomply::ConfigError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw regcomply::ConfigError("cannot move output into place: " + ec.message());
  }
}

nlohmann::json read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw regcomply::ConfigError("cannot read config file " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw regcomply::ConfigError("config file " + path + ": " + e.what());
  }
}

int run_main(int argc, char** argv) {
  CLI::App app{"Compliance measures for weighted l1 regularizers"};
  app.set_version_flag("--version", regcomply::cli::kToolVersion);

  std::string command, config_path;
  std::optional<std::size_t> n, k, trials, max_L, restarts, grid_steps, max_iters, workers;
  std::optional<std::uint64_t> samples, seed;
  std::optional<double> tolerance, weight_floor;
  std::optional<std::string> weights, measure, out, format;
  bool oracle_check = false;

  app.add_option("command", command,
                 "measure3d | mc | rip-nec | rip-suff | optimize | certify | oracle | curves");
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--n", n, "ambient dimension");
  app.add_option("--k", k, "sparsity");
  app.add_option("--weights", weights, "ones | comma list | random:count:seed");
  app.add_option("--measure", measure, "U3 | NU3 | rip-nec | rip-suff | mc-U | mc-NU");
  app.add_option("--samples", samples, "Monte Carlo sample count");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--trials", trials, "certificate trials");
  app.add_option("--max-L", max_L, "largest L for curves (default n)");
  app.add_option("--restarts", restarts, "multistart local searches");
  app.add_option("--grid-steps", grid_steps, "weight grid points per coordinate");
  app.add_option("--tolerance", tolerance, "local search tolerance");
  app.add_option("--max-iters", max_iters, "iterations per local search");
  app.add_option("--weight-floor", weight_floor, "lower bound on weights while optimizing");
  app.add_option("--workers", workers, "worker threads (0: REGCOMPLY_THREADS or all cores)");
  app.add_option("--out", out, "output path (default stdout)");
  app.add_option("--format", format, "json | csv");
  app.add_flag("--oracle-check", oracle_check, "certify rip-nec/rip-suff against the brute oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  RunConfig cfg;
  bool n_given = n.has_value();
  if (!config_path.empty()) {
    const auto j = read_config_file(config_path);
    regcomply::cli::merge_json(cfg, j);
    n_given = n_given || j.contains("n");
  }
  if (!command.empty()) cfg.command = command;
  if (n) cfg.n = *n;
  if (k) cfg.k = *k;
  if (weights) cfg.weights = *weights;
  if (measure) cfg.measure = *measure;
  if (samples) cfg.samples = *samples;
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (max_L) cfg.max_L = *max_L;
  if (restarts) cfg.search.restarts = *restarts;
  if (grid_steps) cfg.search.grid_steps = *grid_steps;
  if (tolerance) cfg.search.tolerance = *tolerance;
  if (max_iters) cfg.search.max_iters = *max_iters;
  if (weight_floor) cfg.search.weight_floor = *weight_floor;
  if (workers) cfg.search.workers = *workers;
  if (out) cfg.out = *out;
  if (format) cfg.format = *format;
  if (oracle_check) cfg.oracle_check = true;

  // An explicit weight list fixes n unless n was given.
  if (!n_given && cfg.weights != "ones" && !regcomply::cli::parse_random_spec(cfg.weights))
    cfg.n = regcomply::cli::parse_weight_list(cfg.weights).size();

  const auto output = regcomply::cli::run(cfg);
  const auto text = regcomply::cli::render(cfg, output, regcomply::cli::utc_timestamp());
  if (cfg.out.empty())
    std::cout << text;
  else
    write_atomic(cfg.out, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const regcomply::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const regcomply::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const regcomply::CapacityError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const regcomply::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const regcomply::DegenerateCone& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
