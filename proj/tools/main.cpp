#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "stablereg/cli.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/parallel.hpp"

namespace {

using stablereg::RunConfig;

struct RawOptions {
  std::string eps;
  std::string zeta;
  std::string theta;
  std::string algo = "stable";
  std::string format = "json";
};

void add_source(CLI::App* cmd, RunConfig& cfg) {
  auto* input = cmd->add_option("--input", cfg.input, "Edge-list file");
  auto* gen = cmd->add_option("--gen", cfg.gen, "Generator spec: kind:args, JSON object or @file");
  input->excludes(gen);
  cmd->add_flag("--compact-ids", cfg.compact_ids, "Renumber input ids densely");
  cmd->add_option("--seed", cfg.seed, "Seed for generators and randomized stages");
  cmd->add_option("--out", cfg.out, "Output path (default stdout)");
}

void add_report(CLI::App* cmd, RunConfig& cfg, RawOptions& raw) {
  cmd->add_option("--format", raw.format, "json or tsv-summary")->check(CLI::IsMember({"json", "tsv-summary"}));
  cmd->add_option("--budget", cfg.budget, "Search node budget");
  cmd->add_flag("--timings", cfg.timings, "Record stage timings (makes reports run-dependent)");
}

void add_search(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--k-max", cfg.k_max, "Largest order-witness length searched");
  cmd->add_option("--h-max", cfg.h_max, "Largest tree-witness height searched (0 skips)");
  cmd->add_flag("!--no-twin-compression", cfg.twin_compression, "Search on the full graph");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable regularity decompositions with exact verification"};
  app.require_subcommand(1);
  RunConfig cfg;
  RawOptions raw;

  auto* detect = app.add_subcommand("detect", "Order, tree and independence bounds");
  add_source(detect, cfg);
  add_report(detect, cfg, raw);
  add_search(detect, cfg);
  detect->add_option("--independence-max", cfg.independence_max, "Largest independence witness searched (0 skips)");

  auto* partition = app.add_subcommand("partition", "Compute and verify a decomposition");
  add_source(partition, cfg);
  add_report(partition, cfg, raw);
  add_search(partition, cfg);
  partition->add_option("--algo", raw.algo, "stable, prob, c-indivisible or indiscernible")
      ->check(CLI::IsMember({"stable", "prob", "c-indivisible", "indiscernible"}));
  partition->add_option("--eps", raw.eps, "Accuracy, e.g. 1/4 or 0.25");
  partition->add_option("--zeta", raw.zeta, "Piece-size exponent (c-indivisible)");
  partition->add_option("--theta", raw.theta, "Anchor exponent (c-indivisible)");
  partition->add_option("--c", cfg.c, "Indivisibility constant (c-indivisible)");
  partition->add_option("--n2", cfg.n2, "Indiscernible piece length");
  partition->add_option("--k-star", cfg.k_star, "Declared order bound k*");
  partition->add_option("--k-starstar", cfg.k_starstar, "Declared tree bound k**");
  partition->add_option("--retries", cfg.retry_limit, "Retry limit for randomized splits");
  partition->add_flag("--allow-boundary", cfg.allow_boundary, "Run at eps = 2^-k** without claiming the piece bound");

  auto* verify = app.add_subcommand("verify", "Recheck a partition file from scratch");
  add_source(verify, cfg);
  add_report(verify, cfg, raw);
  verify->add_option("--partition", cfg.partition_file, "Partition or report JSON")->required();
  verify->add_option("--eps", raw.eps, "Accuracy (default: recorded value)");
  verify->add_option("--k-star", cfg.k_star, "Order bound for indiscernible pieces");
  verify->add_option("--k-starstar", cfg.k_starstar, "Tree bound for the piece-count clause");
  verify->add_option("--c", cfg.c, "Indivisibility constant");

  auto* generate = app.add_subcommand("generate", "Write a generated graph as an edge list");
  add_source(generate, cfg);
  generate->add_option("--annotations", cfg.annotations, "Write intended blocks and truth values as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (const char* threads = std::getenv("STABLEREG_THREADS")) {
    try {
      stablereg::set_thread_limit(std::stoul(threads));
    } catch (const std::exception&) {
      std::cerr << "error: STABLEREG_THREADS must be a non-negative integer\n";
      return 2;
    }
  }

  try {
    if (*detect) cfg.command = stablereg::Command::detect;
    if (*partition) cfg.command = stablereg::Command::partition;
    if (*verify) cfg.command = stablereg::Command::verify;
    if (*generate) cfg.command = stablereg::Command::generate;
    cfg.algorithm = stablereg::parse_algorithm(raw.algo);
    cfg.format = raw.format == "json" ? stablereg::OutputFormat::json : stablereg::OutputFormat::tsv_summary;
    if (!raw.eps.empty()) cfg.eps = stablereg::Ratio::parse(raw.eps);
    if (!raw.zeta.empty()) cfg.zeta = stablereg::Ratio::parse(raw.zeta);
    if (!raw.theta.empty()) cfg.theta = stablereg::Ratio::parse(raw.theta);
  } catch (const stablereg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return stablereg::run(cfg, std::cout, std::cerr);
}
