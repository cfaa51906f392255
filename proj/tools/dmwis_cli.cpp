#include <iostream>

#include <CLI11.hpp>

#include "dmwis/dmwis.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distributed reductions for maximum weight independent set"};
  dmwis::RunConfig cfg;
  std::string engine = "sync";
  std::string algo = "reduce-greedy";
  std::string peel_score = "nw-minus-w";
  std::size_t pes = 1;

  app.add_option("--graph", cfg.graph_path, "Input graph file")->required();
  app.add_option("--format", cfg.format, "Input format")->check(CLI::IsMember({"metis", "edgelist"}));
  app.add_option("--weights", cfg.weights, "Weight source: file:PATH, uniform:LO:HI:SEED or const:C");
  app.add_option("--pes", pes, "Number of simulated PEs")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
  app.add_option("--partition", cfg.partition, "contig-v, contig-e or hash:SEED");
  app.add_option("--engine", engine, "Engine mode")->check(CLI::IsMember({"sync", "async", "threaded"}));
  app.add_option("--buffer-threshold", cfg.buffer_threshold, "Messages per link before an async flush")
      ->check(CLI::PositiveNumber);
  app.add_option("--algo", algo, "Pipeline")->check(CLI::IsMember({"reduce", "greedy", "reduce-greedy", "reduce-peel"}));
  app.add_option("--max-subproblem", cfg.max_subproblem, "Vertex cap for exact subproblems")
      ->check(CLI::Range(std::size_t{0}, dmwis::kMaxExactVertices));
  app.add_option("--peel-score", peel_score, "Peel score")->check(CLI::IsMember({"nw-minus-w", "deg-minus-w"}));
  app.add_option("--seed", cfg.seed, "Scheduler and greedy seed");
  app.add_flag("--verify", cfg.verify, "Compare against the exact solver on small inputs");
  app.add_option("--verify-cap", cfg.verify_cap, "Largest n checked by --verify");
  app.add_option("--solution-out", cfg.solution_out, "Write the solution vertices (0-indexed, one per line)");
  app.add_option("--stats-out", cfg.stats_out, "Write the stats JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dmwis::exit_usage;
  }
  try {
    cfg.pes = static_cast<dmwis::Rank>(pes);
    cfg.engine = dmwis::parse_engine(engine);
    cfg.algo = dmwis::parse_algorithm(algo);
    cfg.peel_score = dmwis::parse_peel_score(peel_score);
  } catch (const dmwis::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return dmwis::exit_usage;
  }
  return dmwis::run(cfg, std::cout, std::cerr);
}
