#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmwis/engine.hpp"
#include "dmwis/exact_solver.hpp"
#include "dmwis/io.hpp"
#include "dmwis/partition.hpp"
#include "dmwis/solvers.hpp"

namespace dmwis {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_io = 2, exit_verify = 3, exit_internal = 4 };

struct RunConfig {
  std::string graph_path;
  std::string format = "metis";
  std::string weights;  // empty: weights from the graph file (1 if it has none)
  Rank pes = 1;
  std::string partition = "contig-e";
  EngineMode engine = EngineMode::sync;
  std::size_t buffer_threshold = 1024;
  Algorithm algo = Algorithm::reduce_greedy;
  std::size_t max_subproblem = 10;
  PeelScore peel_score = PeelScore::neighborhood_weight_minus_weight;
  std::uint64_t seed = 0;
  bool verify = false;
  std::size_t verify_cap = 22;
  std::string solution_out;
  std::string stats_out;
};

struct RunOutput {
  nlohmann::ordered_json stats;
  std::vector<GlobalId> solution;
  bool has_solution = false;
};

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "reduce") return Algorithm::reduce;
  if (s == "greedy") return Algorithm::greedy;
  if (s == "reduce-greedy") return Algorithm::reduce_greedy;
  if (s == "reduce-peel") return Algorithm::reduce_peel;
  throw UsageError("unknown algorithm '" + s + "'");
}

inline EngineMode parse_engine(const std::string& s) {
  if (s == "sync") return EngineMode::sync;
  if (s == "async") return EngineMode::async;
  if (s == "threaded") return EngineMode::threaded;
  throw UsageError("unknown engine '" + s + "'");
}

inline PeelScore parse_peel_score(const std::string& s) {
  if (s == "nw-minus-w") return PeelScore::neighborhood_weight_minus_weight;
  if (s == "deg-minus-w") return PeelScore::degree_minus_weight;
  throw UsageError("unknown peel score '" + s + "'");
}

inline const char* to_string(PeelScore s) {
  return s == PeelScore::degree_minus_weight ? "deg-minus-w" : "nw-minus-w";
}

// "contig-v", "contig-e" or "hash:SEED".
inline std::pair<PartitionStrategy, std::uint64_t> parse_partition(const std::string& s) {
  if (s == "contig-v") return {PartitionStrategy::contiguous_by_vertices, 0};
  if (s == "contig-e") return {PartitionStrategy::contiguous_by_edges, 0};
  if (s.rfind("hash:", 0) == 0) {
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(s.substr(5), &used);
      if (used == s.size() - 5) return {PartitionStrategy::hash, seed};
    } catch (const std::exception&) {
    }
  }
  throw UsageError("partition must be contig-v, contig-e or hash:SEED, got '" + s + "'");
}

inline void validate(const RunConfig& cfg) {
  if (cfg.pes < 1) throw UsageError("--pes must be at least 1");
  if (cfg.buffer_threshold < 1) throw UsageError("--buffer-threshold must be at least 1");
  if (cfg.max_subproblem > kMaxExactVertices) {
    throw UsageError("--max-subproblem must be at most " + std::to_string(kMaxExactVertices));
  }
  if (cfg.format != "metis" && cfg.format != "edgelist") throw UsageError("--format must be metis or edgelist");
  if (!cfg.weights.empty()) parse_weight_spec(cfg.weights);
  parse_partition(cfg.partition);
}

inline GlobalGraph load_graph(const RunConfig& cfg) {
  const auto text = detail::read_file(cfg.graph_path);
  GlobalGraph g = cfg.format == "edgelist" ? parse_edge_list(text) : parse_metis(text);
  if (!cfg.weights.empty()) g = with_weights(g, gen_weights(g.n(), parse_weight_spec(cfg.weights)));
  return g;
}

inline EngineConfig engine_config(const RunConfig& cfg) {
  EngineConfig ec;
  ec.mode = cfg.engine;
  ec.buffer_threshold = cfg.buffer_threshold;
  ec.seed = cfg.seed;
  ec.reduction.max_subproblem = cfg.max_subproblem;
  ec.reduction.peel_score = cfg.peel_score;
  return ec;
}

// Runs the conexampled pipeline on an in-memory graph. The stats record holds no wall time;
// run() adds it.
inline RunOutput execute(const GlobalGraph& g, const RunConfig& cfg) {
  validate(cfg);
  const auto [strategy, part_seed] = parse_partition(cfg.partition);
  const auto part = partition(g, cfg.pes, strategy, part_seed);
  const auto ec = engine_config(cfg);

  RunOutput out;
  auto& s = out.stats;
  s["n"] = g.n();
  s["m"] = g.m();
  s["p"] = cfg.pes;
  s["mode"] = to_string(cfg.engine);
  s["algo"] = to_string(cfg.algo);
  s["partition"] = cfg.partition;
  s["max_subproblem"] = cfg.max_subproblem;
  s["buffer_threshold"] = cfg.buffer_threshold;
  s["seed"] = cfg.seed;

  std::optional<SolveResult> solved;
  std::optional<DistributedReducer> reducer;
  if (cfg.algo == Algorithm::greedy) {
    solved = plain_greedy(g, part, ec);
    s["kernel_n"] = g.n();
    s["kernel_m"] = g.m();
    s["offset"] = 0;
    s["effective_offset"] = 0;
    s["rounds"] = solved->greedy_rounds;
    s["messages"] = solved->solution.messages.total_sent();
  } else {
    reducer.emplace(g, part, ec);
    if (cfg.algo == Algorithm::reduce) {
      reducer->reduce();
    } else if (cfg.algo == Algorithm::reduce_greedy) {
      solved = reduce_and_greedy(*reducer);
    } else {
      solved = reduce_and_peel(*reducer);
    }
  }

  std::optional<Kernel> kernel;
  if (reducer) {
    if (cfg.algo != Algorithm::reduce_peel) kernel = reducer->kernel();
    const auto& rep = reducer->report();
    s["kernel_n"] = kernel ? kernel->graph.n() : 0;
    s["kernel_m"] = kernel ? kernel->graph.m() : 0;
    s["offset"] = reducer->offset();
    s["effective_offset"] = reducer->effective_offset();
    s["rounds"] = rep.rounds;
    s["peel_phases"] = rep.peel_phases;
    const auto ts = reducer->transport().stats();
    s["messages"] = ts.total_sent();
    s["weight_messages"] = ts.sent[0];
    s["status_messages"] = ts.sent[1];
    for (auto r : kRuleOrder) {
      std::uint64_t c = 0;
      for (const auto& st : reducer->states()) c += st.rule_counts[static_cast<std::size_t>(r)];
      s[std::string("rule_") + to_string(r)] = c;
    }
    ProtocolCounters pc;
    for (const auto& st : reducer->states()) {
      const auto& c = st.counters;
      pc.zero_weight += c.zero_weight;
      pc.remote_include += c.remote_include;
      pc.remote_exclude += c.remote_exclude;
      pc.adopted += c.adopted;
      pc.void_moves += c.void_moves;
      pc.move_races += c.move_races;
      pc.filtered_moves += c.filtered_moves;
      pc.conflicts += c.conflicts;
      pc.peels += c.peels;
    }
    s["zero_weight_excluded"] = pc.zero_weight;
    s["remote_includes"] = pc.remote_include;
    s["remote_excludes"] = pc.remote_exclude;
    s["adopted_moves"] = pc.adopted;
    s["void_moves"] = pc.void_moves;
    s["move_races"] = pc.move_races;
    s["filtered_moves"] = pc.filtered_moves;
    s["conflicts"] = pc.conflicts / 2;
    s["peels"] = pc.peels;
    s["audit_violations"] = audit_violations(reducer->states());
    s["is_valid"] = true;  // kernel assembly asserts the induced-subgraph property
    s["engine_scheduler_steps"] = rep.scheduler_steps;
    s["engine_trace_hash"] = rep.trace_hash;
    s["engine_barriers"] = ts.barriers;
    s["engine_flushes"] = ts.flushes;
    s["engine_bytes"] = ts.bytes;
  }

  if (solved) {
    out.solution = solved->solution.vertices;
    out.has_solution = true;
    s["solution_weight"] = solved->solution.weight;
    s["solution_size"] = solved->solution.vertices.size();
    s["kernel_solution_weight"] = solved->kernel_weight;
    s["is_valid"] = true;  // reconstruct and plain_greedy assert validity
  }

  if (cfg.verify) {
    if (g.n() > cfg.verify_cap) {
      s["verified"] = nullptr;
    } else {
      const Weight alpha = exact_alpha(g);
      s["alpha"] = alpha;
      bool ok = true;
      if (kernel) ok = ok && reducer->effective_offset() + exact_alpha(kernel->graph) == alpha;
      if (solved) ok = ok && solved->solution.weight <= alpha;
      if (reducer) ok = ok && fixpoint_violations(reducer->states()) == 0;
      s["verified"] = ok;
      if (!ok) throw VerificationFailure("verification against the exact solver failed");
    }
  }
  return out;
}

inline std::string solution_text(const std::vector<GlobalId>& vertices) {
  std::string out;
  for (auto v : vertices) out += std::to_string(v) + '\n';
  return out;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write " + path);
}

// Full CLI pipeline: load, run, write outputs. Stats JSON goes to --stats-out or stdout,
// a human summary to stderr.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    const GlobalGraph g = load_graph(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput res;
    int code = exit_ok;
    try {
      res = execute(g, cfg);
    } catch (const VerificationFailure& e) {
      err << "error: " << e.what() << '\n';
      code = exit_verify;
    }
    if (code == exit_verify) return code;
    res.stats["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string json = res.stats.dump() + "\n";
    if (cfg.stats_out.empty()) {
      out << json;
    } else {
      write_file(cfg.stats_out, json);
    }
    if (!cfg.solution_out.empty()) {
      if (!res.has_solution) throw UsageError("--solution-out needs a solving algorithm");
      write_file(cfg.solution_out, solution_text(res.solution));
    }
    const auto& s = res.stats;
    err << "n=" << s["n"] << " m=" << s["m"] << " p=" << s["p"] << " algo=" << to_string(cfg.algo)
        << " kernel_n=" << s["kernel_n"] << " kernel_m=" << s["kernel_m"] << " offset=" << s["effective_offset"];
    if (res.has_solution) err << " weight=" << s["solution_weight"];
    err << '\n';
    return exit_ok;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const SubproblemTooLarge& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const GraphError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_io;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  } catch (const ProtocolError& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
}

}  // namespace dmwis
