#pragma once

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dmwis/global_graph.hpp"
#include "dmwis/types.hpp"

namespace dmwis {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::uint64_t parse_uint(std::string_view tok, std::size_t line_no, const char* what) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw GraphError("line " + std::to_string(line_no) + ": expected " + what + ", got '" + std::string(tok) + "'");
  }
  return x;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// METIS graph format: header "n m [fmt [ncon]]", one line per vertex with 1-indexed
// neighbours; fmt 10/11 puts the vertex weight first, fmt 1/11 interleaves edge weights (ignored).
inline GlobalGraph parse_metis(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line[0] == '%') continue;
      return true;
    }
    return false;
  };

  std::string_view line;
  std::vector<std::string_view> head;
  while (head.empty()) {
    if (!next_line(line)) throw GraphError("line " + std::to_string(line_no) + ": missing header");
    head = detail::tokens(line);
  }
  if (head.size() < 2 || head.size() > 4) throw GraphError("line " + std::to_string(line_no) + ": header needs 'n m [fmt [ncon]]'");
  const std::uint64_t n = detail::parse_uint(head[0], line_no, "vertex count");
  const std::uint64_t m = detail::parse_uint(head[1], line_no, "edge count");
  std::string fmt = head.size() >= 3 ? std::string(head[2]) : "0";
  while (fmt.size() < 3) fmt.insert(fmt.begin(), '0');
  if (fmt.size() != 3 || fmt[0] != '0' || (fmt[1] != '0' && fmt[1] != '1') || (fmt[2] != '0' && fmt[2] != '1')) {
    throw GraphError("line " + std::to_string(line_no) + ": unsupported format code '" + std::string(head[2]) + "'");
  }
  const bool vertex_weights = fmt[1] == '1';
  const bool edge_weights = fmt[2] == '1';
  if (head.size() == 4 && detail::parse_uint(head[3], line_no, "constraint count") != 1) {
    throw GraphError("line " + std::to_string(line_no) + ": only one vertex weight per vertex is supported");
  }
  if (n >= kInvalidGlobal) throw GraphError("line " + std::to_string(line_no) + ": too many vertices");

  const std::size_t header_line = line_no;
  std::vector<Weight> weights(n, 1);
  std::vector<std::vector<GlobalId>> adj(n);
  std::vector<std::size_t> line_of(n, 0);
  for (GlobalId v = 0; v < n; ++v) {
    // blank lines are isolated vertices, so only comments are skipped here
    if (pos >= text.size()) {
      throw GraphError("line " + std::to_string(line_no + 1) + ": expected " + std::to_string(n) +
                       " vertex lines, found " + std::to_string(v));
    }
    if (!next_line(line)) {
      throw GraphError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                       " vertex lines, found " + std::to_string(v));
    }
    line_of[v] = line_no;
    auto tok = detail::tokens(line);
    std::size_t k = 0;
    if (vertex_weights) {
      if (tok.empty()) throw GraphError("line " + std::to_string(line_no) + ": missing vertex weight");
      weights[v] = detail::parse_uint(tok[k++], line_no, "vertex weight");
    }
    while (k < tok.size()) {
      const std::uint64_t u = detail::parse_uint(tok[k++], line_no, "neighbour");
      if (u == 0 || u > n) throw GraphError("line " + std::to_string(line_no) + ": neighbour " + std::to_string(u) + " out of range");
      if (u - 1 == v) throw GraphError("line " + std::to_string(line_no) + ": self-loop");
      adj[v].push_back(static_cast<GlobalId>(u - 1));
      if (edge_weights) {
        if (k >= tok.size()) throw GraphError("line " + std::to_string(line_no) + ": missing edge weight");
        detail::parse_uint(tok[k++], line_no, "edge weight");
      }
    }
  }
  while (next_line(line)) {
    if (!detail::tokens(line).empty()) throw GraphError("line " + std::to_string(line_no) + ": more vertex lines than the header announces");
  }

  std::vector<Edge> edges;
  std::size_t arcs = 0;
  for (GlobalId v = 0; v < n; ++v) {
    auto& nb = adj[v];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw GraphError("line " + std::to_string(line_of[v]) + ": duplicate neighbour");
    }
    arcs += nb.size();
    for (auto u : nb) {
      if (!std::binary_search(adj[u].begin(), adj[u].end(), v) && std::find(adj[u].begin(), adj[u].end(), v) == adj[u].end()) {
        throw GraphError("line " + std::to_string(line_of[v]) + ": vertex " + std::to_string(v + 1) + " lists " +
                         std::to_string(u + 1) + " but not vice versa");
      }
      if (v < u) edges.push_back({v, u});
    }
  }
  if (arcs != 2 * m) {
    throw GraphError("line " + std::to_string(header_line) + ": header announces " + std::to_string(m) + " edges, adjacency lists contain " +
                     std::to_string(arcs / 2));
  }
  return build_global(edges, std::move(weights));
}

inline std::string write_metis(const GlobalGraph& g) {
  std::string out = std::to_string(g.n()) + " " + std::to_string(g.m()) + " 10\n";
  for (GlobalId v = 0; v < g.n(); ++v) {
    out += std::to_string(g.weight(v));
    for (auto u : g.neighbors(v)) out += " " + std::to_string(u + 1);
    out += '\n';
  }
  return out;
}

// Edge list: "u v" per line, 0-indexed; a third column is accepted and ignored; lines starting
// with '#' or '%' are comments. The vertex count is the largest ID plus one.
inline GlobalGraph parse_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  GlobalId n = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto tok = detail::tokens(line);
    if (tok.empty() || tok[0][0] == '#' || tok[0][0] == '%') continue;
    if (tok.size() < 2 || tok.size() > 3) throw GraphError("line " + std::to_string(line_no) + ": expected 'u v [w]'");
    const auto u = detail::parse_uint(tok[0], line_no, "vertex");
    const auto v = detail::parse_uint(tok[1], line_no, "vertex");
    if (tok.size() == 3) detail::parse_uint(tok[2], line_no, "weight");
    if (u == v) throw GraphError("line " + std::to_string(line_no) + ": self-loop");
    if (std::max(u, v) >= kInvalidGlobal - 1) throw GraphError("line " + std::to_string(line_no) + ": vertex ID too large");
    edges.push_back({static_cast<GlobalId>(std::min(u, v)), static_cast<GlobalId>(std::max(u, v))});
    n = std::max<GlobalId>(n, static_cast<GlobalId>(std::max(u, v) + 1));
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  edges.erase(std::unique(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
  return build_global(edges, std::vector<Weight>(n, 1));
}

// ---- weights --------------------------------------------------------------------------------

struct WeightSpec {
  enum class Kind { from_graph, uniform, constant, file } kind = Kind::from_graph;
  Weight lo = 1;
  Weight hi = 1;
  std::uint64_t seed = 0;
  std::string path;
};

// "uniform:LO:HI:SEED", "const:C" or "file:PATH".
inline WeightSpec parse_weight_spec(const std::string& s) {
  WeightSpec spec;
  auto fields = [&] {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ':');) out.push_back(f);
    return out;
  }();
  auto num = [&](const std::string& f) {
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
    if (ec != std::errc() || ptr != f.data() + f.size()) throw std::invalid_argument("bad number '" + f + "' in weight spec");
    return x;
  };
  if (s.rfind("file:", 0) == 0) {
    spec.kind = WeightSpec::Kind::file;
    spec.path = s.substr(5);
  } else if (fields.size() == 4 && fields[0] == "uniform") {
    spec.kind = WeightSpec::Kind::uniform;
    spec.lo = num(fields[1]);
    spec.hi = num(fields[2]);
    spec.seed = num(fields[3]);
    if (spec.lo > spec.hi) throw std::invalid_argument("uniform weight range is empty");
  } else if (fields.size() == 2 && fields[0] == "const") {
    spec.kind = WeightSpec::Kind::constant;
    spec.lo = spec.hi = num(fields[1]);
  } else {
    throw std::invalid_argument("weight spec must be uniform:LO:HI:SEED, const:C or file:PATH");
  }
  return spec;
}

inline std::vector<Weight> uniform_weights(std::size_t n, Weight lo, Weight hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Weight> dist(lo, hi);
  std::vector<Weight> w(n);
  for (auto& x : w) x = dist(rng);
  return w;
}

inline std::vector<Weight> parse_weight_file(std::string_view text, std::size_t n) {
  std::vector<Weight> w;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto tok = detail::tokens(line);
    if (tok.empty() || tok[0][0] == '#' || tok[0][0] == '%') continue;
    if (tok.size() != 1) throw GraphError("line " + std::to_string(line_no) + ": expected one weight per line");
    w.push_back(detail::parse_uint(tok[0], line_no, "weight"));
  }
  if (w.size() != n) {
    throw GraphError("weight file has " + std::to_string(w.size()) + " weights for " + std::to_string(n) + " vertices");
  }
  return w;
}

inline std::vector<Weight> gen_weights(std::size_t n, const WeightSpec& spec) {
  switch (spec.kind) {
    case WeightSpec::Kind::uniform: return uniform_weights(n, spec.lo, spec.hi, spec.seed);
    case WeightSpec::Kind::constant: return std::vector<Weight>(n, spec.lo);
    case WeightSpec::Kind::file: return parse_weight_file(detail::read_file(spec.path), n);
    case WeightSpec::Kind::from_graph: break;
  }
  throw std::invalid_argument("weights come from the graph file");
}

inline GlobalGraph with_weights(const GlobalGraph& g, std::vector<Weight> weights) {
  DMWIS_ASSERT(weights.size() == g.n(), "weight vector does not match the graph");
  return GlobalGraph(g.offsets(), g.targets(), std::move(weights));
}

}  // namespace dmwis
