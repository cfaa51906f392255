#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmwis/types.hpp"

namespace dmwis {

struct Edge {
  GlobalId u = 0;
  GlobalId v = 0;
};

// Undirected vertex-weighted graph in adjacency-array form. Every edge {u,v} is
// stored as the two arcs (u,v) and (v,u); neighbor lists are sorted ascending.
class GlobalGraph {
 public:
  GlobalGraph() = default;

  GlobalGraph(std::vector<std::size_t> offsets, std::vector<GlobalId> targets,
              std::vector<Weight> weights)
      : offsets_(std::move(offsets)), targets_(std::move(targets)), weights_(std::move(weights)) {}

  [[nodiscard]] std::size_t n() const { return weights_.size(); }
  [[nodiscard]] std::size_t num_arcs() const { return targets_.size(); }
  [[nodiscard]] std::size_t m() const { return targets_.size() / 2; }

  [[nodiscard]] std::span<const GlobalId> neighbors(GlobalId v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  [[nodiscard]] std::size_t degree(GlobalId v) const { return offsets_[v + 1] - offsets_[v]; }
  [[nodiscard]] Weight weight(GlobalId v) const { return weights_[v]; }
  [[nodiscard]] const std::vector<Weight>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<std::size_t>& offsets() const { return offsets_; }
  [[nodiscard]] const std::vector<GlobalId>& targets() const { return targets_; }

  [[nodiscard]] std::size_t max_degree() const {
    std::size_t delta = 0;
    for (GlobalId v = 0; v < n(); ++v) delta = std::max(delta, degree(v));
    return delta;
  }

  [[nodiscard]] bool adjacent(GlobalId u, GlobalId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // Checked ω(U).
  template <typename Range>
  [[nodiscard]] Weight weight_of(const Range& vertices) const {
    Weight sum = 0;
    for (auto v : vertices) sum = checked_add(sum, weights_[v]);
    return sum;
  }

  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m());
    for (GlobalId u = 0; u < n(); ++u) {
      for (auto v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  friend bool operator==(const GlobalGraph&, const GlobalGraph&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<GlobalId> targets_;
  std::vector<Weight> weights_;
};

// Canonicalizes an arbitrary arc list: drops self-loops and duplicates, symmetrizes, sorts.
inline GlobalGraph build_global(std::span<const Edge> edges, std::vector<Weight> weights) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> degree(n + 1, 0);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") references a vertex outside [0," + std::to_string(n) + ")");
    }
    if (e.u == e.v) continue;
    ++degree[e.u];
    ++degree[e.v];
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degree[v];
  std::vector<GlobalId> targets(offsets[n]);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    targets[fill[e.u]++] = e.v;
    targets[fill[e.v]++] = e.u;
  }

  // sort + dedup per vertex, then compact
  std::vector<std::size_t> new_offsets(n + 1, 0);
  std::size_t write = 0;
  for (std::size_t v = 0; v < n; ++v) {
    auto first = targets.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
    auto last = targets.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) targets[write++] = *it;
    new_offsets[v + 1] = write;
  }
  targets.resize(write);
  return GlobalGraph(std::move(new_offsets), std::move(targets), std::move(weights));
}

// Signed-weight entry point for callers holding untrusted input.
inline GlobalGraph build_global(std::span<const Edge> edges, std::span<const std::int64_t> weights) {
  std::vector<Weight> w(weights.size());
  for (std::size_t v = 0; v < weights.size(); ++v) {
    if (weights[v] < 0) {
      throw GraphError("vertex " + std::to_string(v) + " has negative weight " +
                       std::to_string(weights[v]));
    }
    w[v] = static_cast<Weight>(weights[v]);
  }
  return build_global(edges, std::move(w));
}

// Full scan of the adjacency invariants; returns a description of the first violation.
inline std::string check_graph(const GlobalGraph& g) {
  for (GlobalId v = 0; v < g.n(); ++v) {
    auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] >= g.n()) return "arc target out of range at " + std::to_string(v);
      if (nb[k] == v) return "self-loop at " + std::to_string(v);
      if (k > 0 && nb[k - 1] >= nb[k]) return "unsorted or duplicate arc at " + std::to_string(v);
      if (!g.adjacent(nb[k], v)) {
        return "missing reverse arc " + std::to_string(nb[k]) + "->" + std::to_string(v);
      }
    }
  }
  return {};
}

inline GlobalGraph induced_subgraph(const GlobalGraph& g, std::span<const GlobalId> vertices,
                                    std::vector<GlobalId>* id_map = nullptr) {
  std::vector<GlobalId> local(g.n(), kInvalidGlobal);
  for (std::size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = static_cast<GlobalId>(k);
  std::vector<Edge> edges;
  std::vector<Weight> weights;
  weights.reserve(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    weights.push_back(g.weight(vertices[k]));
    for (auto u : g.neighbors(vertices[k])) {
      if (local[u] != kInvalidGlobal && local[u] > k) {
        edges.push_back({static_cast<GlobalId>(k), local[u]});
      }
    }
  }
  if (id_map) id_map->assign(vertices.begin(), vertices.end());
  return build_global(edges, std::move(weights));
}

}  // namespace dmwis
