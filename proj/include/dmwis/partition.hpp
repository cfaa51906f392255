#pragma once

#include <string>
#include <vector>

#include "dmwis/global_graph.hpp"
#include "dmwis/types.hpp"

namespace dmwis {

enum class PartitionStrategy { contiguous_by_edges, contiguous_by_vertices, hash };

// 1D vertex partition: every vertex is owned by exactly one PE.
struct Partition {
  std::vector<Rank> assignment;             // vertex -> owning PE
  std::vector<std::vector<GlobalId>> blocks;  // PE -> owned vertices, ascending

  [[nodiscard]] Rank num_pes() const { return static_cast<Rank>(blocks.size()); }
  [[nodiscard]] Rank rank_of(GlobalId v) const { return assignment[v]; }

  friend bool operator==(const Partition&, const Partition&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline Partition partition_from_assignment(std::vector<Rank> assignment, Rank p) {
  Partition part;
  part.blocks.assign(p, {});
  for (GlobalId v = 0; v < assignment.size(); ++v) {
    if (assignment[v] >= p) throw GraphError("assignment rank out of range");
    part.blocks[assignment[v]].push_back(v);
  }
  part.assignment = std::move(assignment);
  return part;
}

inline Partition partition(const GlobalGraph& g, Rank p, PartitionStrategy strategy,
                           std::uint64_t seed = 0) {
  if (p == 0) throw GraphError("partition requires at least one PE");
  const std::size_t n = g.n();
  std::vector<Rank> assignment(n, 0);

  switch (strategy) {
    case PartitionStrategy::contiguous_by_vertices: {
      for (Rank b = 0; b < p; ++b) {
        const std::size_t begin = n * b / p;
        const std::size_t end = n * (b + 1) / p;
        for (std::size_t v = begin; v < end; ++v) assignment[v] = b;
      }
      break;
    }
    case PartitionStrategy::contiguous_by_edges: {
      const std::size_t total = g.num_arcs();
      if (total == 0) return partition(g, p, PartitionStrategy::contiguous_by_vertices, seed);
      Rank block = 0;
      std::size_t prefix = 0;
      for (GlobalId v = 0; v < n; ++v) {
        assignment[v] = block;
        prefix += g.degree(v);
        // close the block once its share of arcs is reached
        while (block + 1 < p && prefix * p >= static_cast<std::size_t>(block + 1) * total) ++block;
      }
      break;
    }
    case PartitionStrategy::hash: {
      for (GlobalId v = 0; v < n; ++v) {
        assignment[v] = static_cast<Rank>(detail::splitmix64(v ^ detail::splitmix64(seed)) % p);
      }
      break;
    }
  }
  return partition_from_assignment(std::move(assignment), p);
}

inline std::string to_string(PartitionStrategy s) {
  switch (s) {
    case PartitionStrategy::contiguous_by_edges: return "contig-e";
    case PartitionStrategy::contiguous_by_vertices: return "contig-v";
    case PartitionStrategy::hash: return "hash";
  }
  return "?";
}

}  // namespace dmwis
