#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dmwis/global_graph.hpp"
#include "dmwis/io.hpp"

namespace dmwis {

// G(n, q) with uniform weights in [lo, hi].
inline GlobalGraph generate_gnp(std::size_t n, double q, std::uint64_t seed, Weight lo = 1, Weight hi = 200) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(q);
  std::vector<Edge> edges;
  for (GlobalId u = 0; u < n; ++u) {
    for (GlobalId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.push_back({u, v});
    }
  }
  return build_global(edges, uniform_weights(n, lo, hi, seed ^ 0x5eedULL));
}

// Random geometric graph: n points in the unit square, edges between points at distance at most
// sqrt(avg_degree / (n π)). Vertex IDs follow the row-major order of a grid of cells with that
// side length, so contiguous ID ranges are spatially compact.
inline GlobalGraph generate_rgg(std::size_t n, double avg_degree, std::uint64_t seed, Weight lo = 1,
                                Weight hi = 200) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  struct Point {
    double x, y;
  };
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {coord(rng), coord(rng)};
  const double r = n > 0 ? std::sqrt(avg_degree / (static_cast<double>(n) * std::numbers::pi)) : 1.0;
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::floor(1.0 / r)));
  auto cell_of = [&](const Point& p) {
    const auto cx = std::min(cells - 1, static_cast<std::size_t>(p.x * static_cast<double>(cells)));
    const auto cy = std::min(cells - 1, static_cast<std::size_t>(p.y * static_cast<double>(cells)));
    return std::pair{cy, cx};
  };
  std::sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) {
    const auto ca = cell_of(a);
    const auto cb = cell_of(b);
    if (ca != cb) return ca < cb;
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  });
  std::vector<std::size_t> start(cells * cells + 1, 0);
  for (const auto& p : pts) {
    auto [cy, cx] = cell_of(p);
    ++start[cy * cells + cx + 1];
  }
  for (std::size_t c = 0; c < cells * cells; ++c) start[c + 1] += start[c];

  std::vector<Edge> edges;
  const double r2 = r * r;
  for (GlobalId u = 0; u < n; ++u) {
    auto [cy, cx] = cell_of(pts[u]);
    for (std::size_t y = cy == 0 ? 0 : cy - 1; y <= std::min(cells - 1, cy + 1); ++y) {
      for (std::size_t x = cx == 0 ? 0 : cx - 1; x <= std::min(cells - 1, cx + 1); ++x) {
        for (std::size_t v = start[y * cells + x]; v < start[y * cells + x + 1]; ++v) {
          if (v <= u) continue;
          const double dx = pts[u].x - pts[v].x;
          const double dy = pts[u].y - pts[v].y;
          if (dx * dx + dy * dy <= r2) edges.push_back({u, static_cast<GlobalId>(v)});
        }
      }
    }
  }
  return build_global(edges, uniform_weights(n, lo, hi, seed ^ 0x5eedULL));
}

}  // namespace dmwis
