#pragma once

// Synthetic instances for tests and the acceptance suite. Everything is
// generated from a seed so the suite needs no data files.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "detpart/hypergraph.h"
#include "detpart/random.h"

namespace detpart::testing {

struct Instance {
  std::string name;
  Hypergraph hg;
};

inline Hypergraph make_hypergraph(std::size_t n, std::vector<std::vector<VertexId>> edges,
                                  std::vector<Weight> edge_weights = {}, std::vector<Weight> vertex_weights = {}) {
  std::vector<std::vector<VertexId>> kept;
  std::vector<Weight> kept_weights;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto& pins = edges[e];
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    if (pins.size() < 2) continue;
    kept.push_back(std::move(pins));
    if (!edge_weights.empty()) kept_weights.push_back(edge_weights[e]);
  }
  return Hypergraph::from_edges(n, kept, std::move(kept_weights), std::move(vertex_weights));
}

// The four-vertex example used throughout: e0 = {0,1,2}, e1 = {2,3}.
inline Hypergraph running_example(Weight w0 = 1) {
  return Hypergraph::from_edges(4, {{0, 1, 2}, {2, 3}}, {w0, 1});
}

// Uniform random hypergraph; edge sizes in [2, max_size].
inline Hypergraph random_hypergraph(std::size_t n, std::size_t m, std::size_t max_size, std::uint64_t seed,
                                    bool weighted = false) {
  Rng rng(seed);
  std::vector<std::vector<VertexId>> edges(m);
  std::vector<Weight> ew, vw;
  for (auto& e : edges) {
    const std::size_t size = 2 + rng.below(std::max<std::size_t>(1, std::min(max_size, n) - 1));
    for (std::size_t p = 0; p < size; ++p) e.push_back(static_cast<VertexId>(rng.below(n)));
    if (weighted) ew.push_back(1 + static_cast<Weight>(rng.below(5)));
  }
  if (weighted) {
    for (std::size_t v = 0; v < n; ++v) vw.push_back(1 + static_cast<Weight>(rng.below(4)));
  }
  return make_hypergraph(n, std::move(edges), std::move(ew), std::move(vw));
}

// Row-net model of a 2D five-point stencil: one hyperedge per cell holding
// the cell and its grid neighbours.
inline Hypergraph grid_stencil(std::size_t w, std::size_t h) {
  std::vector<std::vector<VertexId>> edges;
  auto id = [&](std::size_t x, std::size_t y) { return static_cast<VertexId>(y * w + x); };
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::vector<VertexId> e{id(x, y)};
      if (x > 0) e.push_back(id(x - 1, y));
      if (x + 1 < w) e.push_back(id(x + 1, y));
      if (y > 0) e.push_back(id(x, y - 1));
      if (y + 1 < h) e.push_back(id(x, y + 1));
      edges.push_back(std::move(e));
    }
  }
  return make_hypergraph(w * h, std::move(edges));
}

// Seven-point stencil on an s^3 torus.
inline Hypergraph torus_stencil(std::size_t s) {
  std::vector<std::vector<VertexId>> edges;
  auto id = [&](std::size_t x, std::size_t y, std::size_t z) {
    return static_cast<VertexId>(((z % s) * s + (y % s)) * s + (x % s));
  };
  for (std::size_t z = 0; z < s; ++z) {
    for (std::size_t y = 0; y < s; ++y) {
      for (std::size_t x = 0; x < s; ++x) {
        edges.push_back({id(x, y, z), id(x + 1, y, z), id(x + s - 1, y, z), id(x, y + 1, z), id(x, y + s - 1, z),
                         id(x, y, z + 1), id(x, y, z + s - 1)});
      }
    }
  }
  return make_hypergraph(s * s * s, std::move(edges));
}

// Banded sparse matrix, row-net model.
inline Hypergraph banded(std::size_t n, std::size_t row_size, std::size_t band, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<VertexId>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges[i].push_back(static_cast<VertexId>(i));
    for (std::size_t p = 1; p < row_size; ++p) {
      const std::size_t lo = i >= band ? i - band : 0;
      const std::size_t hi = std::min(n - 1, i + band);
      edges[i].push_back(static_cast<VertexId>(lo + rng.below(hi - lo + 1)));
    }
  }
  return make_hypergraph(n, std::move(edges));
}

// Chain of cliques: each clique is one hyperedge plus its pairs; neighbouring
// cliques share a light 2-pin edge.
inline Hypergraph path_of_cliques(std::size_t cliques, std::size_t size) {
  std::vector<std::vector<VertexId>> edges;
  std::vector<Weight> weights;
  for (std::size_t c = 0; c < cliques; ++c) {
    const VertexId base = static_cast<VertexId>(c * size);
    std::vector<VertexId> all;
    for (std::size_t a = 0; a < size; ++a) {
      all.push_back(base + static_cast<VertexId>(a));
      for (std::size_t b = a + 1; b < size; ++b) {
        edges.push_back({base + static_cast<VertexId>(a), base + static_cast<VertexId>(b)});
        weights.push_back(2);
      }
    }
    edges.push_back(all);
    weights.push_back(3);
    if (c + 1 < cliques) {
      edges.push_back({base + static_cast<VertexId>(size - 1), base + static_cast<VertexId>(size)});
      weights.push_back(1);
    }
  }
  return make_hypergraph(cliques * size, std::move(edges), std::move(weights));
}

// Planted communities: most edges stay inside one community.
inline Hypergraph planted(std::size_t n, std::size_t communities, std::size_t m, double p_inside,
                          std::uint64_t seed, bool weighted = false) {
  Rng rng(seed);
  const std::size_t per = n / communities;
  std::vector<std::vector<VertexId>> edges(m);
  std::vector<Weight> ew, vw;
  for (auto& e : edges) {
    const std::size_t size = 2 + rng.below(5);
    const std::size_t c = rng.below(communities);
    for (std::size_t p = 0; p < size; ++p) {
      const bool inside = static_cast<double>(rng.below(1000)) < p_inside * 1000.0;
      e.push_back(static_cast<VertexId>(inside ? c * per + rng.below(per) : rng.below(n)));
    }
    if (weighted) ew.push_back(1 + static_cast<Weight>(rng.below(3)));
  }
  if (weighted) {
    for (std::size_t v = 0; v < n; ++v) vw.push_back(1 + static_cast<Weight>(rng.below(3)));
  }
  return make_hypergraph(n, std::move(edges), std::move(ew), std::move(vw));
}

// Heavy-tailed edge sizes over a locality-biased vertex order.
inline Hypergraph powerlaw(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<VertexId>> edges(m);
  for (auto& e : edges) {
    std::size_t size = 2;
    while (size < 48 && rng.below(100) < 55) size += 1 + size / 4;
    const std::size_t centre = rng.below(n);
    const std::size_t spread = 20 + size * 8;
    for (std::size_t p = 0; p < size; ++p) {
      const std::size_t offset = rng.below(2 * spread + 1);
      e.push_back(static_cast<VertexId>((centre + n + offset - spread) % n));
    }
  }
  return make_hypergraph(n, std::move(edges));
}

// Ten structurally different instances between ~3k and ~45k pins.
inline std::vector<Instance> desk_suite() {
  std::vector<Instance> suite;
  suite.push_back({"grid_40x40", grid_stencil(40, 40)});
  suite.push_back({"grid_90x60", grid_stencil(90, 60)});
  suite.push_back({"torus_12", torus_stencil(12)});
  suite.push_back({"banded_3000", banded(3000, 6, 40, 11)});
  suite.push_back({"banded_7000", banded(7000, 5, 120, 12)});
  suite.push_back({"cliques_120x6", path_of_cliques(120, 6)});
  suite.push_back({"planted_2000", planted(2000, 16, 3000, 0.9, 13)});
  suite.push_back({"planted_w_5000", planted(5000, 40, 7000, 0.85, 14, true)});
  suite.push_back({"random_1500", random_hypergraph(1500, 1200, 5, 15)});
  suite.push_back({"powerlaw_4000", powerlaw(4000, 2500, 16)});
  return suite;
}

}  // namespace detpart::testing
