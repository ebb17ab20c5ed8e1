#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "stablereg/gen.hpp"
#include "stablereg/graph.hpp"

namespace stablereg::testing {

inline Graph from_edges(std::size_t n, std::initializer_list<std::pair<Vertex, Vertex>> edges) {
  GraphBuilder builder(n);
  for (auto [u, v] : edges) builder.add_edge(u, v);
  return std::move(builder).build();
}

inline Graph empty_graph(std::size_t n) { return GraphBuilder(n).build(); }

inline Graph complete_graph(std::size_t n) {
  GraphBuilder builder(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) builder.add_edge(u, v);
  return std::move(builder).build();
}

inline Graph path_graph(std::size_t n) {
  GraphBuilder builder(n);
  for (Vertex v = 1; v < n; ++v) builder.add_edge(v - 1, v);
  return std::move(builder).build();
}

inline Graph star_graph(std::size_t leaves) {
  GraphBuilder builder(leaves + 1);
  for (Vertex v = 1; v <= leaves; ++v) builder.add_edge(0, v);
  return std::move(builder).build();
}

inline Graph half_graph(std::size_t n) { return generate(GenSpec::half_graph(n)).graph; }
inline Graph clique_union(std::size_t count, std::size_t size) { return generate(GenSpec::clique_union(count, size)).graph; }
inline Graph gnp(std::size_t n, double p, std::uint64_t seed) { return generate(GenSpec::random_gnp(n, p, seed)).graph; }

inline VertexSet range_set(const Graph& g, Vertex first, Vertex last) {
  VertexSet s(g);
  for (Vertex v = first; v < last; ++v) s.insert(v);
  return s;
}

inline VertexSet make_set(const Graph& g, std::initializer_list<Vertex> members) {
  VertexSet s(g);
  for (Vertex v : members) s.insert(v);
  return s;
}

}  // namespace stablereg::testing
