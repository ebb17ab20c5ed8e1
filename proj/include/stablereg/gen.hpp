#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stablereg/graph.hpp"

namespace stablereg {

enum class BlockKind { clique, independent };

struct GenSpec {
  enum class Kind { half_graph, clique_union, blowup, random_gnp, noisy };
  Kind kind = Kind::clique_union;
  std::size_t n = 0;  // half_graph: sides of n; random_gnp: vertices
  std::size_t count = 0;  // clique_union
  std::size_t size = 0;   // clique_union
  // blowup: template on block_sizes.size() vertices, blocks laid out contiguously
  std::vector<std::pair<std::size_t, std::size_t>> template_edges;
  std::vector<std::size_t> block_sizes;
  std::vector<BlockKind> block_kinds;
  double p = 0;  // random_gnp
  std::shared_ptr<const GenSpec> base;  // noisy
  std::size_t flip_count = 0;           // noisy
  std::uint64_t seed = 0;

  static GenSpec half_graph(std::size_t n);
  static GenSpec clique_union(std::size_t count, std::size_t size);
  static GenSpec blowup(std::vector<std::pair<std::size_t, std::size_t>> template_edges,
                        std::vector<std::size_t> block_sizes, std::vector<BlockKind> block_kinds);
  static GenSpec random_gnp(std::size_t n, double p, std::uint64_t seed);
  static GenSpec noisy(GenSpec base, std::size_t flip_count, std::uint64_t seed);

  std::size_t vertex_count() const;
  // Throws ValidationError on non-positive sizes, template ids out of range, p outside [0,1]
  // or more flips than vertex pairs.
  void validate() const;
  // Compact text form accepted by parse_gen_spec.
  std::string str() const;
};

struct Generated {
  Graph graph;
  // Intended blocks (clique_union, blowup; inherited through noisy). Empty otherwise.
  std::vector<std::vector<Vertex>> blocks;
  // intended[i][j]: value of every pair between blocks i and j (i == j: inside block i).
  std::vector<std::vector<Truth>> intended;
  // half_graph: a_i = i, b_i = n + i.
  std::size_t half_size = 0;
};

Generated generate(const GenSpec& spec);

std::string to_string(BlockKind kind);

}  // namespace stablereg
