#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablereg/graph.hpp"

namespace stablereg {

// a_i R b_j  iff  i < j, all 2k vertices distinct.
struct OrderWitness {
  std::vector<Vertex> a;
  std::vector<Vertex> b;
  std::size_t length() const { return a.size(); }
};

// Full binary tree of height h. Leaves are indexed by eta in [0, 2^h) read as a bit string
// with the first branch as the most significant bit; internal nodes use heap numbering
// (root 1, children 2i and 2i+1). A leaf below the 1-child of an internal node is adjacent
// to it, a leaf below its 0-child is not. All vertices distinct.
struct TreeWitness {
  std::size_t height = 0;
  std::vector<Vertex> leaves;
  std::vector<Vertex> internal;  // index 0 unused
};

// a_l R b_u  iff  l in u, where u ranges over bit masks of [0, k). All vertices distinct.
struct IndependenceWitness {
  std::vector<Vertex> a;
  std::vector<Vertex> b;
};

bool is_order_witness(const Graph& g, const OrderWitness& w);
bool is_tree_witness(const Graph& g, const TreeWitness& w);
bool is_independence_witness(const Graph& g, const IndependenceWitness& w);

// Bit string of a heap-numbered internal node, or of a leaf index at the given height.
std::string node_label(std::size_t heap_index);
std::string leaf_label(std::size_t leaf, std::size_t height);

enum class SearchStatus { found, none, budget_exhausted };

template <class W>
struct SearchResult {
  SearchStatus status = SearchStatus::none;
  std::optional<W> witness;
  std::uint64_t nodes = 0;
};

struct SearchOptions {
  std::uint64_t budget = 100'000'000;
  // Search on a twin-reduced copy of the graph (exact, see compress_twins).
  bool compress_twins = false;
};

SearchResult<OrderWitness> find_order_witness(const Graph& g, std::size_t k, const SearchOptions& options = {});
SearchResult<TreeWitness> find_tree_witness(const Graph& g, std::size_t height, const SearchOptions& options = {});
SearchResult<IndependenceWitness> find_independence_witness(const Graph& g, std::size_t k,
                                                            const SearchOptions& options = {});

// Smallest k with no order witness of length k, scanning k = 1..k_max.
// certified == false means every k <= k_max has a witness and value == k_max + 1 is only a lower bound.
struct OrderBound {
  std::size_t value = 0;
  bool certified = false;
  std::optional<OrderWitness> witness_below;
  std::uint64_t nodes = 0;
};
OrderBound minimal_order_bound(const Graph& g, std::size_t k_max, const SearchOptions& options = {});

struct TreeBound {
  std::size_t value = 0;
  bool certified = false;
  std::optional<TreeWitness> witness_below;
  std::uint64_t nodes = 0;
};
TreeBound tree_bound(const Graph& g, std::size_t h_max, const SearchOptions& options = {});

// Largest integer strictly below 2^(k+2) - 2, used as a declared tree bound when the search is infeasible.
std::size_t declared_tree_bound(std::size_t k_star);

// Number of distinct sets N(b) & A over all vertices b.
std::size_t trace_count(const Graph& g, const VertexSet& a);
// sum_{i <= k} C(m, i), saturating.
std::uint64_t shatter_bound(std::uint64_t m, std::size_t k);

// Keeps at most `cap` lowest-id vertices of every class of vertices with equal open
// neighbourhoods, and likewise for equal closed neighbourhoods. Any witness using at most
// `cap` vertices survives, since swapping a twin for another twin preserves every relation
// among distinct vertices.
struct TwinReduction {
  Graph graph;
  std::vector<Vertex> original;  // reduced id -> id in the input graph
};
TwinReduction compress_twins(const Graph& g, std::size_t cap);

}  // namespace stablereg
