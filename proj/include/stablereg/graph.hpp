#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stablereg/bits.hpp"

namespace stablereg {

enum class Truth : std::uint8_t { zero = 0, one = 1 };

inline Truth truth_of(bool value) { return value ? Truth::one : Truth::zero; }
inline bool holds(Truth t) { return t == Truth::one; }
inline int as_int(Truth t) { return t == Truth::one ? 1 : 0; }

// Simple undirected graph on 0..n-1, irreflexive and symmetric, stored as bit rows.
class Graph {
 public:
  Graph() = default;

  std::size_t size() const { return n_; }
  std::size_t stride() const { return stride_; }
  std::uint64_t id() const { return id_; }

  bool adjacent(Vertex u, Vertex v) const { return (rows_[u * stride_ + v / 64] >> (v % 64)) & 1U; }
  std::span<const Word> row(Vertex v) const { return {rows_.data() + v * stride_, stride_}; }
  std::size_t degree(Vertex v) const { return degrees_[v]; }
  std::size_t edge_count() const { return edges_; }
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  // Subgraph induced on `vertices`, relabelled 0..k-1 in the given order.
  Graph induced(std::span<const Vertex> vertices) const;

 private:
  friend class GraphBuilder;
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::size_t edges_ = 0;
  std::uint64_t id_ = 0;
  std::vector<Word> rows_;
  std::vector<std::uint32_t> degrees_;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n);
  std::size_t size() const { return n_; }
  // Rejects loops and out-of-range ids; duplicate edges are idempotent.
  GraphBuilder& add_edge(Vertex u, Vertex v);
  GraphBuilder& toggle_edge(Vertex u, Vertex v);
  bool adjacent(Vertex u, Vertex v) const { return (rows_[u * stride_ + v / 64] >> (v % 64)) & 1U; }
  Graph build() &&;

 private:
  void check(Vertex u, Vertex v) const;
  std::size_t n_;
  std::size_t stride_;
  std::vector<Word> rows_;
};

// Subset of the vertices of one graph.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(const Graph& g) : graph_id_(g.id()), bits_(g.size()) {}
  VertexSet(const Graph& g, std::span<const Vertex> members);
  static VertexSet all(const Graph& g);

  std::uint64_t graph_id() const { return graph_id_; }
  std::size_t universe() const { return bits_.size(); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  bool contains(Vertex v) const { return v < bits_.size() && bits_.test(v); }
  void insert(Vertex v) { bits_.set(v); }
  void erase(Vertex v) { bits_.reset(v); }

  const Bits& bits() const { return bits_; }
  Bits& bits() { return bits_; }
  std::vector<Vertex> members() const { return bits_.to_vector(); }
  template <class Fn>
  void for_each(Fn&& fn) const {
    bits_.for_each(std::forward<Fn>(fn));
  }

  bool subset_of(const VertexSet& other) const;
  bool disjoint_from(const VertexSet& other) const;
  VertexSet& operator|=(const VertexSet& other);
  VertexSet& operator-=(const VertexSet& other);
  VertexSet& operator&=(const VertexSet& other);

  friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.bits_ == b.bits_; }

 private:
  std::uint64_t graph_id_ = 0;
  Bits bits_;
};

// Number of neighbours of v inside s.
inline std::size_t neighbours_in(const Graph& g, Vertex v, const VertexSet& s) {
  return popcount_and(g.row(v), s.bits().words());
}

// Pieces plus an explicit remainder.
struct Partition {
  std::vector<VertexSet> pieces;
  VertexSet remainder;

  std::vector<std::size_t> piece_sizes() const;
  // Throws ValidationError unless pieces and remainder are pairwise disjoint and cover `ground`.
  void validate(const VertexSet& ground) const;
};

// Every two piece sizes differ by at most one.
bool is_equitable(std::span<const VertexSet> pieces);

struct LoadedGraph {
  Graph graph;
  // original_ids[v] is the id used for v in the input file.
  std::vector<std::int64_t> original_ids;
  bool identity_ids = true;
};

// Edge list: '#' or '%' comments, optional header "n <count>", then "u v" lines.
// With compact_ids the ids seen in the file are renumbered densely in increasing order.
LoadedGraph read_edge_list(std::istream& in, bool compact_ids = false);
LoadedGraph load_edge_list(const std::string& path, bool compact_ids = false);
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace stablereg
