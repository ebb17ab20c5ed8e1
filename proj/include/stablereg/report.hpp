#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stablereg/cli.hpp"
#include "stablereg/detect.hpp"
#include "stablereg/extract.hpp"
#include "stablereg/partition.hpp"

namespace stablereg {

// Translates internal vertex ids back to the ids used in the input file.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::int64_t> original) : original_(std::move(original)) {}
  std::int64_t operator()(Vertex v) const { return original_.empty() ? static_cast<std::int64_t>(v) : original_[v]; }
  // Internal id of an input id; throws ValidationError when unknown.
  Vertex internal(std::int64_t id, std::size_t vertex_count) const;

 private:
  std::vector<std::int64_t> original_;
};

Json truth_json(MaybeTruth t);
Json ids_json(std::span<const Vertex> vertices, const IdMap& ids);
Json set_json(const VertexSet& set, const IdMap& ids);
Json order_witness_json(const OrderWitness& w, const IdMap& ids);
Json tree_witness_json(const TreeWitness& w, const IdMap& ids);
Json independence_witness_json(const IndependenceWitness& w, const IdMap& ids);
Json split_tree_json(const SplitTree& tree, const IdMap& ids);
Json m_sequence_json(const MSequence& ms);
Json partition_json(const Partition& p, const IdMap& ids);
Json pair_matrix_json(const PairMatrix& m, Ratio eps, Ratio zeta);

// Parses a partition object ({"pieces": [[ids...]...], "remainder": [ids...]}) against g.
Partition partition_from_json(const Json& j, const Graph& g, const IdMap& ids);
// Reads the matrix written by pair_matrix_json.
PairMatrix pair_matrix_from_json(const Json& j);

}  // namespace stablereg
