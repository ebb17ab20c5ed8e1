#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/graph.hpp"
#include "stablereg/measures.hpp"
#include "stablereg/ratio.hpp"
#include "stablereg/witness_family.hpp"

namespace stablereg {

// Decreasing sizes m_0 > ... > m_{k-1}, one per tree level.
// power: m_{l+1} = floor(m_l^step). ratio: m_{l+1} <= step * m_l, each a multiple of the last.
struct MSequence {
  enum class Mode { power, ratio };
  Mode mode = Mode::power;
  Ratio step;
  std::vector<std::size_t> values;

  std::size_t levels() const { return values.size(); }
  // Size threshold below level l: m_{l+1}, or past the last level floor(m_{k-1}^step) (power mode).
  std::size_t next_size(std::size_t level) const;
  // Ratio used for excellence at level l (ratio mode): m_{l+1}/m_l, and `step` at the last level.
  Ratio level_ratio(std::size_t level) const;
  // Throws PreconditionError if the defining relation fails somewhere.
  void validate() const;
};

// m_0 given, m_{l+1} = floor(m_l^eps), for k_starstar levels.
MSequence power_sequence(std::size_t m0, Ratio eps, std::size_t k_starstar);

// Certificate of a tree extraction. Node labels are bit strings; "" is the root.
struct SplitTree {
  struct Node {
    std::string label;
    std::vector<Vertex> members;
    std::optional<Vertex> splitter_vertex;
    std::optional<WitnessRef> splitter;
    std::string splitter_name;
  };
  std::vector<Node> nodes;
  std::size_t depth = 0;
  std::string result_label;
};

// The extraction tree reached the declared tree bound: the configuration found is a tree
// witness of that height, which the declared bound says cannot exist.
class DepthOverflow : public Error {
 public:
  DepthOverflow(const std::string& what, TreeWitness witness, bool witness_valid, SplitTree tree)
      : Error(what), witness_(std::move(witness)), valid_(witness_valid), tree_(std::move(tree)) {}
  const TreeWitness& witness() const { return witness_; }
  bool witness_valid() const { return valid_; }
  const SplitTree& tree() const { return tree_; }

 private:
  TreeWitness witness_;
  bool valid_;
  SplitTree tree_;
};

struct Extraction {
  VertexSet piece;
  std::size_t level = 0;
  SplitTree tree;
};

// Binary splitting tree on A (|A| = m_0): a node at level l is split by the lowest-id b whose
// two sides each have at least next_size(l) members; children keep their first next_size(l)
// members. The first node without a splitter is returned.
Extraction extract_indivisible(const Graph& g, const VertexSet& a, const MSequence& ms);

struct Cover {
  std::vector<VertexSet> pieces;  // size-ascending
  std::vector<std::size_t> levels;
  VertexSet remainder;
};
// Repeats extract_indivisible on the first m_0 vertices of the remainder until fewer than m_0 remain.
Cover extract_indivisible_cover(const Graph& g, const VertexSet& a, const MSequence& ms);

// Witness-driven tree (excellence). Without `ms` the root is A and levels use margin eps
// throughout; with a ratio-mode `ms` the root is the first m_0 elements of A, level l uses
// ms.level_ratio(l), and children keep their first m_{l+1} members. Nodes are visited level
// by level and the first excellent node is returned.
Extraction extract_excellent(const Graph& g, const VertexSet& a, Ratio eps, const WitnessFamily& family,
                             std::size_t k_starstar, const MSequence* ms = nullptr);

// Builds a tree witness from leaf representatives: for each internal node, the lowest unused
// vertex with the required adjacency to the leaves below it.
std::optional<TreeWitness> complete_tree_witness(const Graph& g, std::size_t height,
                                                 const std::vector<std::vector<Vertex>>& leaf_sets,
                                                 const std::vector<std::optional<Vertex>>& preferred);

}  // namespace stablereg
