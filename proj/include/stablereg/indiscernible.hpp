#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stablereg/graph.hpp"

namespace stablereg {

// x_0 R x_1, or phi^sigma_{k,m}(x_0..x_{k-1}) = exists y with
//   sigma = 1: x_l R y for l < m and not x_l R y for m <= l < k,
//   sigma = 2: not x_l R y for l < m and x_l R y for m <= l < k.
struct DeltaFormula {
  enum class Kind { edge, phi };
  Kind kind = Kind::edge;
  int sigma = 1;
  std::size_t k = 2;
  std::size_t m = 0;

  std::size_t arity() const { return kind == Kind::edge ? 2 : k; }
  std::string name() const;
};

// The edge formula and phi^sigma_{k,m} for m <= k, sigma in {1,2}.
struct DeltaSet {
  std::size_t k = 2;
  std::vector<DeltaFormula> formulas;
  // Every formula is read on a prefix of a tuple of this length.
  std::size_t arity() const { return k < 2 ? 2 : k; }
};
DeltaSet delta_set(std::size_t k);

// Throws ValidationError unless |args| equals the formula's arity.
bool eval_delta_formula(const Graph& g, const DeltaFormula& f, std::span<const Vertex> args);

// Bit i is formula i evaluated on the prefix of `args` of its arity. |args| >= delta.arity().
std::uint64_t delta_type(const Graph& g, const DeltaSet& delta, std::span<const Vertex> args);

struct IndiscernibilityReport {
  bool indiscernible = true;
  std::size_t formula = 0;  // index into DeltaSet::formulas
  std::vector<std::size_t> first_tuple;
  std::vector<std::size_t> second_tuple;
};

inline constexpr std::size_t indiscernible_length_cap = 40;
inline constexpr std::size_t indiscernible_arity_cap = 4;

// Every formula takes the same value on all increasing index tuples of its arity. Refuses
// (PreconditionError) sequences longer than the length cap or k above the arity cap.
IndiscernibilityReport check_indiscernible(const Graph& g, std::span<const Vertex> seq, const DeltaSet& delta,
                                           std::size_t length_cap = indiscernible_length_cap,
                                           std::size_t arity_cap = indiscernible_arity_cap);

struct IndiscernibleExtraction {
  std::vector<std::size_t> indices;  // increasing positions into the input sequence
  std::vector<std::size_t> stage_lengths;
};

// Type-tree extraction: stage m fixes the last m elements as parameters, arranges the rest
// into a tree where an element sits below a node when both have the same type over the
// node's ancestors, and keeps a longest branch (leftmost on ties). The result drops the
// elements that cannot start a full-arity tuple and is verified with check_indiscernible
// whenever the caps allow.
IndiscernibleExtraction extract_indiscernible(const Graph& g, std::span<const Vertex> seq, const DeltaSet& delta);

// min(|{i : a_i R b}|, |{i : not a_i R b}|)
std::size_t minority_side(const Graph& g, std::span<const Vertex> seq, Vertex b);

// Positions i of `rows` adjacent to at least `threshold` members of `columns`.
std::vector<std::size_t> heavy_positions(const Graph& g, std::span<const Vertex> rows, std::span<const Vertex> columns,
                                         std::size_t threshold);

}  // namespace stablereg
