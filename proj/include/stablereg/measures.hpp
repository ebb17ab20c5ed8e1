#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stablereg/graph.hpp"
#include "stablereg/ratio.hpp"

namespace stablereg {

// nullopt means "undefined": neither truth value is within the margin.
using MaybeTruth = std::optional<Truth>;

// counts[v] = |N(v) & A| for every vertex v.
std::vector<std::uint32_t> neighbour_counts(const Graph& g, const VertexSet& a);

// Truth value of a vertex over a set of `size` elements, `adjacent` of which it sees,
// at the given margin: t qualifies when fewer than margin*size elements disagree with t.
MaybeTruth majority_truth(std::size_t adjacent, std::size_t size, Ratio margin);

MaybeTruth trv_point(const Graph& g, Vertex b, const VertexSet& a, Ratio eps);

struct GoodnessReport {
  Ratio epsilon;
  bool is_good = false;
  Vertex worst_b = 0;
  std::size_t worst_count = 0;  // max over b of min(|N(b) & A|, |A \ N(b)|)
  std::size_t set_size = 0;
  double margin() const { return set_size ? static_cast<double>(worst_count) / static_cast<double>(set_size) : 0.0; }
};

// Worst minority over all b, independent of any margin.
GoodnessReport split_profile(const Graph& g, const VertexSet& a);
GoodnessReport check_good(const Graph& g, const VertexSet& a, Ratio eps);

struct PairUniformity {
  MaybeTruth trv;
  std::size_t exceptional_count = 0;
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  Ratio epsilon;
  Ratio zeta;
  bool is_uniform = false;
};

// Pair (A, B): a is exceptional when trv(a, B) at margin zeta is undefined or differs from
// the pair's value. An undefined trv(a, B) counts against both candidate values.
PairUniformity check_uniform_pair(const Graph& g, const VertexSet& a, const VertexSet& b, Ratio eps, Ratio zeta);
// Same computation from precomputed counts[a] = |N(a) & B| for a in A.
PairUniformity uniformity_from_counts(std::span<const std::uint32_t> counts_on_a, std::size_t b_size, Ratio eps,
                                      Ratio zeta);

// trv(B, A): the value t with fewer than eps|A| elements a whose trv(a, B) is not t.
MaybeTruth trv_set(const Graph& g, const VertexSet& b_set, const VertexSet& a, Ratio eps, Ratio zeta);

// Threshold function for indivisibility: x -> x^parameter or x -> parameter.
struct Threshold {
  enum class Kind { power, constant };
  Kind kind = Kind::power;
  Ratio parameter;

  static Threshold power(Ratio exponent) { return {Kind::power, exponent}; }
  static Threshold constant(Ratio c) { return {Kind::constant, c}; }
  // minority < f(size)
  bool admits(std::size_t minority, std::size_t size) const;
  long double value(std::size_t size) const;
  std::string str() const;
};

struct IndivisibilityReport {
  bool indivisible = false;
  Vertex worst_b = 0;
  std::size_t worst_minority = 0;
  std::size_t set_size = 0;
};
IndivisibilityReport check_indivisible(const Graph& g, const VertexSet& a, Threshold f);

// Average truth value of (A, B) for indivisible A, B: t such that fewer than fa(|A|) elements
// a have at least fb(|B|) elements b with aRb differing from t.
MaybeTruth average_truth(const Graph& g, const VertexSet& a, Threshold fa, const VertexSet& b, Threshold fb);

// Exact eps-regularity of a pair with both sides of at most 14 vertices. For each A' the
// extreme densities over B' of a fixed size come from the sorted column counts, so the
// scan is exact without enumerating B'.
bool check_regular_pair_exact(const Graph& g, const VertexSet& a, const VertexSet& b, Ratio eps);
inline constexpr std::size_t regular_pair_side_cap = 14;

// eps0 <= eps^2 / 2
bool uniform_implies_regular(Ratio eps0, Ratio eps);

struct DensityBound {
  std::size_t exceptional_edges = 0;
  double observed = 0;
  double bound = 0;
  bool passes = false;
};

// Density of pairs (a, b) in A' x B' with aRb differing from trv, against
// 1/|A|^zeta1 + 1/|B|^eps1. A' must have at least |A|^(zeta+zeta1) elements for a power
// threshold zeta, or c|A|^zeta1 for a constant threshold c; likewise for B'.
DensityBound density_bound_check(const Graph& g, const VertexSet& a_piece, Threshold a_threshold,
                                 const VertexSet& b_piece, Threshold b_threshold, const VertexSet& a_sub,
                                 const VertexSet& b_sub, Ratio zeta1, Ratio eps1, Truth trv);

}  // namespace stablereg
