#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stablereg/bits.hpp"
#include "stablereg/graph.hpp"
#include "stablereg/ratio.hpp"

namespace stablereg {

struct TransversalParams {
  Ratio eps;
  Ratio zeta;
  Ratio xi;
  std::size_t c = 0;
};

// Throws PreconditionError unless eps in (0,1), zeta > 0, 0 < xi < min(1-eps, 1/2) and
// c > 1/(zeta(1-xi-eps)).
void check_transversal_params(const TransversalParams& p);

// 1/n^(1-2xi) + 1/n^((1-xi-eps)c - 1/zeta) < 1
bool transversal_inequality(std::uint64_t n, const TransversalParams& p);

// Least n for which the inequality holds (it is monotone in n once the parameters are valid).
std::uint64_t transversal_threshold(const TransversalParams& p);

struct Transversal {
  std::vector<Vertex> elements;  // sorted
  std::size_t attempts = 0;
  std::size_t max_intersection = 0;
};

// Draws sequences of `size` elements of `ground` uniformly with replacement until one has
// distinct entries and meets every family member in at most `bound` places. Throws
// RetryExhausted after max_attempts draws.
Transversal draw_transversal(std::span<const Vertex> ground, std::span<const Bits> family, std::size_t size,
                             std::size_t bound, std::uint64_t seed, std::size_t max_attempts);

inline constexpr std::size_t transversal_default_attempts = 1000;

// |U| = floor(n^xi) with |U & B| <= c for every B in the family, n = |ground|. Checks that
// each member lies inside the ground set with at most n^eps elements, that there are at
// most n^(1/zeta) members, the parameter constraints, and n > transversal_threshold.
Transversal sample_transversal(std::span<const Vertex> ground, std::span<const Bits> family,
                               const TransversalParams& params, std::uint64_t seed,
                               std::size_t max_attempts = transversal_default_attempts);

struct CIndivisibleParams {
  Ratio eps;
  Ratio xi;
  Ratio zeta;
  std::size_t c = 0;
  std::size_t k_star = 0;
  std::size_t k_starstar = 0;
};

// Throws PreconditionError naming the first violated constraint: eps in (0,1/2); xi in (0,1/2)
// with xi < eps^k** and xi/eps^l < 1/2 for l <= k**; zeta <= 1/k*;
// c > 1/(zeta(1 - xi/eps^k** - eps)); n > transversal_threshold(eps, zeta, xi, c).
void check_c_indivisible_params(const CIndivisibleParams& p, std::size_t n);

struct CIndivisibleSet {
  VertexSet set;
  std::size_t level = 0;       // level of the power-indivisible set it was drawn from
  std::size_t parent_size = 0;
  std::size_t trace_family = 0;
  std::size_t attempts = 0;
};

// Power-indivisible extraction from A (m_0 = |A|), then a transversal of size floor(n^xi)
// meeting every minority trace of that set in fewer than c places. The result is verified
// c-indivisible.
CIndivisibleSet extract_c_indivisible(const Graph& g, const VertexSet& a, const CIndivisibleParams& params,
                                      std::uint64_t seed, std::size_t max_attempts = transversal_default_attempts);

// The minority side of N(b) & A for every b, deduplicated.
std::vector<Bits> minority_traces(const Graph& g, const VertexSet& a);

}  // namespace stablereg
