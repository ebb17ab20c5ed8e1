#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablereg/extract.hpp"
#include "stablereg/graph.hpp"
#include "stablereg/measures.hpp"
#include "stablereg/ratio.hpp"
#include "stablereg/witness_family.hpp"

namespace stablereg {

// ---------------------------------------------------------------------------------------------
// Stable regularity: equitable, every pair (eps, eps)-uniform, constant piece count.

struct MSequenceBuild {
  Ratio eps;
  Ratio eps2;  // eps/3
  Ratio eps3;  // eps/4 by default
  std::size_t q = 0;  // ceil(1/eps3)
  std::size_t m_starstar = 0;
  MSequence ms;  // ratio mode, values q^(k**-l-1) m**
};

// Least n for which build_m_sequence succeeds.
std::size_t m_sequence_threshold(Ratio eps, std::size_t k_starstar, std::optional<Ratio> eps3 = std::nullopt);

// m** is the largest c with c > k**, c > 3/eps and q^(k**-1) c <= eps n/(3+eps). Throws
// PreconditionError when eps > 2^-k** and SizingError when no such c exists.
MSequenceBuild build_m_sequence(Ratio eps, std::size_t n, std::size_t k_starstar, std::optional<Ratio> eps3 = std::nullopt);

struct StableOptions {
  std::optional<std::size_t> k_starstar;  // declared; otherwise 2^(k*+2) - 3
  std::optional<Ratio> eps3;              // default eps/4
  std::size_t retry_limit = 64;
  std::size_t subsets_per_size = 32;
  // Proceed at eps = 2^-k** without claiming the piece-count bound.
  bool allow_boundary = false;
};

struct PairEntry {
  MaybeTruth trv;
  std::size_t exceptions = 0;
  bool uniform = false;
  std::size_t edges = 0;  // e(A_i, A_j)
};
using PairMatrix = std::vector<std::vector<PairEntry>>;  // [i][j], diagonal unused

struct StableResult {
  Partition partition;
  Ratio eps;
  std::size_t k_star = 0;
  std::size_t k_starstar = 0;
  MSequenceBuild build;
  std::size_t piece_count = 0;
  PairMatrix pairwise;
  std::vector<ExcellenceReport> excellence;
  std::vector<GoodnessReport> goodness;
  Ratio bound_value;  // (3+eps)(8/eps)^k**
  bool bound_claimed = true;
  bool bound_holds = false;
  std::uint64_t seed = 0;
  std::size_t refinement_rounds = 0;
  std::size_t family_size = 0;
  std::vector<std::size_t> extraction_levels;
  std::vector<std::size_t> split_attempts;  // per extracted piece
};

// Extraction of excellent pieces, seeded random split into m**-blocks, round-robin remainder,
// then exact verification; failing pairs feed their pieces back as witnesses.
StableResult partition_stable(const Graph& g, const VertexSet& a, Ratio eps, std::size_t k_star, std::uint64_t seed,
                              const StableOptions& options = {});

// (3+eps)(8/eps)^k
Ratio stable_piece_bound(Ratio eps, std::size_t k_starstar);

// Ordered pair matrix: entry [i][j] is the (eps, zeta)-uniformity of (A_i, A_j).
PairMatrix pairwise_uniformity(const Graph& g, const std::vector<VertexSet>& pieces, Ratio eps, Ratio zeta);

// Clause-by-clause recomputation of a stable partition from scratch.
struct StableVerification {
  bool valid_partition = false;
  bool remainder_empty = false;
  bool equitable = false;
  bool all_uniform = false;
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
  bool all_excellent = false;
  std::optional<std::size_t> failing_piece;
  bool bound_checked = false;
  bool within_bound = false;
  Ratio bound_value;
  PairMatrix pairwise;
  std::string first_failure;  // empty when every clause holds
  bool passed() const { return first_failure.empty(); }
};
StableVerification verify_stable(const Graph& g, const VertexSet& ground, const Partition& p, Ratio eps,
                                 std::optional<std::size_t> k_starstar);

// ---------------------------------------------------------------------------------------------
// Probabilistic partition: pieces of size m** = floor(n^zeta) or 1.

struct ProbOptions {
  std::optional<std::size_t> k_starstar;
  std::size_t retry_limit = 64;
};

struct ProbResult {
  Partition partition;  // unit pieces are part of `pieces`
  Ratio eps;
  std::size_t k_starstar = 0;
  std::size_t m_starstar = 0;
  MSequence ms;
  double zeta = 0;
  bool zeta_below = false;  // m** < n^(eps^k**)
  std::size_t singleton_count = 0;
  std::size_t irregular_pairs = 0;
  std::size_t total_pairs = 0;
  double irregular_fraction = 0;
  double fraction_target = 0;  // 2/n^(eps^k**)
  std::size_t exceptional_edges = 0;
  double exponent_c = 0;  // 1 - eps^(k**+1) - 2 eps^(2k**+1)
  std::size_t attempts = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> parent;  // piece -> cover piece, or SIZE_MAX for singletons
  std::vector<VertexSet> cover;     // the indivisible pieces the blocks were cut from
};

struct BlockScan {
  std::size_t irregular = 0;    // block pairs with 0 < e(C_x, C_y) < |C_x||C_y|
  std::size_t exceptional = 0;  // pairs on complete/empty block pairs disagreeing with their parents' average truth
};
// Exact scan of a refinement: blocks[x] lies inside parents[parent[x]].
BlockScan scan_blocks(const Graph& g, const std::vector<VertexSet>& blocks, const std::vector<std::size_t>& parent,
                      const std::vector<VertexSet>& parents, Ratio eps);

ProbResult partition_prob(const Graph& g, const VertexSet& a, Ratio eps, std::size_t k_star, std::uint64_t seed,
                          const ProbOptions& options = {});

// ---------------------------------------------------------------------------------------------
// c-indivisible pieces.

struct CIndivisibleOptions {
  std::optional<std::size_t> k_starstar;
  std::size_t max_attempts = 1000;
};

struct CIndivisibleResult {
  Partition partition;
  std::size_t piece_size = 0;  // floor(n^(theta zeta))
  MSequence ms;
  std::size_t remainder_bound = 0;  // floor(n^(theta/eps^(k**-1)))
  bool remainder_within_bound = false;
  std::vector<std::size_t> levels;
  std::vector<std::size_t> attempts;
  std::uint64_t seed = 0;
};

CIndivisibleResult partition_c_indivisible(const Graph& g, const VertexSet& a, Ratio eps, Ratio zeta, Ratio theta,
                                           std::size_t c, std::size_t k_star, std::uint64_t seed,
                                           const CIndivisibleOptions& options = {});

// ---------------------------------------------------------------------------------------------
// Indiscernible pieces.

struct IndiscerniblePair {
  std::size_t i = 0;
  std::size_t j = 0;
  Truth trv = Truth::zero;
  std::optional<Vertex> omitted_i;
  std::optional<Vertex> omitted_j;
  std::size_t bad_rows = 0;
  std::size_t bad_columns = 0;
  std::size_t exceptional_edges = 0;
  double density = 0;
  double density_bound = 0;
  bool passes = false;
};

struct IndiscernibleResult {
  Partition partition;
  std::vector<std::vector<Vertex>> sequences;  // indiscernible part of each piece, in order
  std::vector<std::optional<Vertex>> appended;
  std::vector<bool> indiscernible_verified;
  std::vector<bool> homogeneous;  // complete or empty after omitting at most one element
  std::vector<IndiscerniblePair> pairs;
  std::size_t target_pieces = 0;
  bool partial = false;
  // Every piece homogeneous, every verified sequence indiscernible and every pair passing.
  bool all_verified = false;
  std::uint64_t seed = 0;
};

IndiscernibleResult partition_indiscernible(const Graph& g, const VertexSet& a, std::size_t n2, std::size_t k_star,
                                            std::uint64_t seed);

// Some truth value t and omission of at most one element per side such that all but <= bound
// rows have <= bound mismatches, and likewise for columns.
IndiscerniblePair check_indiscernible_pair(const Graph& g, const std::vector<Vertex>& a, const std::vector<Vertex>& b,
                                           std::size_t bound);
// Complete or empty after omitting at most one element.
bool homogeneous_after_omission(const Graph& g, const std::vector<Vertex>& piece);

}  // namespace stablereg
