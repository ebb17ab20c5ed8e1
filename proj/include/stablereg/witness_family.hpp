#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stablereg/graph.hpp"
#include "stablereg/measures.hpp"
#include "stablereg/ratio.hpp"

namespace stablereg {

// A singleton {b} or the index of a stored member.
struct WitnessRef {
  enum class Kind { singleton, member };
  Kind kind = Kind::singleton;
  std::size_t index = 0;
  friend bool operator==(const WitnessRef&, const WitnessRef&) = default;
};

// Candidate witnesses B for excellence checks. Each stored member keeps its worst minority
// count, so "B is zeta-good" is decided exactly for any zeta, and the counts |N(v) & B|
// for every vertex v.
class WitnessFamily {
 public:
  struct Member {
    VertexSet set;
    std::size_t size = 0;
    std::size_t worst_count = 0;
    std::string origin;
    std::vector<std::uint16_t> counts;  // empty: computed on demand
  };

  explicit WitnessFamily(const Graph& g, bool singletons = true);

  const Graph& graph() const { return *graph_; }
  bool has_singletons() const { return singletons_; }
  std::size_t member_count() const { return members_.size(); }
  const Member& member(std::size_t i) const { return members_[i]; }

  // Adds B unless an equal set is already present. Returns the member index.
  std::size_t add(VertexSet set, std::string origin);
  // Every distinct open neighbourhood N(b).
  void add_neighbourhoods();
  // per_size seeded random subsets of `ground` for each size, kept when good at `keep_margin`.
  void add_random_subsets(const VertexSet& ground, std::span<const std::size_t> sizes, std::size_t per_size,
                          std::uint64_t seed, Ratio keep_margin);

  bool good_at(std::size_t i, Ratio zeta) const {
    return below_fraction(members_[i].worst_count, zeta, members_[i].size);
  }
  std::uint32_t count(std::size_t i, Vertex v) const;

  // Members are cached as |N(v) & B| tables until this many bytes are in use.
  static constexpr std::size_t cache_limit_bytes = std::size_t{1} << 30;

 private:
  std::optional<std::size_t> find(const VertexSet& set) const;
  template <class Counts>
  std::size_t insert(VertexSet set, std::string origin, const Counts& counts);

  const Graph* graph_;
  bool singletons_;
  std::vector<Member> members_;
  std::unordered_multimap<std::size_t, std::size_t> by_hash_;
  std::size_t cached_bytes_ = 0;
};

struct ExcellenceReport {
  bool excellent = false;
  std::optional<WitnessRef> failing;
  std::size_t applicable_members = 0;
};

// A is eps-excellent relative to the family: for every witness B that is zeta-good,
// trv(B, A) is defined with trv(a, B) taken at margin zeta. Singletons reduce to eps-goodness.
ExcellenceReport check_excellent(const Graph& g, const VertexSet& a, Ratio eps, Ratio zeta,
                                 const WitnessFamily& family);

// Splits A by trv(a, B) at margin zeta.
struct WitnessSplit {
  VertexSet zero;
  VertexSet one;
  VertexSet undefined;
};
WitnessSplit split_by_witness(const Graph& g, const VertexSet& a, const WitnessFamily& family, WitnessRef ref,
                              Ratio zeta);

// trv(a, B) for a single a.
MaybeTruth witness_truth(const WitnessFamily& family, WitnessRef ref, Vertex a, Ratio zeta);
const VertexSet* witness_set(const WitnessFamily& family, WitnessRef ref);

}  // namespace stablereg
