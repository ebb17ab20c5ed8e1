#include "stablereg/witness_family.hpp"

#include <algorithm>

#include "stablereg/bits.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/rng.hpp"

namespace stablereg {

WitnessFamily::WitnessFamily(const Graph& g, bool singletons) : graph_(&g), singletons_(singletons) {}

std::size_t WitnessFamily::add(VertexSet set, std::string origin) {
  if (set.universe() != graph_->size()) throw ValidationError("witness belongs to a different graph");
  if (auto existing = find(set)) return *existing;
  auto counts = neighbour_counts(*graph_, set);
  return insert(std::move(set), std::move(origin), counts);
}

std::optional<std::size_t> WitnessFamily::find(const VertexSet& set) const {
  auto [lo, hi] = by_hash_.equal_range(set.bits().hash());
  for (auto it = lo; it != hi; ++it)
    if (members_[it->second].set == set) return it->second;
  return std::nullopt;
}

template <class Counts>
std::size_t WitnessFamily::insert(VertexSet set, std::string origin, const Counts& counts) {
  Member m;
  m.size = set.size();
  for (Vertex v = 0; v < graph_->size(); ++v)
    m.worst_count = std::max<std::size_t>(m.worst_count, std::min<std::size_t>(counts[v], m.size - counts[v]));
  std::size_t bytes = graph_->size() * sizeof(std::uint16_t);
  if (graph_->size() < 65536 && cached_bytes_ + bytes <= cache_limit_bytes) {
    m.counts.assign(counts.begin(), counts.end());
    cached_bytes_ += bytes;
  }
  std::size_t h = set.bits().hash();
  m.set = std::move(set);
  m.origin = std::move(origin);
  members_.push_back(std::move(m));
  by_hash_.emplace(h, members_.size() - 1);
  return members_.size() - 1;
}

void WitnessFamily::add_neighbourhoods() {
  const Graph& g = *graph_;
  const std::size_t n = g.size();
  auto neighbourhood = [&](Vertex b) {
    VertexSet nb(g);
    auto row = g.row(b);
    std::copy(row.begin(), row.end(), nb.bits().words().begin());
    return nb;
  };

  // Distinct neighbourhoods, each represented by its first vertex.
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<Vertex> reps;
  std::vector<std::size_t> rep_of(n, none);
  std::unordered_multimap<std::size_t, std::size_t> seen;
  for (Vertex b = 0; b < n; ++b) {
    if (g.degree(b) == 0) continue;
    auto row = g.row(b);
    std::size_t h = neighbourhood(b).bits().hash();
    auto [lo, hi] = seen.equal_range(h);
    for (auto it = lo; it != hi && rep_of[b] == none; ++it)
      if (std::equal(row.begin(), row.end(), g.row(reps[it->second]).begin())) rep_of[b] = it->second;
    if (rep_of[b] != none) continue;
    rep_of[b] = reps.size();
    seen.emplace(h, reps.size());
    reps.push_back(b);
  }

  if (n >= 65536 || cached_bytes_ + reps.size() * n * sizeof(std::uint16_t) > cache_limit_bytes) {
    for (Vertex b : reps) add(neighbourhood(b), "N(" + std::to_string(b) + ")");
    return;
  }

  // |N(b) & N(v)| is symmetric, so each pair of representatives is counted once.
  std::vector<std::vector<std::uint16_t>> tables(reps.size(), std::vector<std::uint16_t>(n, 0));
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i; j < reps.size(); ++j) {
      auto c = static_cast<std::uint16_t>(popcount_and(g.row(reps[i]), g.row(reps[j])));
      tables[i][reps[j]] = c;
      tables[j][reps[i]] = c;
    }
  for (Vertex v = 0; v < n; ++v) {
    if (rep_of[v] == none || reps[rep_of[v]] == v) continue;
    for (auto& table : tables) table[v] = table[reps[rep_of[v]]];
  }
  for (std::size_t i = 0; i < reps.size(); ++i) {
    VertexSet nb = neighbourhood(reps[i]);
    if (!find(nb)) insert(std::move(nb), "N(" + std::to_string(reps[i]) + ")", tables[i]);
    std::vector<std::uint16_t>().swap(tables[i]);
  }
}

void WitnessFamily::add_random_subsets(const VertexSet& ground, std::span<const std::size_t> sizes,
                                       std::size_t per_size, std::uint64_t seed, Ratio keep_margin) {
  auto pool = ground.members();
  for (std::size_t size : sizes) {
    if (size == 0 || size > pool.size()) continue;
    for (std::size_t t = 0; t < per_size; ++t) {
      Rng rng = Rng::stream(seed, "witness-subset", size * 1'000'003ULL + t);
      VertexSet subset(*graph_);
      for (auto i : rng.sample_distinct(pool.size(), size)) subset.insert(pool[i]);
      GoodnessReport profile = split_profile(*graph_, subset);
      if (below_fraction(profile.worst_count, keep_margin, profile.set_size))
        add(std::move(subset), "random(" + std::to_string(size) + "," + std::to_string(t) + ")");
    }
  }
}

std::uint32_t WitnessFamily::count(std::size_t i, Vertex v) const {
  const Member& m = members_[i];
  if (!m.counts.empty()) return m.counts[v];
  return static_cast<std::uint32_t>(neighbours_in(*graph_, v, m.set));
}

const VertexSet* witness_set(const WitnessFamily& family, WitnessRef ref) {
  return ref.kind == WitnessRef::Kind::member ? &family.member(ref.index).set : nullptr;
}

MaybeTruth witness_truth(const WitnessFamily& family, WitnessRef ref, Vertex a, Ratio zeta) {
  if (ref.kind == WitnessRef::Kind::singleton)
    return truth_of(family.graph().adjacent(a, static_cast<Vertex>(ref.index)));
  const auto& m = family.member(ref.index);
  return majority_truth(family.count(ref.index, a), m.size, zeta);
}

ExcellenceReport check_excellent(const Graph& g, const VertexSet& a, Ratio eps, Ratio zeta,
                                 const WitnessFamily& family) {
  if (&family.graph() != &g && family.graph().id() != g.id())
    throw ValidationError("witness family belongs to a different graph");
  ExcellenceReport report;
  const std::size_t size = a.size();
  if (size == 0) throw PreconditionError("|A| >= 1", "excellence of an empty set");
  if (family.has_singletons()) {
    auto counts = neighbour_counts(g, a);
    for (Vertex b = 0; b < g.size(); ++b) {
      std::size_t minority = std::min<std::size_t>(counts[b], size - counts[b]);
      if (!below_fraction(minority, eps, size)) {
        report.failing = WitnessRef{WitnessRef::Kind::singleton, b};
        return report;
      }
    }
  }
  auto members = a.members();
  std::vector<std::uint32_t> counts(members.size());
  for (std::size_t i = 0; i < family.member_count(); ++i) {
    if (!family.good_at(i, zeta)) continue;
    ++report.applicable_members;
    for (std::size_t j = 0; j < members.size(); ++j) counts[j] = family.count(i, members[j]);
    if (!uniformity_from_counts(counts, family.member(i).size, eps, zeta).trv) {
      report.failing = WitnessRef{WitnessRef::Kind::member, i};
      return report;
    }
  }
  report.excellent = true;
  return report;
}

WitnessSplit split_by_witness(const Graph& g, const VertexSet& a, const WitnessFamily& family, WitnessRef ref,
                              Ratio zeta) {
  WitnessSplit split{VertexSet(g), VertexSet(g), VertexSet(g)};
  a.for_each([&](Vertex v) {
    auto t = witness_truth(family, ref, v, zeta);
    if (!t) split.undefined.insert(v);
    else if (holds(*t)) split.one.insert(v);
    else split.zero.insert(v);
  });
  return split;
}

}  // namespace stablereg
