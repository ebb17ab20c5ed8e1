#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/partition.hpp"
#include "stablereg/rng.hpp"

namespace stablereg {

namespace {

constexpr std::size_t no_parent = std::numeric_limits<std::size_t>::max();

std::uint64_t exact_pow(std::uint64_t base, std::uint64_t exponent, const char* what) {
  auto p = checked_pow(base, exponent);
  if (!p || *p > Int128(std::numeric_limits<std::int64_t>::max())) throw PreconditionError(what, "value out of range");
  return static_cast<std::uint64_t>(*p);
}

}  // namespace

BlockScan scan_blocks(const Graph& g, const std::vector<VertexSet>& blocks, const std::vector<std::size_t>& parent,
                      const std::vector<VertexSet>& parents, Ratio eps) {
  const std::size_t count = blocks.size();
  std::vector<std::size_t> block_of(g.size(), no_parent);
  std::vector<std::size_t> sizes(count);
  for (std::size_t x = 0; x < count; ++x) {
    sizes[x] = blocks[x].size();
    blocks[x].for_each([&](Vertex v) { block_of[v] = x; });
  }
  // touched[x]: (y, edges) for y > x with at least one edge, sorted by y.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> touched(count);
  std::vector<std::size_t> tally(count, 0);
  std::vector<std::size_t> seen;
  for (std::size_t x = 0; x < count; ++x) {
    blocks[x].for_each([&](Vertex a) {
      auto row = g.row(a);
      for (std::size_t w = 0; w < row.size(); ++w)
        for (Word bits = row[w]; bits != 0; bits &= bits - 1) {
          std::size_t y = block_of[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
          if (y == no_parent || y <= x) continue;
          if (tally[y]++ == 0) seen.push_back(y);
        }
    });
    std::sort(seen.begin(), seen.end());
    for (std::size_t y : seen) {
      touched[x].emplace_back(y, tally[y]);
      tally[y] = 0;
    }
    seen.clear();
  }

  BlockScan scan;
  std::map<std::pair<std::size_t, std::size_t>, bool> parent_pairs;
  for (std::size_t x = 0; x < count; ++x)
    for (auto [y, edges] : touched[x]) {
      if (edges < sizes[x] * sizes[y]) ++scan.irregular;
      if (parent[x] != parent[y]) parent_pairs[{std::min(parent[x], parent[y]), std::max(parent[x], parent[y])}] = true;
    }

  std::vector<std::vector<std::size_t>> blocks_of(parents.size());
  for (std::size_t x = 0; x < count; ++x) blocks_of[parent[x]].push_back(x);
  auto edges_between = [&](std::size_t x, std::size_t y) -> std::size_t {
    if (x > y) std::swap(x, y);
    auto& list = touched[x];
    auto it = std::lower_bound(list.begin(), list.end(), std::make_pair(y, std::size_t{0}));
    return (it != list.end() && it->first == y) ? it->second : 0;
  };
  // Parent pairs without any edge have average truth 0, which every block pair between them matches.
  // An undefined average counts every pair of the homogeneous block pairs as exceptional.
  const Threshold power = Threshold::power(eps);
  for (const auto& [key, unused] : parent_pairs) {
    auto [p, q] = key;
    MaybeTruth t = average_truth(g, parents[p], power, parents[q], power);
    for (std::size_t x : blocks_of[p])
      for (std::size_t y : blocks_of[q]) {
        std::size_t edges = edges_between(x, y);
        std::size_t full = sizes[x] * sizes[y];
        if (edges != 0 && edges != full) continue;
        if (!t || *t != truth_of(edges == full)) scan.exceptional += full;
      }
  }
  return scan;
}

ProbResult partition_prob(const Graph& g, const VertexSet& a, Ratio eps, std::size_t k_star, std::uint64_t seed,
                          const ProbOptions& options) {
  ProbResult result;
  result.eps = eps;
  result.seed = seed;
  result.k_starstar = options.k_starstar.value_or(declared_tree_bound(k_star));
  const std::size_t k = result.k_starstar;
  if (eps.num() != 1 || eps.den() < 3) throw PreconditionError("eps = 1/r with r >= 3", "eps = " + eps.str());
  const auto r = static_cast<std::uint64_t>(eps.den());
  const std::uint64_t n = a.size();
  if (k == 0) throw PreconditionError("k** >= 1", "k** = 0");
  const std::uint64_t rk = exact_pow(r, k, "r^k**");
  const std::uint64_t rk1 = exact_pow(r, k - 1, "r^(k**-1)");
  if (!less_than_power(k, n, Ratio(1, static_cast<std::int64_t>(rk))))
    throw SizingError("needs n^(eps^k**) > k**", static_cast<std::size_t>(exact_pow(k, rk, "k**^(r^k**)") + 1));

  std::uint64_t m = floor_power(n, Ratio(1, static_cast<std::int64_t>(rk)));
  auto m_star_ok = [&](std::uint64_t c) {
    auto m0 = checked_pow(c, rk1);
    if (!m0 || *m0 > Int128(n)) return false;
    return less_than_power(static_cast<std::uint64_t>(*m0), n, Ratio(static_cast<std::int64_t>(rk - 2), static_cast<std::int64_t>(rk)));
  };
  while (m > k && !m_star_ok(m)) --m;
  if (m <= k)
    throw PreconditionError("m** > k**", "no m** > " + std::to_string(k) + " with m**^(r^k**) <= n and m*/n < n^(-2eps^k**)");
  result.m_starstar = m;
  result.ms.mode = MSequence::Mode::power;
  result.ms.step = eps;
  for (std::size_t l = 0; l < k; ++l) result.ms.values.push_back(exact_pow(m, exact_pow(r, k - 1 - l, "r^l"), "m_l"));
  result.ms.validate();

  Cover cover = extract_indivisible_cover(g, a, result.ms);
  const std::vector<VertexSet>& parents = cover.pieces;
  const long double log_n = std::log(static_cast<long double>(n));
  result.fraction_target = static_cast<double>(2.0L * std::pow(static_cast<long double>(n), -1.0L / static_cast<long double>(rk)));

  for (std::size_t attempt = 0; attempt < options.retry_limit; ++attempt) {
    std::vector<VertexSet> blocks;
    std::vector<std::size_t> parent;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      auto members = parents[i].members();
      Rng rng = Rng::stream(seed, "prob-split", i * 1'000'003ULL + attempt);
      rng.shuffle(std::span<Vertex>(members));
      for (std::size_t start = 0; start + m <= members.size(); start += m) {
        blocks.emplace_back(g, std::span<const Vertex>(members).subspan(start, m));
        parent.push_back(i);
      }
    }
    BlockScan scan = scan_blocks(g, blocks, parent, parents, eps);
    const std::size_t singles = cover.remainder.size();
    const std::size_t total = blocks.size() + singles;
    result.total_pairs = total * (total - (total > 0 ? 1 : 0)) / 2;
    result.irregular_pairs = scan.irregular + singles * blocks.size() + singles * (singles - (singles > 0 ? 1 : 0)) / 2;
    result.irregular_fraction =
        result.total_pairs ? static_cast<double>(result.irregular_pairs) / static_cast<double>(result.total_pairs) : 0.0;
    result.exceptional_edges = scan.exceptional;
    result.attempts = attempt + 1;
    if (result.irregular_fraction <= result.fraction_target && scan.exceptional == 0) {
      result.partition.pieces = std::move(blocks);
      result.parent = std::move(parent);
      cover.remainder.for_each([&](Vertex v) {
        result.partition.pieces.emplace_back(g, std::span<const Vertex>(&v, 1));
        result.parent.push_back(no_parent);
      });
      result.partition.remainder = VertexSet(g);
      result.cover = parents;
      result.singleton_count = singles;
      if (!at_most_power(singles, n, eps))
        throw VerificationFailure(std::to_string(singles) + " unit pieces exceed n^eps");
      result.zeta = static_cast<double>(std::log(static_cast<long double>(m)) / log_n);
      result.zeta_below = less_than_power(m, n, Ratio(1, static_cast<std::int64_t>(rk)));
      const long double e = eps.value_ld();
      result.exponent_c = static_cast<double>(1.0L - std::pow(e, k + 1) - 2.0L * std::pow(e, 2 * k + 1));
      return result;
    }
  }
  throw RetryExhausted("irregular fraction " + std::to_string(result.irregular_fraction) + " (target " +
                       std::to_string(result.fraction_target) + ") with " + std::to_string(result.exceptional_edges) +
                       " exceptional edges after " + std::to_string(options.retry_limit) + " refinements");
}

}  // namespace stablereg
