#include <algorithm>
#include <set>

#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/parallel.hpp"
#include "stablereg/partition.hpp"
#include "stablereg/rng.hpp"

namespace stablereg {

namespace {

struct SequenceShape {
  Ratio eps3;
  std::size_t q;
  std::uint64_t q_power;  // q^(k**-1)
  std::uint64_t c_min;
};

SequenceShape shape_of(Ratio eps, std::size_t k_starstar, std::optional<Ratio> eps3_opt) {
  if (eps <= Ratio(0) || eps >= Ratio(1, 2)) throw PreconditionError("eps in (0,1/2)", "eps = " + eps.str());
  if (k_starstar == 0 || k_starstar > 30) throw PreconditionError("k** in [1,30]", std::to_string(k_starstar));
  Ratio eps3 = eps3_opt.value_or(eps / Ratio(4));
  if (eps3 <= Ratio(0) || eps3 >= eps) throw PreconditionError("0 < eps3 < eps", "eps3 = " + eps3.str());
  SequenceShape s;
  s.eps3 = eps3;
  s.q = static_cast<std::size_t>((eps3.den() + eps3.num() - 1) / eps3.num());
  auto qp = checked_pow(s.q, k_starstar - 1);
  if (!qp || *qp > Int128(1) << 62) throw PreconditionError("q^(k**-1) in range", "overflow");
  s.q_power = static_cast<std::uint64_t>(*qp);
  std::uint64_t three_over = static_cast<std::uint64_t>(3 * eps.den() / eps.num());
  s.c_min = std::max<std::uint64_t>(k_starstar, three_over) + 1;
  return s;
}

VertexSet first_members(const Graph& g, const std::vector<Vertex>& members, std::size_t from, std::size_t count) {
  VertexSet out(g);
  for (std::size_t i = from; i < from + count; ++i) out.insert(members[i]);
  return out;
}

}  // namespace

std::size_t m_sequence_threshold(Ratio eps, std::size_t k_starstar, std::optional<Ratio> eps3) {
  SequenceShape s = shape_of(eps, k_starstar, eps3);
  Int128 p = eps.num();
  Int128 d = eps.den();
  Int128 need = Int128(s.c_min) * s.q_power * (3 * d + p);
  return static_cast<std::size_t>((need + p - 1) / p);
}

MSequenceBuild build_m_sequence(Ratio eps, std::size_t n, std::size_t k_starstar, std::optional<Ratio> eps3) {
  SequenceShape s = shape_of(eps, k_starstar, eps3);
  if (eps * Ratio(std::int64_t{1} << k_starstar) > Ratio(1))
    throw PreconditionError("eps <= 2^-k**", "eps = " + eps.str() + ", k** = " + std::to_string(k_starstar));
  Int128 p = eps.num();
  Int128 d = eps.den();
  auto c_max = static_cast<std::uint64_t>((p * Int128(n)) / ((3 * d + p) * Int128(s.q_power)));
  if (c_max < s.c_min)
    throw SizingError("m** needs c > max(k**, 3/eps) with q^(k**-1) c <= eps n/(3+eps)",
                      m_sequence_threshold(eps, k_starstar, eps3));
  MSequenceBuild b;
  b.eps = eps;
  b.eps2 = eps / Ratio(3);
  b.eps3 = s.eps3;
  b.q = s.q;
  b.m_starstar = c_max;
  b.ms.mode = MSequence::Mode::ratio;
  b.ms.step = s.eps3;
  for (std::size_t l = 0; l < k_starstar; ++l)
    b.ms.values.push_back(static_cast<std::size_t>(*checked_pow(s.q, k_starstar - l - 1)) * c_max);
  b.ms.validate();
  return b;
}

Ratio stable_piece_bound(Ratio eps, std::size_t k_starstar) {
  return (Ratio(3) + eps) * (Ratio(8) / eps).pow(static_cast<unsigned>(k_starstar));
}

PairMatrix pairwise_uniformity(const Graph& g, const std::vector<VertexSet>& pieces, Ratio eps, Ratio zeta) {
  const std::size_t count = pieces.size();
  PairMatrix matrix(count, std::vector<PairEntry>(count));
  std::vector<std::vector<Vertex>> members(count);
  for (std::size_t i = 0; i < count; ++i) members[i] = pieces[i].members();
  parallel_for(count, [&](std::size_t j) {
    std::vector<std::uint32_t> gathered;
    auto counts = neighbour_counts(g, pieces[j]);
    for (std::size_t i = 0; i < count; ++i) {
      if (i == j) continue;
      gathered.resize(members[i].size());
      for (std::size_t t = 0; t < members[i].size(); ++t) gathered[t] = counts[members[i][t]];
      auto u = uniformity_from_counts(gathered, members[j].size(), eps, zeta);
      std::size_t edges = 0;
      for (std::uint32_t c : gathered) edges += c;
      matrix[i][j] = {u.trv, u.exceptional_count, u.is_uniform, edges};
    }
  });
  return matrix;
}

StableResult partition_stable(const Graph& g, const VertexSet& a, Ratio eps, std::size_t k_star, std::uint64_t seed,
                              const StableOptions& options) {
  StableResult result;
  result.eps = eps;
  result.k_star = k_star;
  result.seed = seed;
  result.k_starstar = options.k_starstar.value_or(declared_tree_bound(k_star));
  const std::size_t k = result.k_starstar;
  if (k == 0 || k > 30) throw PreconditionError("k** in [1,30]", std::to_string(k));
  const Ratio boundary(1, std::int64_t{1} << k);
  if (eps > boundary) throw PreconditionError("eps < 2^-k**", "eps = " + eps.str() + ", 2^-k** = " + boundary.str());
  if (eps == boundary) {
    if (!options.allow_boundary)
      throw PreconditionError("eps < 2^-k**", "eps equals 2^-k**; the boundary option proceeds without the bound claim");
    result.bound_claimed = false;
  }
  result.build = build_m_sequence(eps, a.size(), k, options.eps3);
  const MSequenceBuild& build = result.build;
  const std::size_t m_starstar = build.m_starstar;
  const std::size_t m0 = build.ms.values.front();
  result.bound_value = stable_piece_bound(eps, k);

  WitnessFamily family(g);
  family.add_neighbourhoods();
  std::set<std::size_t> sizes(build.ms.values.begin(), build.ms.values.end());
  std::vector<std::size_t> size_menu(sizes.begin(), sizes.end());
  family.add_random_subsets(a, size_menu, options.subsets_per_size, seed, eps);

  std::size_t round_cap = 1;
  for (std::size_t round = 0; round < round_cap; ++round) {
    result.refinement_rounds = round + 1;
    VertexSet rest = a;
    std::vector<VertexSet> extracted;
    result.extraction_levels.clear();
    while (rest.size() >= m0) {
      Extraction ext = extract_excellent(g, rest, build.eps3, family, k, &build.ms);
      rest -= ext.piece;
      result.extraction_levels.push_back(ext.level);
      extracted.push_back(std::move(ext.piece));
    }

    std::vector<VertexSet> blocks;
    result.split_attempts.assign(extracted.size(), 0);
    for (std::size_t i = 0; i < extracted.size(); ++i) {
      auto members = extracted[i].members();
      const std::size_t parts = members.size() / m_starstar;
      bool done = false;
      for (std::size_t attempt = 0; attempt < options.retry_limit && !done; ++attempt) {
        result.split_attempts[i] = attempt + 1;
        auto order = members;
        if (parts > 1) {
          Rng rng = Rng::stream(seed, "split", i * 1'000'003ULL + attempt);
          rng.shuffle(std::span<Vertex>(order));
        }
        std::vector<VertexSet> trial;
        for (std::size_t t = 0; t < parts; ++t) trial.push_back(first_members(g, order, t * m_starstar, m_starstar));
        done = std::all_of(trial.begin(), trial.end(), [&](const VertexSet& block) {
          return check_excellent(g, block, build.eps2, build.eps2, family).excellent;
        });
        if (done) std::move(trial.begin(), trial.end(), std::back_inserter(blocks));
        if (parts <= 1 && !done) break;
      }
      if (!done)
        throw RetryExhausted("piece " + std::to_string(i) + " (size " + std::to_string(members.size()) +
                             ") has no split into eps2-excellent blocks of size " + std::to_string(m_starstar) +
                             " after " + std::to_string(result.split_attempts[i]) + " draws");
    }
    if (blocks.empty()) throw SizingError("no piece was extracted", m_sequence_threshold(eps, k, options.eps3));
    if (round == 0) round_cap = k * blocks.size();

    std::size_t next = 0;
    rest.for_each([&](Vertex v) {
      blocks[next].insert(v);
      next = (next + 1) % blocks.size();
    });

    const std::size_t before = family.member_count();
    for (std::size_t i = 0; i < blocks.size(); ++i) family.add(blocks[i], "piece(" + std::to_string(i) + ")");

    result.pairwise = pairwise_uniformity(g, blocks, eps, eps);
    result.excellence.clear();
    result.goodness.clear();
    bool all_ok = is_equitable(blocks);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      result.excellence.push_back(check_excellent(g, blocks[i], eps, eps, family));
      result.goodness.push_back(check_good(g, blocks[i], eps));
      all_ok = all_ok && result.excellence.back().excellent;
      for (std::size_t j = 0; j < blocks.size(); ++j)
        if (i != j && !result.pairwise[i][j].uniform) all_ok = false;
    }
    result.partition.pieces = std::move(blocks);
    result.partition.remainder = VertexSet(g);
    result.piece_count = result.partition.pieces.size();
    result.family_size = family.member_count();
    result.bound_holds = Ratio(static_cast<std::int64_t>(result.piece_count)) <= result.bound_value;
    if (all_ok) {
      if (result.bound_claimed && !result.bound_holds)
        throw VerificationFailure("piece count " + std::to_string(result.piece_count) + " exceeds " +
                                  result.bound_value.str());
      return result;
    }
    if (family.member_count() == before) break;
  }

  std::string detail = "after " + std::to_string(result.refinement_rounds) + " refinement round(s)";
  for (std::size_t i = 0; i < result.partition.pieces.size(); ++i) {
    if (!result.excellence[i].excellent) {
      detail += "; piece " + std::to_string(i) + " is not eps-excellent";
      break;
    }
    for (std::size_t j = 0; j < result.partition.pieces.size(); ++j)
      if (i != j && !result.pairwise[i][j].uniform) {
        detail += "; pair (" + std::to_string(i) + "," + std::to_string(j) + ") is not (eps,eps)-uniform";
        i = result.partition.pieces.size() - 1;
        break;
      }
  }
  throw VerificationFailure("stable partition did not verify " + detail);
}

StableVerification verify_stable(const Graph& g, const VertexSet& ground, const Partition& p, Ratio eps,
                                 std::optional<std::size_t> k_starstar) {
  StableVerification v;
  auto fail = [&](const std::string& what) {
    if (v.first_failure.empty()) v.first_failure = what;
  };
  try {
    p.validate(ground);
    v.valid_partition = true;
  } catch (const ValidationError& e) {
    fail(std::string("partition: ") + e.what());
    return v;
  }
  v.remainder_empty = p.remainder.empty();
  if (!v.remainder_empty) fail("remainder: " + std::to_string(p.remainder.size()) + " vertices outside the pieces");
  v.equitable = is_equitable(p.pieces);
  if (!v.equitable) fail("equitable: piece sizes differ by more than one");

  v.pairwise = pairwise_uniformity(g, p.pieces, eps, eps);
  v.all_uniform = true;
  for (std::size_t i = 0; i < p.pieces.size() && v.all_uniform; ++i)
    for (std::size_t j = 0; j < p.pieces.size(); ++j)
      if (i != j && !v.pairwise[i][j].uniform) {
        v.all_uniform = false;
        v.failing_pair = {i, j};
        fail("uniformity: pair (" + std::to_string(i) + "," + std::to_string(j) + ") is not (eps,eps)-uniform");
        break;
      }

  WitnessFamily family(g);
  family.add_neighbourhoods();
  for (std::size_t i = 0; i < p.pieces.size(); ++i) family.add(p.pieces[i], "piece(" + std::to_string(i) + ")");
  v.all_excellent = true;
  for (std::size_t i = 0; i < p.pieces.size(); ++i) {
    if (p.pieces[i].empty() || check_excellent(g, p.pieces[i], eps, eps, family).excellent) continue;
    v.all_excellent = false;
    v.failing_piece = i;
    fail("excellence: piece " + std::to_string(i) + " is not eps-excellent");
    break;
  }

  if (k_starstar) {
    v.bound_checked = true;
    v.bound_value = stable_piece_bound(eps, *k_starstar);
    v.within_bound = Ratio(static_cast<std::int64_t>(p.pieces.size())) <= v.bound_value;
    if (!v.within_bound) fail("bound: " + std::to_string(p.pieces.size()) + " pieces exceed " + v.bound_value.str());
  }
  return v;
}

}  // namespace stablereg
