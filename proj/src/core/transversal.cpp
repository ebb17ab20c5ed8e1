#include "stablereg/transversal.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "stablereg/errors.hpp"
#include "stablereg/extract.hpp"
#include "stablereg/measures.hpp"
#include "stablereg/rng.hpp"

namespace stablereg {

namespace {

long double inverse_power(std::uint64_t n, Ratio exponent) {
  return std::pow(static_cast<long double>(n), -exponent.value_ld());
}

}  // namespace

void check_transversal_params(const TransversalParams& p) {
  const Ratio one(1);
  if (p.eps <= Ratio(0) || p.eps >= one) throw PreconditionError("eps in (0,1)", "eps = " + p.eps.str());
  if (p.zeta <= Ratio(0)) throw PreconditionError("zeta > 0", "zeta = " + p.zeta.str());
  if (p.xi <= Ratio(0) || p.xi >= one - p.eps || p.xi >= Ratio(1, 2))
    throw PreconditionError("0 < xi < min(1-eps, 1/2)", "xi = " + p.xi.str());
  if (Ratio(static_cast<std::int64_t>(p.c)) * p.zeta * (one - p.xi - p.eps) <= one)
    throw PreconditionError("c > 1/(zeta(1-xi-eps))", "c = " + std::to_string(p.c));
}

bool transversal_inequality(std::uint64_t n, const TransversalParams& p) {
  if (n == 0) return false;
  const Ratio one(1);
  Ratio first = one - Ratio(2) * p.xi;
  Ratio second = (one - p.xi - p.eps) * Ratio(static_cast<std::int64_t>(p.c)) - one / p.zeta;
  return inverse_power(n, first) + inverse_power(n, second) < 1.0L;
}

std::uint64_t transversal_threshold(const TransversalParams& p) {
  check_transversal_params(p);
  std::uint64_t hi = 2;
  while (!transversal_inequality(hi, p)) {
    if (hi > (std::uint64_t{1} << 62)) throw PreconditionError("transversal threshold", "exceeds 2^62");
    hi *= 2;
  }
  std::uint64_t lo = 1;  // the inequality fails at n = 1
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (transversal_inequality(mid, p) ? hi : lo) = mid;
  }
  return hi;
}

Transversal draw_transversal(std::span<const Vertex> ground, std::span<const Bits> family, std::size_t size,
                             std::size_t bound, std::uint64_t seed, std::size_t max_attempts) {
  if (size > ground.size())
    throw PreconditionError("transversal size <= |A|", std::to_string(size) + " > " + std::to_string(ground.size()));
  std::vector<Vertex> draw(size);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng = Rng::stream(seed, "transversal", attempt);
    for (auto& v : draw) v = ground[rng.below(ground.size())];
    std::sort(draw.begin(), draw.end());
    if (std::adjacent_find(draw.begin(), draw.end()) != draw.end()) continue;
    std::size_t worst = 0;
    for (const Bits& b : family) {
      std::size_t hits = 0;
      for (Vertex v : draw) hits += (v < b.size() && b.test(v)) ? 1 : 0;
      worst = std::max(worst, hits);
      if (worst > bound) break;
    }
    if (worst <= bound) return {draw, attempt + 1, worst};
  }
  throw RetryExhausted("no transversal of size " + std::to_string(size) + " with intersections <= " +
                       std::to_string(bound) + " in " + std::to_string(max_attempts) + " draws");
}

Transversal sample_transversal(std::span<const Vertex> ground, std::span<const Bits> family,
                               const TransversalParams& params, std::uint64_t seed, std::size_t max_attempts) {
  check_transversal_params(params);
  const std::uint64_t n = ground.size();
  const std::uint64_t threshold = transversal_threshold(params);
  if (n <= threshold) throw SizingError("transversal lemma needs n > " + std::to_string(threshold), threshold + 1);
  if (!at_most_power(family.size(), n, Ratio(1) / params.zeta))
    throw PreconditionError("|family| <= n^(1/zeta)", std::to_string(family.size()) + " members");
  std::unordered_set<Vertex> in_ground(ground.begin(), ground.end());
  if (in_ground.size() != ground.size()) throw ValidationError("ground set has repeated elements");
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto members = family[i].to_vector();
    for (Vertex v : members)
      if (!in_ground.count(v)) throw PreconditionError("members inside the ground set", "member " + std::to_string(i));
    if (!at_most_power(members.size(), n, params.eps))
      throw PreconditionError("|B| <= n^eps", "member " + std::to_string(i) + " has " + std::to_string(members.size()));
  }
  return draw_transversal(ground, family, floor_power(n, params.xi), params.c, seed, max_attempts);
}

void check_c_indivisible_params(const CIndivisibleParams& p, std::size_t n) {
  const Ratio one(1);
  const Ratio half(1, 2);
  if (p.k_star == 0 || p.k_starstar == 0) throw PreconditionError("k*, k** >= 1", "declared bounds must be positive");
  if (p.eps <= Ratio(0) || p.eps >= half) throw PreconditionError("eps in (0,1/2)", "eps = " + p.eps.str());
  if (p.xi <= Ratio(0) || p.xi >= half) throw PreconditionError("xi in (0,1/2)", "xi = " + p.xi.str());
  const Ratio top = p.eps.pow(static_cast<unsigned>(p.k_starstar));
  if (p.xi >= top) throw PreconditionError("xi < eps^k**", "xi = " + p.xi.str() + ", eps^k** = " + top.str());
  for (std::size_t l = 0; l <= p.k_starstar; ++l)
    if (p.xi / p.eps.pow(static_cast<unsigned>(l)) >= half)
      throw PreconditionError("xi/eps^l < 1/2", "fails at l = " + std::to_string(l));
  if (p.zeta <= Ratio(0) || p.zeta > Ratio(1, static_cast<std::int64_t>(p.k_star)))
    throw PreconditionError("0 < zeta <= 1/k*", "zeta = " + p.zeta.str());
  Ratio slack = one - p.xi / top - p.eps;
  if (slack <= Ratio(0) || Ratio(static_cast<std::int64_t>(p.c)) * p.zeta * slack <= one)
    throw PreconditionError("c > 1/(zeta(1 - xi/eps^k** - eps))", "c = " + std::to_string(p.c));
  std::uint64_t threshold = transversal_threshold({p.eps, p.zeta, p.xi, p.c});
  if (n <= threshold) throw SizingError("c-indivisible extraction needs n > " + std::to_string(threshold), threshold + 1);
}

std::vector<Bits> minority_traces(const Graph& g, const VertexSet& a) {
  std::vector<Bits> out;
  std::unordered_set<Bits, BitsHash> seen;
  const std::size_t size = a.size();
  for (Vertex b = 0; b < g.size(); ++b) {
    VertexSet side = a;
    std::size_t adjacent = neighbours_in(g, b, a);
    auto row = g.row(b);
    if (2 * adjacent <= size) side.bits().and_words(row);
    else side.bits().and_not_words(row);
    if (side.empty()) continue;
    if (seen.insert(side.bits()).second) out.push_back(side.bits());
  }
  return out;
}

CIndivisibleSet extract_c_indivisible(const Graph& g, const VertexSet& a, const CIndivisibleParams& params,
                                      std::uint64_t seed, std::size_t max_attempts) {
  const std::size_t n = a.size();
  check_c_indivisible_params(params, n);
  MSequence ms = power_sequence(n, params.eps, params.k_starstar);
  Extraction ext = extract_indivisible(g, a, ms);
  CIndivisibleSet out;
  out.level = ext.level;
  out.parent_size = ext.piece.size();
  auto traces = minority_traces(g, ext.piece);
  out.trace_family = traces.size();
  if (!at_most_power(traces.size(), out.parent_size, Ratio(1) / params.zeta))
    throw VerificationFailure("trace family of size " + std::to_string(traces.size()) + " exceeds |A_1|^(1/zeta); k* = " +
                              std::to_string(params.k_star) + " is contradicted");
  const std::size_t size = floor_power(n, params.xi);
  if (size > out.parent_size)
    throw PreconditionError("floor(n^xi) <= |A_1|", std::to_string(size) + " > " + std::to_string(out.parent_size));
  auto ground = ext.piece.members();
  Transversal t = draw_transversal(ground, traces, size, params.c - 1, seed, max_attempts);
  out.attempts = t.attempts;
  out.set = VertexSet(g, t.elements);
  auto report = check_indivisible(g, out.set, Threshold::constant(Ratio(static_cast<std::int64_t>(params.c))));
  if (!report.indivisible)
    throw VerificationFailure("sampled set is not c-indivisible (vertex " + std::to_string(report.worst_b) + ")");
  return out;
}

}  // namespace stablereg
