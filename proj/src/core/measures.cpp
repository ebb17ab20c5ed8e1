#include "stablereg/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stablereg/errors.hpp"

namespace stablereg {

namespace {

void require_margin(Ratio margin, const char* name) {
  if (margin <= Ratio(0) || margin >= Ratio(1))
    throw PreconditionError(std::string(name) + " in (0,1)", std::string(name) + " = " + margin.str());
}

void require_same_graph(const Graph& g, const VertexSet& s) {
  if (s.universe() != g.size()) throw ValidationError("vertex set does not belong to this graph");
}

}  // namespace

std::vector<std::uint32_t> neighbour_counts(const Graph& g, const VertexSet& a) {
  require_same_graph(g, a);
  std::vector<std::uint32_t> counts(g.size(), 0);
  std::size_t degree_sum = 0;
  a.for_each([&](Vertex v) { degree_sum += g.degree(v); });
  if (degree_sum < g.size() * g.stride() * 8) {
    // Sparse side: walk the rows of A. The graph is symmetric, so this counts N(v) & A.
    a.for_each([&](Vertex u) {
      auto row = g.row(u);
      for (std::size_t w = 0; w < row.size(); ++w)
        for (Word bits = row[w]; bits != 0; bits &= bits - 1)
          ++counts[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
    });
  } else {
    for (Vertex v = 0; v < g.size(); ++v) counts[v] = static_cast<std::uint32_t>(neighbours_in(g, v, a));
  }
  return counts;
}

MaybeTruth majority_truth(std::size_t adjacent, std::size_t size, Ratio margin) {
  std::size_t against_one = size - adjacent;
  bool one = below_fraction(against_one, margin, size);
  bool zero = below_fraction(adjacent, margin, size);
  if (one && zero) return against_one <= adjacent ? Truth::one : Truth::zero;
  if (one) return Truth::one;
  if (zero) return Truth::zero;
  return std::nullopt;
}

MaybeTruth trv_point(const Graph& g, Vertex b, const VertexSet& a, Ratio eps) {
  require_same_graph(g, a);
  if (a.empty()) throw PreconditionError("|A| >= 1", "empty set");
  return majority_truth(neighbours_in(g, b, a), a.size(), eps);
}

GoodnessReport split_profile(const Graph& g, const VertexSet& a) {
  GoodnessReport report;
  report.set_size = a.size();
  auto counts = neighbour_counts(g, a);
  for (Vertex b = 0; b < g.size(); ++b) {
    std::size_t minority = std::min<std::size_t>(counts[b], report.set_size - counts[b]);
    if (minority > report.worst_count || (b == 0 && minority == report.worst_count)) {
      report.worst_count = minority;
      report.worst_b = b;
    }
  }
  return report;
}

GoodnessReport check_good(const Graph& g, const VertexSet& a, Ratio eps) {
  require_margin(eps, "eps");
  GoodnessReport report = split_profile(g, a);
  report.epsilon = eps;
  report.is_good = below_fraction(report.worst_count, eps, report.set_size);
  return report;
}

PairUniformity uniformity_from_counts(std::span<const std::uint32_t> counts_on_a, std::size_t b_size, Ratio eps,
                                      Ratio zeta) {
  PairUniformity out;
  out.a_size = counts_on_a.size();
  out.b_size = b_size;
  out.epsilon = eps;
  out.zeta = zeta;
  std::size_t ones = 0, zeros = 0, undefined = 0;
  for (std::uint32_t c : counts_on_a) {
    auto t = majority_truth(c, b_size, zeta);
    if (!t) ++undefined;
    else if (*t == Truth::one) ++ones;
    else ++zeros;
  }
  std::size_t against_one = zeros + undefined;
  std::size_t against_zero = ones + undefined;
  bool one = below_fraction(against_one, eps, out.a_size);
  bool zero = below_fraction(against_zero, eps, out.a_size);
  if (one && (!zero || against_one <= against_zero)) {
    out.trv = Truth::one;
    out.exceptional_count = against_one;
  } else if (zero) {
    out.trv = Truth::zero;
    out.exceptional_count = against_zero;
  } else {
    out.exceptional_count = std::min(against_one, against_zero);
  }
  out.is_uniform = out.trv.has_value();
  return out;
}

PairUniformity check_uniform_pair(const Graph& g, const VertexSet& a, const VertexSet& b, Ratio eps, Ratio zeta) {
  require_same_graph(g, a);
  require_same_graph(g, b);
  require_margin(eps, "eps");
  require_margin(zeta, "zeta");
  if (a.empty() || b.empty()) throw PreconditionError("nonempty sides", "pair sides must be nonempty");
  std::vector<std::uint32_t> counts;
  counts.reserve(a.size());
  a.for_each([&](Vertex v) { counts.push_back(static_cast<std::uint32_t>(neighbours_in(g, v, b))); });
  return uniformity_from_counts(counts, b.size(), eps, zeta);
}

MaybeTruth trv_set(const Graph& g, const VertexSet& b_set, const VertexSet& a, Ratio eps, Ratio zeta) {
  return check_uniform_pair(g, a, b_set, eps, zeta).trv;
}

bool Threshold::admits(std::size_t minority, std::size_t size) const {
  if (kind == Kind::constant) return below_fraction(minority, parameter, 1);
  return less_than_power(minority, size, parameter);
}

long double Threshold::value(std::size_t size) const {
  if (kind == Kind::constant) return parameter.value_ld();
  return std::pow(static_cast<long double>(size), parameter.value_ld());
}

std::string Threshold::str() const {
  return (kind == Kind::constant ? "constant " : "power ") + parameter.str();
}

IndivisibilityReport check_indivisible(const Graph& g, const VertexSet& a, Threshold f) {
  if (f.kind == Threshold::Kind::power && (f.parameter <= Ratio(0) || f.parameter >= Ratio(1)))
    throw PreconditionError("power exponent in (0,1)", f.str());
  if (f.kind == Threshold::Kind::constant && f.parameter < Ratio(1))
    throw PreconditionError("constant >= 1", f.str());
  GoodnessReport profile = split_profile(g, a);
  IndivisibilityReport out;
  out.worst_b = profile.worst_b;
  out.worst_minority = profile.worst_count;
  out.set_size = profile.set_size;
  out.indivisible = f.admits(profile.worst_count, profile.set_size);
  return out;
}

MaybeTruth average_truth(const Graph& g, const VertexSet& a, Threshold fa, const VertexSet& b, Threshold fb) {
  require_same_graph(g, a);
  require_same_graph(g, b);
  std::size_t b_size = b.size();
  std::size_t bad_for_one = 0, bad_for_zero = 0;
  a.for_each([&](Vertex v) {
    std::size_t adjacent = neighbours_in(g, v, b);
    if (!fb.admits(b_size - adjacent, b_size)) ++bad_for_one;
    if (!fb.admits(adjacent, b_size)) ++bad_for_zero;
  });
  std::size_t a_size = a.size();
  bool one = fa.admits(bad_for_one, a_size);
  bool zero = fa.admits(bad_for_zero, a_size);
  if (one && (!zero || bad_for_one <= bad_for_zero)) return Truth::one;
  if (zero) return Truth::zero;
  return std::nullopt;
}

bool check_regular_pair_exact(const Graph& g, const VertexSet& a, const VertexSet& b, Ratio eps) {
  require_same_graph(g, a);
  require_same_graph(g, b);
  if (eps <= Ratio(0) || eps >= Ratio(1)) throw PreconditionError("eps in (0,1)", eps.str());
  auto left = a.members();
  auto right = b.members();
  if (left.size() > regular_pair_side_cap || right.size() > regular_pair_side_cap)
    throw PreconditionError("sides <= 14", "exhaustive regularity check refused for sides of size " +
                                               std::to_string(left.size()) + " and " + std::to_string(right.size()));
  if (left.empty() || right.empty()) throw PreconditionError("nonempty sides", "pair sides must be nonempty");
  const std::int64_t p = static_cast<std::int64_t>(left.size());
  const std::int64_t q = static_cast<std::int64_t>(right.size());
  std::vector<std::uint32_t> row_mask(left.size(), 0);
  std::int64_t edges = 0;
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j)
      if (g.adjacent(left[i], right[j])) {
        row_mask[i] |= 1U << j;
        ++edges;
      }
  // |edges/(p q) - sum/(sa sb)| < eps, cross-multiplied.
  auto close = [&](std::int64_t sum, std::int64_t sa, std::int64_t sb) {
    Int128 diff = Int128(edges) * sa * sb - Int128(sum) * p * q;
    if (diff < 0) diff = -diff;
    return diff * eps.den() < Int128(eps.num()) * p * q * sa * sb;
  };
  std::vector<std::int64_t> column(right.size());
  for (std::uint32_t subset = 1; subset < (1U << left.size()); ++subset) {
    auto sa = static_cast<std::int64_t>(std::popcount(subset));
    if (below_fraction(static_cast<std::uint64_t>(sa), eps, static_cast<std::uint64_t>(p))) continue;
    std::fill(column.begin(), column.end(), 0);
    for (std::size_t i = 0; i < left.size(); ++i)
      if ((subset >> i) & 1U)
        for (std::size_t j = 0; j < right.size(); ++j) column[j] += (row_mask[i] >> j) & 1U;
    std::sort(column.begin(), column.end());
    std::int64_t low = 0, high = 0;
    for (std::int64_t sb = 1; sb <= q; ++sb) {
      low += column[static_cast<std::size_t>(sb - 1)];
      high += column[static_cast<std::size_t>(q - sb)];
      if (below_fraction(static_cast<std::uint64_t>(sb), eps, static_cast<std::uint64_t>(q))) continue;
      if (!close(low, sa, sb) || !close(high, sa, sb)) return false;
    }
  }
  return true;
}

bool uniform_implies_regular(Ratio eps0, Ratio eps) {
  if (eps0 < Ratio(0)) throw PreconditionError("eps0 >= 0", eps0.str());
  if (eps <= Ratio(0)) throw PreconditionError("eps > 0", eps.str());
  return eps0 * Ratio(2) <= eps * eps;
}

DensityBound density_bound_check(const Graph& g, const VertexSet& a_piece, Threshold a_threshold,
                                 const VertexSet& b_piece, Threshold b_threshold, const VertexSet& a_sub,
                                 const VertexSet& b_sub, Ratio zeta1, Ratio eps1, Truth trv) {
  for (const auto* s : {&a_piece, &b_piece, &a_sub, &b_sub}) require_same_graph(g, *s);
  if (!a_sub.subset_of(a_piece) || !b_sub.subset_of(b_piece))
    throw PreconditionError("subsets", "sub-pieces must lie inside their pieces");
  const std::size_t a_size = a_piece.size(), b_size = b_piece.size();
  const std::size_t a_sub_size = a_sub.size(), b_sub_size = b_sub.size();
  if (a_sub_size == 0 || b_sub_size == 0) throw PreconditionError("nonempty sub-pieces", "empty sub-piece");
  auto large_enough = [](std::size_t sub, std::size_t whole, Threshold t, Ratio extra) {
    if (t.kind == Threshold::Kind::power) return !less_than_power(sub, whole, t.parameter + extra);
    long double need = t.parameter.value_ld() * std::pow(static_cast<long double>(whole), extra.value_ld());
    return static_cast<long double>(sub) >= need * (1 - 1e-15L);
  };
  if (!large_enough(a_sub_size, a_size, a_threshold, zeta1))
    throw PreconditionError("sub-piece size", "A' has " + std::to_string(a_sub_size) + " elements, below the threshold");
  if (!large_enough(b_sub_size, b_size, b_threshold, eps1))
    throw PreconditionError("sub-piece size", "B' has " + std::to_string(b_sub_size) + " elements, below the threshold");
  DensityBound out;
  a_sub.for_each([&](Vertex v) {
    std::size_t adjacent = neighbours_in(g, v, b_sub);
    out.exceptional_edges += holds(trv) ? b_sub_size - adjacent : adjacent;
  });
  out.observed = static_cast<double>(out.exceptional_edges) / (static_cast<double>(a_sub_size) * static_cast<double>(b_sub_size));
  out.bound = 1.0 / std::pow(static_cast<double>(a_size), zeta1.value()) +
              1.0 / std::pow(static_cast<double>(b_size), eps1.value());
  out.passes = out.observed <= out.bound;
  return out;
}

}  // namespace stablereg
