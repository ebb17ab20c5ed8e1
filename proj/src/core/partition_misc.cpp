#include <algorithm>
#include <limits>

#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/indiscernible.hpp"
#include "stablereg/partition.hpp"
#include "stablereg/rng.hpp"
#include "stablereg/transversal.hpp"

namespace stablereg {

CIndivisibleResult partition_c_indivisible(const Graph& g, const VertexSet& a, Ratio eps, Ratio zeta, Ratio theta,
                                           std::size_t c, std::size_t k_star, std::uint64_t seed,
                                           const CIndivisibleOptions& options) {
  CIndivisibleResult result;
  result.seed = seed;
  if (k_star == 0) throw PreconditionError("k* >= 1", "k* = 0");
  const std::size_t k = options.k_starstar.value_or(declared_tree_bound(k_star));
  if (theta <= Ratio(0) || theta >= Ratio(1)) throw PreconditionError("0 < theta < 1", "theta = " + theta.str());
  // zeta is the piece-size exponent; the trace family is bounded by |A_1|^(k*).
  const Ratio family_exponent(1, static_cast<std::int64_t>(k_star));
  CIndivisibleParams params{eps, zeta, family_exponent, c, k_star, k};
  check_c_indivisible_params(params, std::numeric_limits<std::size_t>::max());
  const std::uint64_t threshold = transversal_threshold({eps, family_exponent, zeta, c});
  const std::uint64_t n = a.size();
  if (!less_than_power(threshold + 1, n, theta))
    throw SizingError("needs n^theta > " + std::to_string(threshold + 1),
                      static_cast<std::size_t>(ceil_power(threshold + 2, Ratio(1) / theta)));

  // m_{k-1} = floor(n^theta), m_{l} = ceil(m_{l+1}^(1/eps)) going up.
  std::vector<std::size_t> values(k);
  values[k - 1] = floor_power(n, theta);
  for (std::size_t l = k - 1; l-- > 0;) values[l] = ceil_power(values[l + 1], Ratio(1) / eps);
  result.ms.mode = MSequence::Mode::power;
  result.ms.step = eps;
  result.ms.values = values;
  result.ms.validate();
  result.piece_size = floor_power(n, theta * zeta);
  Ratio top_exponent = theta;
  for (std::size_t l = 1; l < k; ++l) top_exponent = top_exponent / eps;
  result.remainder_bound = floor_power(n, top_exponent);

  const Threshold constant = Threshold::constant(Ratio(static_cast<std::int64_t>(c)));
  VertexSet rest = a;
  const std::size_t m0 = values.front();
  for (std::size_t index = 0; rest.size() >= m0; ++index) {
    auto members = rest.members();
    VertexSet root(g, std::span<const Vertex>(members).first(m0));
    Extraction ext = extract_indivisible(g, root, result.ms);
    auto traces = minority_traces(g, ext.piece);
    const std::size_t parent_size = ext.piece.size();
    if (!at_most_power(traces.size(), parent_size, Ratio(static_cast<std::int64_t>(k_star))))
      throw VerificationFailure("trace family of size " + std::to_string(traces.size()) + " exceeds |A_1|^k*; k* = " +
                                std::to_string(k_star) + " is contradicted");
    if (result.piece_size > parent_size)
      throw PreconditionError("floor(n^(theta zeta)) <= |A_1|",
                              std::to_string(result.piece_size) + " > " + std::to_string(parent_size));
    auto ground = ext.piece.members();
    Transversal t = draw_transversal(ground, traces, result.piece_size, c - 1,
                                     Rng::stream(seed, "c-piece", index).next(), options.max_attempts);
    VertexSet piece(g, t.elements);
    auto report = check_indivisible(g, piece, constant);
    if (!report.indivisible)
      throw VerificationFailure("piece " + std::to_string(index) + " is not c-indivisible (vertex " +
                                std::to_string(report.worst_b) + ")");
    rest -= piece;
    result.levels.push_back(ext.level);
    result.attempts.push_back(t.attempts);
    result.partition.pieces.push_back(std::move(piece));
  }
  result.remainder_within_bound = rest.size() <= result.remainder_bound;
  result.partition.remainder = std::move(rest);
  return result;
}

bool homogeneous_after_omission(const Graph& g, const std::vector<Vertex>& piece) {
  const std::size_t size = piece.size();
  auto uniform_without = [&](std::size_t skip) {
    std::optional<bool> value;
    for (std::size_t x = 0; x < size; ++x) {
      if (x == skip) continue;
      for (std::size_t y = x + 1; y < size; ++y) {
        if (y == skip) continue;
        bool edge = g.adjacent(piece[x], piece[y]);
        if (!value) value = edge;
        else if (*value != edge) return false;
      }
    }
    return true;
  };
  if (uniform_without(size)) return true;
  for (std::size_t skip = 0; skip < size; ++skip)
    if (uniform_without(skip)) return true;
  return false;
}

IndiscerniblePair check_indiscernible_pair(const Graph& g, const std::vector<Vertex>& a, const std::vector<Vertex>& b,
                                           std::size_t bound) {
  const std::size_t rows = a.size();
  const std::size_t cols = b.size();
  std::vector<std::uint8_t> adjacent(rows * cols);
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t y = 0; y < cols; ++y) adjacent[x * cols + y] = g.adjacent(a[x], b[y]) ? 1 : 0;

  IndiscerniblePair best;
  bool found = false;
  std::size_t best_exceptions = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> row_sum(rows);
  std::vector<std::size_t> col_sum(cols);
  for (Truth t : {Truth::zero, Truth::one}) {
    auto mismatch = [&](std::size_t x, std::size_t y) -> std::size_t {
      return adjacent[x * cols + y] != as_int(t) ? 1 : 0;
    };
    std::fill(row_sum.begin(), row_sum.end(), 0);
    std::fill(col_sum.begin(), col_sum.end(), 0);
    std::size_t total = 0;
    for (std::size_t x = 0; x < rows; ++x)
      for (std::size_t y = 0; y < cols; ++y) {
        std::size_t m = mismatch(x, y);
        row_sum[x] += m;
        col_sum[y] += m;
        total += m;
      }
    // Index `rows` (resp. `cols`) means nothing omitted.
    for (std::size_t oi = rows + 1; oi-- > 0;) {
      for (std::size_t oj = cols + 1; oj-- > 0;) {
        const bool drop_i = oi < rows;
        const bool drop_j = oj < cols;
        std::size_t bad_rows = 0;
        std::size_t bad_cols = 0;
        for (std::size_t x = 0; x < rows; ++x) {
          if (x == oi) continue;
          std::size_t s = row_sum[x] - (drop_j ? mismatch(x, oj) : 0);
          bad_rows += s > bound ? 1 : 0;
        }
        for (std::size_t y = 0; y < cols; ++y) {
          if (y == oj) continue;
          std::size_t s = col_sum[y] - (drop_i ? mismatch(oi, y) : 0);
          bad_cols += s > bound ? 1 : 0;
        }
        std::size_t exceptions = total - (drop_i ? row_sum[oi] : 0) - (drop_j ? col_sum[oj] : 0) +
                                 (drop_i && drop_j ? mismatch(oi, oj) : 0);
        const std::size_t kept_rows = rows - (drop_i ? 1 : 0);
        const std::size_t kept_cols = cols - (drop_j ? 1 : 0);
        const bool dense_ok = exceptions <= bound * (kept_rows + kept_cols);
        const bool passes = bad_rows <= bound && bad_cols <= bound && dense_ok;
        const bool better = !found || (passes && !best.passes) || (passes == best.passes && exceptions < best_exceptions);
        if (!better) continue;
        found = true;
        best_exceptions = exceptions;
        best.trv = t;
        best.omitted_i = drop_i ? std::optional<Vertex>(a[oi]) : std::nullopt;
        best.omitted_j = drop_j ? std::optional<Vertex>(b[oj]) : std::nullopt;
        best.bad_rows = bad_rows;
        best.bad_columns = bad_cols;
        best.exceptional_edges = exceptions;
        const double cells = static_cast<double>(kept_rows) * static_cast<double>(kept_cols);
        best.density = cells > 0 ? static_cast<double>(exceptions) / cells : 0.0;
        best.density_bound = (kept_rows ? static_cast<double>(bound) / static_cast<double>(kept_rows) : 0.0) +
                             (kept_cols ? static_cast<double>(bound) / static_cast<double>(kept_cols) : 0.0);
        best.passes = passes;
      }
    }
  }
  return best;
}

IndiscernibleResult partition_indiscernible(const Graph& g, const VertexSet& a, std::size_t n2, std::size_t k_star,
                                            std::uint64_t seed) {
  if (k_star == 0) throw PreconditionError("k* >= 1", "k* = 0");
  if (n2 <= 4 * k_star * k_star)
    throw PreconditionError("n2 > (2k*)^2", "n2 = " + std::to_string(n2) + ", k* = " + std::to_string(k_star));
  IndiscernibleResult result;
  result.seed = seed;
  const DeltaSet delta = delta_set(k_star);
  std::vector<Vertex> order = a.members();
  Rng rng = Rng::stream(seed, "indiscernible-order");
  rng.shuffle(std::span<Vertex>(order));
  result.target_pieces = order.size() / n2;

  while (result.sequences.size() < result.target_pieces) {
    IndiscernibleExtraction ext = extract_indiscernible(g, order, delta);
    if (ext.indices.size() < n2) {
      result.partial = true;
      break;
    }
    std::vector<Vertex> seq;
    std::vector<bool> taken(order.size(), false);
    for (std::size_t i = 0; i < n2; ++i) {
      seq.push_back(order[ext.indices[i]]);
      taken[ext.indices[i]] = true;
    }
    std::vector<Vertex> kept;
    for (std::size_t i = 0; i < order.size(); ++i)
      if (!taken[i]) kept.push_back(order[i]);
    order = std::move(kept);
    result.sequences.push_back(std::move(seq));
  }

  const std::size_t count = result.sequences.size();
  std::vector<std::vector<Vertex>> pieces = result.sequences;
  result.appended.assign(count, std::nullopt);
  for (std::size_t i = 0; i < count && i < order.size(); ++i) {
    result.appended[i] = order[i];
    pieces[i].push_back(order[i]);
  }
  VertexSet remainder(g);
  for (std::size_t i = count; i < order.size(); ++i) remainder.insert(order[i]);
  for (const auto& piece : pieces) result.partition.pieces.emplace_back(g, piece);
  result.partition.remainder = std::move(remainder);

  bool ok = true;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& seq = result.sequences[i];
    bool verified = false;
    if (seq.size() <= indiscernible_length_cap && k_star <= indiscernible_arity_cap) {
      auto report = check_indiscernible(g, seq, delta);
      if (!report.indiscernible)
        throw VerificationFailure("extracted sequence " + std::to_string(i) + " is not indiscernible");
      verified = true;
    }
    result.indiscernible_verified.push_back(verified);
    bool homogeneous = homogeneous_after_omission(g, pieces[i]);
    result.homogeneous.push_back(homogeneous);
    ok = ok && homogeneous;
  }
  const std::size_t bound = 2 * k_star;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) {
      IndiscerniblePair pair = check_indiscernible_pair(g, pieces[i], pieces[j], bound);
      pair.i = i;
      pair.j = j;
      ok = ok && pair.passes;
      result.pairs.push_back(pair);
    }
  result.all_verified = ok;
  return result;
}

}  // namespace stablereg
