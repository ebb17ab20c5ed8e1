#include "stablereg/indiscernible.hpp"

#include <algorithm>
#include <functional>

#include "stablereg/errors.hpp"

namespace stablereg {

namespace {

bool realized(const Graph& g, const DeltaFormula& f, std::span<const Vertex> args, std::vector<Word>& scratch) {
  if (f.kind == DeltaFormula::Kind::edge) return g.adjacent(args[0], args[1]);
  const std::size_t n = g.size();
  if (n == 0) return false;
  scratch.assign(g.stride(), ~Word{0});
  if (n % 64 != 0) scratch.back() = (Word{1} << (n % 64)) - 1;
  for (std::size_t l = 0; l < f.k; ++l) {
    bool positive = (f.sigma == 1) == (l < f.m);
    auto row = g.row(args[l]);
    for (std::size_t w = 0; w < scratch.size(); ++w) scratch[w] &= positive ? row[w] : ~row[w];
  }
  return std::any_of(scratch.begin(), scratch.end(), [](Word w) { return w != 0; });
}

// Formulas of the given arity evaluated on `args`, as a mask over formula indices.
std::uint64_t arity_mask(const Graph& g, const DeltaSet& delta, std::span<const Vertex> args, std::size_t arity,
                         std::vector<Word>& scratch) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < delta.formulas.size(); ++i)
    if (delta.formulas[i].arity() == arity && realized(g, delta.formulas[i], args, scratch)) mask |= std::uint64_t{1} << i;
  return mask;
}

// Calls fn(tuple) for each increasing t-subset of [0, n) in lex order until fn returns false.
bool for_each_combination(std::size_t n, std::size_t t, const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  if (t > n) return true;
  std::vector<std::size_t> c(t);
  for (std::size_t i = 0; i < t; ++i) c[i] = i;
  while (true) {
    if (!fn(c)) return false;
    std::size_t i = t;
    while (i > 0 && c[i - 1] == n - t + i - 1) --i;
    if (i == 0) return true;
    ++c[i - 1];
    for (std::size_t j = i; j < t; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace

std::string DeltaFormula::name() const {
  if (kind == Kind::edge) return "x0Rx1";
  return "phi" + std::to_string(sigma) + "_{" + std::to_string(k) + "," + std::to_string(m) + "}";
}

DeltaSet delta_set(std::size_t k) {
  if (k == 0 || 2 * (k + 1) + 1 > 64) throw PreconditionError("1 <= k <= 30", "k = " + std::to_string(k));
  DeltaSet delta;
  delta.k = k;
  delta.formulas.push_back({DeltaFormula::Kind::edge, 1, 2, 0});
  for (int sigma = 1; sigma <= 2; ++sigma)
    for (std::size_t m = 0; m <= k; ++m) delta.formulas.push_back({DeltaFormula::Kind::phi, sigma, k, m});
  return delta;
}

bool eval_delta_formula(const Graph& g, const DeltaFormula& f, std::span<const Vertex> args) {
  if (args.size() != f.arity())
    throw ValidationError(f.name() + " takes " + std::to_string(f.arity()) + " arguments, got " + std::to_string(args.size()));
  for (Vertex v : args)
    if (v >= g.size()) throw ValidationError("formula argument " + std::to_string(v) + " out of range");
  std::vector<Word> scratch;
  return realized(g, f, args, scratch);
}

std::uint64_t delta_type(const Graph& g, const DeltaSet& delta, std::span<const Vertex> args) {
  if (args.size() < delta.arity()) throw ValidationError("delta_type needs " + std::to_string(delta.arity()) + " arguments");
  std::vector<Word> scratch;
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < delta.formulas.size(); ++i)
    if (realized(g, delta.formulas[i], args.first(delta.formulas[i].arity()), scratch)) mask |= std::uint64_t{1} << i;
  return mask;
}

IndiscernibilityReport check_indiscernible(const Graph& g, std::span<const Vertex> seq, const DeltaSet& delta,
                                           std::size_t length_cap, std::size_t arity_cap) {
  if (seq.size() > length_cap)
    throw PreconditionError("sequence length <= " + std::to_string(length_cap), "length " + std::to_string(seq.size()));
  if (delta.k > arity_cap) throw PreconditionError("k <= " + std::to_string(arity_cap), "k = " + std::to_string(delta.k));
  IndiscernibilityReport report;
  std::vector<Word> scratch;
  std::vector<std::size_t> arities;
  for (const auto& f : delta.formulas)
    if (std::find(arities.begin(), arities.end(), f.arity()) == arities.end()) arities.push_back(f.arity());
  for (std::size_t arity : arities) {
    if (seq.size() < arity) continue;
    std::vector<Vertex> args(arity);
    std::optional<std::uint64_t> reference;
    std::vector<std::size_t> reference_tuple;
    for_each_combination(seq.size(), arity, [&](const std::vector<std::size_t>& tuple) {
      for (std::size_t i = 0; i < arity; ++i) args[i] = seq[tuple[i]];
      std::uint64_t mask = arity_mask(g, delta, args, arity, scratch);
      if (!reference) {
        reference = mask;
        reference_tuple = tuple;
        return true;
      }
      if (mask == *reference) return true;
      report.indiscernible = false;
      report.formula = static_cast<std::size_t>(std::countr_zero(mask ^ *reference));
      report.first_tuple = reference_tuple;
      report.second_tuple = tuple;
      return false;
    });
    if (!report.indiscernible) return report;
  }
  return report;
}

IndiscernibleExtraction extract_indiscernible(const Graph& g, std::span<const Vertex> seq, const DeltaSet& delta) {
  const std::size_t arity = delta.arity();
  std::vector<Word> scratch;
  std::vector<std::size_t> u(seq.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = i;
  IndiscernibleExtraction result;

  for (std::size_t m = 0; m < arity; ++m) {
    if (u.size() <= m) {
      u.clear();
      result.stage_lengths.push_back(0);
      continue;
    }
    std::vector<Vertex> params;
    for (std::size_t i = u.size() - m; i < u.size(); ++i) params.push_back(seq[u[i]]);
    const std::size_t tuple_length = arity - m - 1;

    struct Node {
      std::size_t pos;
      std::size_t depth;
      std::vector<std::uint64_t> type;
      std::vector<std::size_t> children;
    };
    std::vector<Node> nodes;
    std::vector<std::size_t> roots;
    std::vector<Vertex> args(arity);
    for (std::size_t i = 0; i < m; ++i) args[tuple_length + 1 + i] = params[i];

    // Appends to `type` the masks of all tuples whose last path element is path.back().
    auto extend = [&](std::vector<std::uint64_t>& type, const std::vector<Vertex>& path, Vertex x) {
      args[tuple_length] = x;
      if (tuple_length == 0) {
        if (type.empty()) type.push_back(delta_type(g, delta, args));
        return;
      }
      const std::size_t last = path.size() - 1;
      for_each_combination(last, tuple_length - 1, [&](const std::vector<std::size_t>& head) {
        for (std::size_t i = 0; i + 1 < tuple_length; ++i) args[i] = path[head[i]];
        args[tuple_length - 1] = path[last];
        type.push_back(delta_type(g, delta, args));
        return true;
      });
    };

    for (std::size_t idx = 0; idx + m < u.size(); ++idx) {
      const std::size_t pos = u[idx];
      const Vertex x = seq[pos];
      std::vector<Vertex> path;
      std::vector<std::uint64_t> type;
      if (tuple_length == 0) extend(type, path, x);
      constexpr std::size_t root = static_cast<std::size_t>(-1);
      std::size_t parent = root;
      std::size_t depth = 0;
      while (true) {
        const auto& siblings = parent == root ? roots : nodes[parent].children;
        auto match = std::find_if(siblings.begin(), siblings.end(), [&](std::size_t c) { return nodes[c].type == type; });
        if (match == siblings.end()) {
          nodes.push_back({pos, depth, type, {}});
          (parent == root ? roots : nodes[parent].children).push_back(nodes.size() - 1);
          break;
        }
        parent = *match;
        path.push_back(seq[nodes[parent].pos]);
        extend(type, path, x);
        ++depth;
      }
    }

    // Leftmost deepest node, then its branch.
    std::vector<std::size_t> best;
    std::vector<std::size_t> branch;
    std::function<void(std::size_t)> walk = [&](std::size_t c) {
      branch.push_back(nodes[c].pos);
      if (branch.size() > best.size()) best = branch;
      for (std::size_t child : nodes[c].children) walk(child);
      branch.pop_back();
    };
    for (std::size_t r : roots) walk(r);
    u = std::move(best);
    result.stage_lengths.push_back(u.size());
  }

  const std::size_t min_arity = delta.k < 2 ? 1 : 2;
  const std::size_t drop = std::min(u.size(), arity - min_arity);
  u.resize(u.size() - drop);
  result.indices = std::move(u);

  if (result.indices.size() <= indiscernible_length_cap && delta.k <= indiscernible_arity_cap) {
    std::vector<Vertex> out;
    for (std::size_t i : result.indices) out.push_back(seq[i]);
    if (!check_indiscernible(g, out, delta).indiscernible)
      throw VerificationFailure("extracted sequence is not indiscernible");
  }
  return result;
}

std::size_t minority_side(const Graph& g, std::span<const Vertex> seq, Vertex b) {
  std::size_t adjacent = 0;
  for (Vertex a : seq) adjacent += g.adjacent(a, b) ? 1 : 0;
  return std::min(adjacent, seq.size() - adjacent);
}

std::vector<std::size_t> heavy_positions(const Graph& g, std::span<const Vertex> rows, std::span<const Vertex> columns,
                                         std::size_t threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t count = 0;
    for (Vertex b : columns) count += g.adjacent(rows[i], b) ? 1 : 0;
    if (count >= threshold) out.push_back(i);
  }
  return out;
}

}  // namespace stablereg
