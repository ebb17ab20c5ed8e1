#include "stablereg/extract.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace stablereg {

namespace {

VertexSet take_first(const Graph& g, const VertexSet& s, std::size_t count) {
  VertexSet out(g);
  std::size_t taken = 0;
  for (std::size_t v = s.bits().first(); v < s.universe() && taken < count; v = s.bits().next(v + 1), ++taken)
    out.insert(static_cast<Vertex>(v));
  return out;
}

std::size_t depth_of(std::size_t heap) { return static_cast<std::size_t>(std::bit_width(heap)) - 1; }

struct LevelNode {
  std::size_t heap;
  VertexSet set;
};

SplitTree::Node make_node(std::size_t heap, const VertexSet& set) {
  SplitTree::Node node;
  node.label = node_label(heap);
  node.members = set.members();
  return node;
}

[[noreturn]] void overflow(const Graph& g, std::size_t height, const std::vector<LevelNode>& leaves,
                           const std::vector<std::optional<Vertex>>& preferred, SplitTree tree,
                           const std::string& what) {
  std::vector<std::vector<Vertex>> leaf_sets(std::size_t{1} << height);
  for (const auto& leaf : leaves) leaf_sets[leaf.heap - leaf_sets.size()] = leaf.set.members();
  auto witness = complete_tree_witness(g, height, leaf_sets, preferred);
  bool valid = witness && is_tree_witness(g, *witness);
  tree.depth = height;
  throw DepthOverflow(what + ": extraction tree reached depth " + std::to_string(height) +
                          (valid ? ", giving a tree witness of that height" : " (no distinct tree witness assembled)"),
                      witness.value_or(TreeWitness{}), valid, std::move(tree));
}

}  // namespace

std::size_t MSequence::next_size(std::size_t level) const {
  if (level + 1 < values.size()) return values[level + 1];
  if (mode == Mode::power) return floor_power(values.back(), step);
  return 0;
}

Ratio MSequence::level_ratio(std::size_t level) const {
  if (level + 1 < values.size())
    return Ratio(static_cast<std::int64_t>(values[level + 1]), static_cast<std::int64_t>(values[level]));
  return step;
}

void MSequence::validate() const {
  if (values.empty()) throw PreconditionError("m-sequence", "no levels");
  if (step <= Ratio(0) || step >= Ratio(1)) throw PreconditionError("m-sequence", "step must lie in (0,1)");
  for (std::size_t l = 0; l < values.size(); ++l) {
    if (values[l] == 0) throw PreconditionError("m-sequence", "sizes must be positive");
    if (l + 1 == values.size()) break;
    if (values[l + 1] >= values[l]) throw PreconditionError("m-sequence", "sizes must strictly decrease");
    if (mode == Mode::power && values[l + 1] > floor_power(values[l], step))
      throw PreconditionError("m-sequence", "m_{l+1} exceeds floor(m_l^eps) at level " + std::to_string(l));
    if (mode == Mode::ratio) {
      if (Ratio(static_cast<std::int64_t>(values[l + 1]), static_cast<std::int64_t>(values[l])) > step)
        throw PreconditionError("m-sequence", "m_{l+1} exceeds eps*m_l at level " + std::to_string(l));
      if (values[l] % values.back() != 0)
        throw PreconditionError("m-sequence", "last size does not divide m_" + std::to_string(l));
    }
  }
  if (mode == Mode::power && next_size(values.size() - 1) == 0)
    throw PreconditionError("m-sequence", "floor(m_last^eps) must be positive");
}

MSequence power_sequence(std::size_t m0, Ratio eps, std::size_t k_starstar) {
  MSequence ms;
  ms.mode = MSequence::Mode::power;
  ms.step = eps;
  ms.values.push_back(m0);
  while (ms.values.size() < k_starstar) ms.values.push_back(floor_power(ms.values.back(), eps));
  ms.validate();
  return ms;
}

std::optional<TreeWitness> complete_tree_witness(const Graph& g, std::size_t height,
                                                 const std::vector<std::vector<Vertex>>& leaf_sets,
                                                 const std::vector<std::optional<Vertex>>& preferred) {
  const std::size_t leaves = std::size_t{1} << height;
  TreeWitness w;
  w.height = height;
  w.leaves.resize(leaves);
  w.internal.assign(leaves, 0);
  std::vector<bool> used(g.size(), false);
  std::vector<bool> reserved(g.size(), false);
  for (const auto& p : preferred)
    if (p && *p < g.size()) reserved[*p] = true;
  // Lowest member that is neither a preferred internal vertex nor already a leaf.
  for (std::size_t eta = 0; eta < leaves; ++eta) {
    if (leaf_sets[eta].empty()) return std::nullopt;
    std::optional<Vertex> leaf;
    for (Vertex v : leaf_sets[eta])
      if (!used[v] && (!leaf || reserved[*leaf] || (!reserved[v] && v < *leaf))) leaf = v;
    if (!leaf) return std::nullopt;
    w.leaves[eta] = *leaf;
    used[*leaf] = true;
  }
  auto fits = [&](std::size_t heap, Vertex b) {
    if (used[b]) return false;
    std::size_t d = depth_of(heap);
    std::size_t span = leaves >> d;
    std::size_t first = (heap - (std::size_t{1} << d)) * span;
    for (std::size_t eta = first; eta < first + span; ++eta) {
      bool branch = (eta >> (height - 1 - d)) & 1U;
      if (g.adjacent(w.leaves[eta], b) != branch) return false;
    }
    return true;
  };
  for (std::size_t heap = 1; heap < leaves; ++heap) {
    std::optional<Vertex> pick;
    if (heap < preferred.size() && preferred[heap] && fits(heap, *preferred[heap])) pick = preferred[heap];
    for (Vertex b = 0; !pick && b < g.size(); ++b)
      if (fits(heap, b)) pick = b;
    if (!pick) return std::nullopt;
    w.internal[heap] = *pick;
    used[*pick] = true;
  }
  return w;
}

Extraction extract_indivisible(const Graph& g, const VertexSet& a, const MSequence& ms) {
  if (ms.mode != MSequence::Mode::power) throw PreconditionError("power-mode sequence", "indivisible extraction needs m_{l+1} = floor(m_l^eps)");
  ms.validate();
  if (a.size() != ms.values.front())
    throw PreconditionError("|A| = m_0", "|A| = " + std::to_string(a.size()) + ", m_0 = " + std::to_string(ms.values.front()));
  const std::size_t height = ms.levels();
  SplitTree tree;
  std::vector<LevelNode> level{{1, a}};
  std::vector<std::optional<Vertex>> splitters(std::size_t{1} << height);
  for (std::size_t l = 0; l < height; ++l) {
    const std::size_t need = ms.next_size(l);
    std::vector<LevelNode> next;
    for (auto& node : level) {
      tree.nodes.push_back(make_node(node.heap, node.set));
      const std::size_t size = node.set.size();
      auto counts = neighbour_counts(g, node.set);
      std::optional<Vertex> splitter;
      for (Vertex b = 0; b < g.size() && !splitter; ++b)
        if (std::min<std::size_t>(counts[b], size - counts[b]) >= need) splitter = b;
      if (!splitter) {
        auto report = check_indivisible(g, node.set, Threshold::power(ms.step));
        if (!report.indivisible)
          throw VerificationFailure("extracted set is not indivisible (vertex " + std::to_string(report.worst_b) + ")");
        tree.depth = l;
        tree.result_label = node_label(node.heap);
        return {node.set, l, std::move(tree)};
      }
      tree.nodes.back().splitter_vertex = splitter;
      tree.nodes.back().splitter_name = std::to_string(*splitter);
      splitters[node.heap] = splitter;
      VertexSet neighbours(g);
      auto row = g.row(*splitter);
      std::copy(row.begin(), row.end(), neighbours.bits().words().begin());
      VertexSet one = node.set;
      one &= neighbours;
      VertexSet zero = node.set;
      zero -= neighbours;
      next.push_back({2 * node.heap, take_first(g, zero, need)});
      next.push_back({2 * node.heap + 1, take_first(g, one, need)});
    }
    level = std::move(next);
  }
  for (const auto& leaf : level) tree.nodes.push_back(make_node(leaf.heap, leaf.set));
  overflow(g, height, level, splitters, std::move(tree), "indivisible extraction");
}

Cover extract_indivisible_cover(const Graph& g, const VertexSet& a, const MSequence& ms) {
  ms.validate();
  Cover cover;
  cover.remainder = a;
  const std::size_t m0 = ms.values.front();
  while (cover.remainder.size() >= m0) {
    VertexSet root = take_first(g, cover.remainder, m0);
    Extraction ext = extract_indivisible(g, root, ms);
    cover.remainder -= ext.piece;
    cover.pieces.push_back(std::move(ext.piece));
    cover.levels.push_back(ext.level);
  }
  std::vector<std::size_t> order(cover.pieces.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return cover.pieces[x].size() < cover.pieces[y].size(); });
  Cover sorted;
  sorted.remainder = std::move(cover.remainder);
  for (std::size_t i : order) {
    sorted.pieces.push_back(std::move(cover.pieces[i]));
    sorted.levels.push_back(cover.levels[i]);
  }
  return sorted;
}

Extraction extract_excellent(const Graph& g, const VertexSet& a, Ratio eps, const WitnessFamily& family,
                             std::size_t k_starstar, const MSequence* ms) {
  if (k_starstar == 0 || k_starstar > 30) throw PreconditionError("k** in [1,30]", std::to_string(k_starstar));
  const Ratio last = ms ? ms->step : eps;
  if (last * Ratio(std::int64_t{1} << k_starstar) >= Ratio(1))
    throw PreconditionError("eps < 2^-k**", "eps = " + last.str() + ", k** = " + std::to_string(k_starstar));
  VertexSet root = a;
  if (ms) {
    if (ms->mode != MSequence::Mode::ratio) throw PreconditionError("ratio-mode sequence", "excellent extraction needs a ratio-mode sequence");
    ms->validate();
    if (ms->levels() != k_starstar) throw PreconditionError("levels = k**", "sequence length differs from k**");
    if (a.size() < ms->values.front())
      throw PreconditionError("|A| >= m_0", "|A| = " + std::to_string(a.size()) + ", m_0 = " + std::to_string(ms->values.front()));
    root = take_first(g, a, ms->values.front());
  } else if (Ratio(static_cast<std::int64_t>(a.size())) * eps.pow(static_cast<unsigned>(k_starstar)) < Ratio(1)) {
    throw PreconditionError("|A| >= 1/eps^k**", "|A| = " + std::to_string(a.size()));
  }

  SplitTree tree;
  std::vector<LevelNode> level{{1, root}};
  std::vector<std::optional<Vertex>> preferred(std::size_t{1} << k_starstar);
  for (std::size_t l = 0; l < k_starstar; ++l) {
    const Ratio margin = ms ? ms->level_ratio(l) : eps;
    std::vector<ExcellenceReport> reports;
    for (auto& node : level) {
      tree.nodes.push_back(make_node(node.heap, node.set));
      reports.push_back(check_excellent(g, node.set, margin, margin, family));
      if (reports.back().excellent) {
        tree.depth = l;
        tree.result_label = node_label(node.heap);
        return {node.set, l, std::move(tree)};
      }
    }
    const std::size_t first_index = tree.nodes.size() - level.size();
    std::vector<LevelNode> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& node = level[i];
      WitnessRef ref = *reports[i].failing;
      auto& record = tree.nodes[first_index + i];
      record.splitter = ref;
      if (ref.kind == WitnessRef::Kind::singleton) {
        record.splitter_vertex = static_cast<Vertex>(ref.index);
        record.splitter_name = std::to_string(ref.index);
        preferred[node.heap] = static_cast<Vertex>(ref.index);
      } else {
        record.splitter_name = family.member(ref.index).origin;
      }
      WitnessSplit split = split_by_witness(g, node.set, family, ref, margin);
      (split.zero.size() >= split.one.size() ? split.zero : split.one) |= split.undefined;
      if (ms && l + 1 < k_starstar) {
        const std::size_t need = ms->values[l + 1];
        if (split.zero.size() < need || split.one.size() < need)
          throw VerificationFailure("witness " + record.splitter_name + " does not split node '" + record.label +
                                    "' into two sides of size " + std::to_string(need));
        split.zero = take_first(g, split.zero, need);
        split.one = take_first(g, split.one, need);
      }
      next.push_back({2 * node.heap, std::move(split.zero)});
      next.push_back({2 * node.heap + 1, std::move(split.one)});
    }
    level = std::move(next);
  }
  for (const auto& leaf : level) tree.nodes.push_back(make_node(leaf.heap, leaf.set));
  overflow(g, k_starstar, level, preferred, std::move(tree), "excellent extraction");
}

}  // namespace stablereg
