#include "stablereg/detect.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>
#include <unordered_set>

#include "stablereg/errors.hpp"

namespace stablereg {

namespace {

struct OutOfBudget {};

class Counter {
 public:
  explicit Counter(std::uint64_t budget) : budget_(budget) {}
  void tick() {
    if (++nodes_ > budget_) throw OutOfBudget{};
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
};

bool all_distinct(std::vector<Vertex> vs) {
  std::sort(vs.begin(), vs.end());
  return std::adjacent_find(vs.begin(), vs.end()) == vs.end();
}

Bits row_bits(const Graph& g, Vertex v) {
  Bits bits(g.size());
  auto row = g.row(v);
  std::copy(row.begin(), row.end(), bits.words().begin());
  return bits;
}

std::size_t count_outside(const Bits& candidates, const Bits& used) {
  return popcount_and_not(candidates.words(), used.words());
}

class OrderSearch {
 public:
  OrderSearch(const Graph& g, std::size_t k, Counter& counter)
      : g_(g), k_(k), counter_(counter), used_(g.size()), a_(k), b_(k) {}

  std::optional<OrderWitness> run() {
    Bits all(g_.size());
    all.set_all();
    if (place_a(0, all, all)) return OrderWitness{a_, b_};
    return std::nullopt;
  }

 private:
  // allowed_a: vertices non-adjacent to every earlier b; allowed_b: adjacent to every earlier a.
  bool place_a(std::size_t j, const Bits& allowed_a, const Bits& allowed_b) {
    if (j == k_) return true;
    Bits candidates = allowed_a;
    candidates.and_not(used_);
    for (std::size_t v = candidates.first(); v < g_.size(); v = candidates.next(v + 1)) {
      counter_.tick();
      auto a = static_cast<Vertex>(v);
      used_.set(a);
      Bits next_b = allowed_b;
      next_b.and_words(g_.row(a));
      if (count_outside(allowed_b, used_) >= k_ - j && count_outside(next_b, used_) + 1 >= k_ - j) {
        a_[j] = a;
        if (place_b(j, allowed_a, allowed_b, next_b)) return true;
      }
      used_.reset(a);
    }
    return false;
  }

  bool place_b(std::size_t j, const Bits& allowed_a, const Bits& allowed_b, const Bits& next_b) {
    Bits candidates = allowed_b;
    candidates.and_not(used_);
    for (std::size_t v = candidates.first(); v < g_.size(); v = candidates.next(v + 1)) {
      counter_.tick();
      auto b = static_cast<Vertex>(v);
      used_.set(b);
      Bits next_a = allowed_a;
      next_a.and_not_words(g_.row(b));
      if (count_outside(next_a, used_) + 1 >= k_ - j) {
        b_[j] = b;
        if (place_a(j + 1, next_a, next_b)) return true;
      }
      used_.reset(b);
    }
    return false;
  }

  const Graph& g_;
  std::size_t k_;
  Counter& counter_;
  Bits used_;
  std::vector<Vertex> a_, b_;
};

class TreeSearch {
 public:
  TreeSearch(const Graph& g, std::size_t height, Counter& counter)
      : g_(g), height_(height), counter_(counter), used_(g.size()), sets_(std::size_t{2} << height),
        internal_(std::size_t{1} << height) {
    preorder(1);
  }

  std::optional<TreeWitness> run() {
    sets_[1] = Bits(g_.size());
    sets_[1].set_all();
    if (assign(0)) return witness_;
    return std::nullopt;
  }

 private:
  void preorder(std::size_t node) {
    if (node >= (std::size_t{1} << height_)) return;
    order_.push_back(node);
    preorder(2 * node);
    preorder(2 * node + 1);
  }

  bool assign(std::size_t pos) {
    if (pos == order_.size()) return finish();
    std::size_t node = order_[pos];
    auto depth = static_cast<std::size_t>(std::bit_width(node) - 1);
    std::size_t need = std::size_t{1} << (height_ - depth - 1);
    const Bits& here = sets_[node];
    for (Vertex b = 0; b < g_.size(); ++b) {
      if (used_.test(b)) continue;
      counter_.tick();
      Bits one = here;
      one.and_words(g_.row(b));
      Bits zero = here;
      zero.and_not_words(g_.row(b));
      zero.reset(b);
      used_.set(b);
      if (count_outside(one, used_) >= need && count_outside(zero, used_) >= need) {
        internal_[node] = b;
        sets_[2 * node + 1] = std::move(one);
        sets_[2 * node] = std::move(zero);
        if (assign(pos + 1)) return true;
      }
      used_.reset(b);
    }
    return false;
  }

  bool finish() {
    std::size_t first_leaf = std::size_t{1} << height_;
    std::vector<Vertex> leaves(first_leaf);
    for (std::size_t leaf = first_leaf; leaf < 2 * first_leaf; ++leaf) {
      Bits free = sets_[leaf];
      free.and_not(used_);
      std::size_t v = free.first();
      if (v == g_.size()) return false;
      leaves[leaf - first_leaf] = static_cast<Vertex>(v);
    }
    witness_.height = height_;
    witness_.leaves = std::move(leaves);
    witness_.internal = internal_;
    return true;
  }

  const Graph& g_;
  std::size_t height_;
  Counter& counter_;
  Bits used_;
  std::vector<Bits> sets_;
  std::vector<Vertex> internal_;
  std::vector<std::size_t> order_;
  TreeWitness witness_;
};

class IndependenceSearch {
 public:
  IndependenceSearch(const Graph& g, std::size_t k, Counter& counter)
      : g_(g), k_(k), counter_(counter), patterns_(g.size(), 0), chosen_(g.size(), false) {}

  std::optional<IndependenceWitness> run() {
    if (choose(0, 0)) return witness_;
    return std::nullopt;
  }

 private:
  bool covers(std::size_t bits) const {
    std::vector<bool> seen(std::size_t{1} << bits, false);
    std::size_t distinct = 0;
    for (Vertex v = 0; v < g_.size(); ++v) {
      if (chosen_[v] || seen[patterns_[v]]) continue;
      seen[patterns_[v]] = true;
      if (++distinct == seen.size()) return true;
    }
    return false;
  }

  bool choose(std::size_t j, Vertex from) {
    if (j == k_) return finish();
    for (Vertex a = from; a < g_.size(); ++a) {
      counter_.tick();
      chosen_[a] = true;
      for (Vertex v = 0; v < g_.size(); ++v)
        if (g_.adjacent(a, v)) patterns_[v] |= std::uint32_t{1} << j;
      a_.push_back(a);
      if (covers(j + 1) && choose(j + 1, a + 1)) return true;
      a_.pop_back();
      for (Vertex v = 0; v < g_.size(); ++v) patterns_[v] &= ~(std::uint32_t{1} << j);
      chosen_[a] = false;
    }
    return false;
  }

  bool finish() {
    std::size_t masks = std::size_t{1} << k_;
    std::vector<Vertex> b(masks);
    std::vector<bool> found(masks, false);
    for (Vertex v = 0; v < g_.size(); ++v) {
      if (chosen_[v] || found[patterns_[v]]) continue;
      found[patterns_[v]] = true;
      b[patterns_[v]] = v;
    }
    if (std::find(found.begin(), found.end(), false) != found.end()) return false;
    witness_ = IndependenceWitness{a_, std::move(b)};
    return true;
  }

  const Graph& g_;
  std::size_t k_;
  Counter& counter_;
  std::vector<std::uint32_t> patterns_;
  std::vector<bool> chosen_;
  std::vector<Vertex> a_;
  IndependenceWitness witness_;
};

void remap(OrderWitness& w, const std::vector<Vertex>& original) {
  for (auto& v : w.a) v = original[v];
  for (auto& v : w.b) v = original[v];
}

void remap(IndependenceWitness& w, const std::vector<Vertex>& original) {
  for (auto& v : w.a) v = original[v];
  for (auto& v : w.b) v = original[v];
}

void remap(TreeWitness& w, const std::vector<Vertex>& original) {
  for (auto& v : w.leaves) v = original[v];
  for (std::size_t i = 1; i < w.internal.size(); ++i) w.internal[i] = original[w.internal[i]];
}

template <class W, class Search>
SearchResult<W> run_search(const Graph& g, std::size_t cap, const SearchOptions& options, Search&& search) {
  SearchResult<W> result;
  Counter counter(options.budget);
  try {
    if (options.compress_twins) {
      TwinReduction reduced = compress_twins(g, cap);
      result.witness = search(reduced.graph, counter);
      if (result.witness) remap(*result.witness, reduced.original);
    } else {
      result.witness = search(g, counter);
    }
    result.status = result.witness ? SearchStatus::found : SearchStatus::none;
  } catch (const OutOfBudget&) {
    result.status = SearchStatus::budget_exhausted;
  }
  result.nodes = counter.nodes();
  return result;
}

}  // namespace

bool is_order_witness(const Graph& g, const OrderWitness& w) {
  std::size_t k = w.a.size();
  if (k == 0 || w.b.size() != k) return false;
  std::vector<Vertex> all = w.a;
  all.insert(all.end(), w.b.begin(), w.b.end());
  for (Vertex v : all)
    if (v >= g.size()) return false;
  if (!all_distinct(all)) return false;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (!g.adjacent(w.a[i], w.b[j]) || g.adjacent(w.a[j], w.b[i])) return false;
  return true;
}

bool is_tree_witness(const Graph& g, const TreeWitness& w) {
  std::size_t h = w.height;
  if (h == 0 || h > 20) return false;
  std::size_t leaves = std::size_t{1} << h;
  if (w.leaves.size() != leaves || w.internal.size() != leaves) return false;
  std::vector<Vertex> all(w.leaves);
  all.insert(all.end(), w.internal.begin() + 1, w.internal.end());
  for (Vertex v : all)
    if (v >= g.size()) return false;
  if (!all_distinct(all)) return false;
  for (std::size_t eta = 0; eta < leaves; ++eta) {
    std::size_t node = 1;
    for (std::size_t d = 0; d < h; ++d) {
      bool branch = (eta >> (h - 1 - d)) & 1U;
      if (g.adjacent(w.leaves[eta], w.internal[node]) != branch) return false;
      node = 2 * node + (branch ? 1 : 0);
    }
  }
  return true;
}

bool is_independence_witness(const Graph& g, const IndependenceWitness& w) {
  std::size_t k = w.a.size();
  if (k == 0 || k > 20 || w.b.size() != (std::size_t{1} << k)) return false;
  std::vector<Vertex> all(w.a);
  all.insert(all.end(), w.b.begin(), w.b.end());
  for (Vertex v : all)
    if (v >= g.size()) return false;
  if (!all_distinct(all)) return false;
  for (std::size_t u = 0; u < w.b.size(); ++u)
    for (std::size_t l = 0; l < k; ++l)
      if (g.adjacent(w.a[l], w.b[u]) != (((u >> l) & 1U) != 0)) return false;
  return true;
}

std::string node_label(std::size_t heap_index) {
  std::string label;
  for (std::size_t i = heap_index; i > 1; i /= 2) label.push_back((i & 1U) ? '1' : '0');
  std::reverse(label.begin(), label.end());
  return label;
}

std::string leaf_label(std::size_t leaf, std::size_t height) {
  std::string label(height, '0');
  for (std::size_t d = 0; d < height; ++d)
    if ((leaf >> (height - 1 - d)) & 1U) label[d] = '1';
  return label;
}

SearchResult<OrderWitness> find_order_witness(const Graph& g, std::size_t k, const SearchOptions& options) {
  if (k == 0) throw PreconditionError("k >= 1", "order witness length must be positive");
  return run_search<OrderWitness>(g, 2 * k, options, [k](const Graph& h, Counter& c) {
    if (h.size() < 2 * k) return std::optional<OrderWitness>{};
    return OrderSearch(h, k, c).run();
  });
}

SearchResult<TreeWitness> find_tree_witness(const Graph& g, std::size_t height, const SearchOptions& options) {
  if (height == 0) throw PreconditionError("h >= 1", "tree height must be positive");
  if (height > 20) throw PreconditionError("h <= 20", "tree height too large");
  std::size_t vertices = (std::size_t{2} << height) - 1;
  return run_search<TreeWitness>(g, vertices, options, [height, vertices](const Graph& h, Counter& c) {
    if (h.size() < vertices) return std::optional<TreeWitness>{};
    return TreeSearch(h, height, c).run();
  });
}

SearchResult<IndependenceWitness> find_independence_witness(const Graph& g, std::size_t k,
                                                            const SearchOptions& options) {
  if (k == 0) throw PreconditionError("k >= 1", "independence witness size must be positive");
  if (k > 20) throw PreconditionError("k <= 20", "independence witness size too large");
  std::size_t vertices = k + (std::size_t{1} << k);
  return run_search<IndependenceWitness>(g, vertices, options, [k, vertices](const Graph& h, Counter& c) {
    if (h.size() < vertices) return std::optional<IndependenceWitness>{};
    return IndependenceSearch(h, k, c).run();
  });
}

OrderBound minimal_order_bound(const Graph& g, std::size_t k_max, const SearchOptions& options) {
  if (k_max == 0) throw PreconditionError("k_max >= 1", "bound search needs k_max >= 1");
  OrderBound bound;
  for (std::size_t k = 1; k <= k_max; ++k) {
    auto result = find_order_witness(g, k, options);
    bound.nodes += result.nodes;
    if (result.status == SearchStatus::budget_exhausted)
      throw BudgetExhausted("order witness of length " + std::to_string(k));
    if (result.status == SearchStatus::none) {
      bound.value = k;
      bound.certified = true;
      return bound;
    }
    bound.witness_below = std::move(result.witness);
  }
  bound.value = k_max + 1;
  return bound;
}

TreeBound tree_bound(const Graph& g, std::size_t h_max, const SearchOptions& options) {
  if (h_max == 0) throw PreconditionError("h_max >= 1", "bound search needs h_max >= 1");
  TreeBound bound;
  for (std::size_t h = 1; h <= h_max; ++h) {
    auto result = find_tree_witness(g, h, options);
    bound.nodes += result.nodes;
    if (result.status == SearchStatus::budget_exhausted)
      throw BudgetExhausted("tree witness of height " + std::to_string(h));
    if (result.status == SearchStatus::none) {
      bound.value = h;
      bound.certified = true;
      return bound;
    }
    bound.witness_below = std::move(result.witness);
  }
  bound.value = h_max + 1;
  return bound;
}

std::size_t declared_tree_bound(std::size_t k_star) {
  if (k_star > 60) throw PreconditionError("k* <= 60", "declared tree bound overflows");
  return (std::size_t{1} << (k_star + 2)) - 3;
}

std::size_t trace_count(const Graph& g, const VertexSet& a) {
  std::unordered_set<Bits, BitsHash> traces;
  for (Vertex b = 0; b < g.size(); ++b) {
    Bits trace = a.bits();
    trace.and_words(g.row(b));
    traces.insert(std::move(trace));
  }
  return traces.size();
}

std::uint64_t shatter_bound(std::uint64_t m, std::size_t k) {
  constexpr std::uint64_t cap = ~std::uint64_t{0};
  std::uint64_t total = 0;
  std::uint64_t binom = 1;
  for (std::size_t i = 0; i <= k && i <= m; ++i) {
    if (i > 0) {
      unsigned __int128 next = static_cast<unsigned __int128>(binom) * (m - i + 1) / i;
      if (next > cap) return cap;
      binom = static_cast<std::uint64_t>(next);
    }
    if (total > cap - binom) return cap;
    total += binom;
  }
  return total;
}

TwinReduction compress_twins(const Graph& g, std::size_t cap) {
  std::unordered_map<Bits, std::vector<Vertex>, BitsHash> open_classes;
  std::unordered_map<Bits, std::vector<Vertex>, BitsHash> closed_classes;
  for (Vertex v = 0; v < g.size(); ++v) {
    Bits open = row_bits(g, v);
    Bits closed = open;
    closed.set(v);
    open_classes[std::move(open)].push_back(v);
    closed_classes[std::move(closed)].push_back(v);
  }
  std::vector<bool> keep(g.size(), true);
  for (auto* classes : {&open_classes, &closed_classes})
    for (auto& [key, members] : *classes)
      for (std::size_t i = cap; i < members.size(); ++i) keep[members[i]] = false;
  TwinReduction out;
  for (Vertex v = 0; v < g.size(); ++v)
    if (keep[v]) out.original.push_back(v);
  out.graph = g.induced(out.original);
  return out;
}

}  // namespace stablereg
