#include "stablereg/gen.hpp"

#include <sstream>

#include "stablereg/errors.hpp"
#include "stablereg/rng.hpp"

namespace stablereg {

GenSpec GenSpec::half_graph(std::size_t n) {
  GenSpec s;
  s.kind = Kind::half_graph;
  s.n = n;
  return s;
}

GenSpec GenSpec::clique_union(std::size_t count, std::size_t size) {
  GenSpec s;
  s.kind = Kind::clique_union;
  s.count = count;
  s.size = size;
  return s;
}

GenSpec GenSpec::blowup(std::vector<std::pair<std::size_t, std::size_t>> template_edges,
                        std::vector<std::size_t> block_sizes, std::vector<BlockKind> block_kinds) {
  GenSpec s;
  s.kind = Kind::blowup;
  s.template_edges = std::move(template_edges);
  s.block_sizes = std::move(block_sizes);
  s.block_kinds = std::move(block_kinds);
  return s;
}

GenSpec GenSpec::random_gnp(std::size_t n, double p, std::uint64_t seed) {
  GenSpec s;
  s.kind = Kind::random_gnp;
  s.n = n;
  s.p = p;
  s.seed = seed;
  return s;
}

GenSpec GenSpec::noisy(GenSpec base, std::size_t flip_count, std::uint64_t seed) {
  GenSpec s;
  s.kind = Kind::noisy;
  s.base = std::make_shared<const GenSpec>(std::move(base));
  s.flip_count = flip_count;
  s.seed = seed;
  return s;
}

std::size_t GenSpec::vertex_count() const {
  switch (kind) {
    case Kind::half_graph: return 2 * n;
    case Kind::clique_union: return count * size;
    case Kind::blowup: {
      std::size_t total = 0;
      for (std::size_t b : block_sizes) total += b;
      return total;
    }
    case Kind::random_gnp: return n;
    case Kind::noisy: return base ? base->vertex_count() : 0;
  }
  return 0;
}

void GenSpec::validate() const {
  switch (kind) {
    case Kind::half_graph:
      if (n == 0) throw ValidationError("half_graph needs n > 0");
      break;
    case Kind::clique_union:
      if (count == 0 || size == 0) throw ValidationError("clique_union needs positive count and size");
      break;
    case Kind::blowup:
      if (block_sizes.empty()) throw ValidationError("blowup needs at least one block");
      if (block_kinds.size() != block_sizes.size()) throw ValidationError("blowup needs one kind per block");
      for (std::size_t b : block_sizes)
        if (b == 0) throw ValidationError("blowup block sizes must be positive");
      for (auto [u, v] : template_edges)
        if (u >= block_sizes.size() || v >= block_sizes.size() || u == v)
          throw ValidationError("blowup template edge " + std::to_string(u) + "-" + std::to_string(v) + " is invalid");
      break;
    case Kind::random_gnp:
      if (n == 0) throw ValidationError("random_gnp needs n > 0");
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("random_gnp needs p in [0,1]");
      break;
    case Kind::noisy: {
      if (!base) throw ValidationError("noisy needs a base");
      base->validate();
      const std::size_t v = base->vertex_count();
      if (flip_count > v * (v - 1) / 2) throw ValidationError("flip_count exceeds the number of vertex pairs");
      break;
    }
  }
  if (vertex_count() > (std::size_t{1} << 24)) throw ValidationError("generated graph exceeds 2^24 vertices");
}

std::string to_string(BlockKind kind) { return kind == BlockKind::clique ? "clique" : "independent"; }

std::string GenSpec::str() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::half_graph: out << "half_graph:" << n; break;
    case Kind::clique_union: out << "clique_union:" << count << "," << size; break;
    case Kind::random_gnp: out << "gnp:" << n << "," << p; break;
    case Kind::blowup: {
      out << "blowup:";
      for (std::size_t i = 0; i < template_edges.size(); ++i)
        out << (i ? "/" : "") << template_edges[i].first << "-" << template_edges[i].second;
      out << ":";
      for (std::size_t i = 0; i < block_sizes.size(); ++i) out << (i ? "/" : "") << block_sizes[i];
      out << ":";
      for (std::size_t i = 0; i < block_kinds.size(); ++i)
        out << (i ? "/" : "") << (block_kinds[i] == BlockKind::clique ? "c" : "i");
      break;
    }
    case Kind::noisy: out << "noisy:" << flip_count << ":" << (base ? base->str() : ""); break;
  }
  return out.str();
}

namespace {

void add_block_annotations(Generated& out, std::vector<std::vector<Vertex>> blocks,
                           const std::vector<std::vector<bool>>& between, const std::vector<BlockKind>& kinds) {
  const std::size_t count = blocks.size();
  out.blocks = std::move(blocks);
  out.intended.assign(count, std::vector<Truth>(count, Truth::zero));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j)
      out.intended[i][j] = truth_of(i == j ? kinds[i] == BlockKind::clique : static_cast<bool>(between[i][j]));
}

}  // namespace

Generated generate(const GenSpec& spec) {
  spec.validate();
  Generated out;
  const std::size_t n = spec.vertex_count();
  switch (spec.kind) {
    case GenSpec::Kind::half_graph: {
      GraphBuilder b(n);
      for (std::size_t i = 0; i < spec.n; ++i)
        for (std::size_t j = i + 1; j < spec.n; ++j) b.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(spec.n + j));
      out.graph = std::move(b).build();
      out.half_size = spec.n;
      break;
    }
    case GenSpec::Kind::clique_union:
    case GenSpec::Kind::blowup: {
      std::vector<std::size_t> sizes;
      std::vector<BlockKind> kinds;
      std::vector<std::vector<bool>> between;
      if (spec.kind == GenSpec::Kind::clique_union) {
        sizes.assign(spec.count, spec.size);
        kinds.assign(spec.count, BlockKind::clique);
        between.assign(spec.count, std::vector<bool>(spec.count, false));
      } else {
        sizes = spec.block_sizes;
        kinds = spec.block_kinds;
        between.assign(sizes.size(), std::vector<bool>(sizes.size(), false));
        for (auto [u, v] : spec.template_edges) between[u][v] = between[v][u] = true;
      }
      std::vector<std::vector<Vertex>> blocks(sizes.size());
      Vertex next = 0;
      for (std::size_t i = 0; i < sizes.size(); ++i)
        for (std::size_t k = 0; k < sizes[i]; ++k) blocks[i].push_back(next++);
      GraphBuilder b(n);
      for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i; j < blocks.size(); ++j) {
          const bool connect = i == j ? kinds[i] == BlockKind::clique : static_cast<bool>(between[i][j]);
          if (!connect) continue;
          for (std::size_t x = 0; x < blocks[i].size(); ++x)
            for (std::size_t y = (i == j ? x + 1 : 0); y < blocks[j].size(); ++y) b.add_edge(blocks[i][x], blocks[j][y]);
        }
      out.graph = std::move(b).build();
      add_block_annotations(out, std::move(blocks), between, kinds);
      break;
    }
    case GenSpec::Kind::random_gnp: {
      GraphBuilder b(n);
      Rng rng = Rng::stream(spec.seed, "gnp");
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
          if (rng.bernoulli(spec.p)) b.add_edge(u, v);
      out.graph = std::move(b).build();
      break;
    }
    case GenSpec::Kind::noisy: {
      Generated base = generate(*spec.base);
      GraphBuilder b(n);
      for (auto [u, v] : base.graph.edges()) b.add_edge(u, v);
      Rng rng = Rng::stream(spec.seed, "noise");
      const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
      // Pair index t enumerates (u, v), u < v, row by row.
      for (std::uint64_t t : rng.sample_distinct(pairs, spec.flip_count)) {
        std::uint64_t u = 0;
        std::uint64_t row = n - 1;
        while (t >= row) {
          t -= row;
          ++u;
          --row;
        }
        b.toggle_edge(static_cast<Vertex>(u), static_cast<Vertex>(u + 1 + t));
      }
      out.graph = std::move(b).build();
      out.blocks = std::move(base.blocks);
      out.intended = std::move(base.intended);
      out.half_size = base.half_size;
      break;
    }
  }
  return out;
}

}  // namespace stablereg
