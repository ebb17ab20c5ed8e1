#include "stablereg/graph.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "stablereg/errors.hpp"

namespace stablereg {

namespace {

std::uint64_t next_graph_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

}  // namespace

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edges_);
  for (Vertex u = 0; u < n_; ++u) {
    Bits upper(n_);
    for (std::size_t w = 0; w < stride_; ++w) upper.words()[w] = rows_[u * stride_ + w];
    for (std::size_t v = upper.next(u + 1); v < n_; v = upper.next(v + 1)) out.emplace_back(u, static_cast<Vertex>(v));
  }
  return out;
}

Graph Graph::induced(std::span<const Vertex> vertices) const {
  GraphBuilder builder(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      if (adjacent(vertices[i], vertices[j])) builder.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(j));
  return std::move(builder).build();
}

GraphBuilder::GraphBuilder(std::size_t n) : n_(n), stride_(words_for(n)), rows_(n * stride_, 0) {}

void GraphBuilder::check(Vertex u, Vertex v) const {
  if (u >= n_ || v >= n_)
    throw ValidationError("vertex id out of range: " + std::to_string(std::max(u, v)) + " >= " + std::to_string(n_));
  if (u == v) throw ValidationError("self-loop at vertex " + std::to_string(u));
}

GraphBuilder& GraphBuilder::add_edge(Vertex u, Vertex v) {
  check(u, v);
  rows_[u * stride_ + v / 64] |= Word{1} << (v % 64);
  rows_[v * stride_ + u / 64] |= Word{1} << (u % 64);
  return *this;
}

GraphBuilder& GraphBuilder::toggle_edge(Vertex u, Vertex v) {
  check(u, v);
  rows_[u * stride_ + v / 64] ^= Word{1} << (v % 64);
  rows_[v * stride_ + u / 64] ^= Word{1} << (u % 64);
  return *this;
}

Graph GraphBuilder::build() && {
  Graph g;
  g.n_ = n_;
  g.stride_ = stride_;
  g.id_ = next_graph_id();
  g.rows_ = std::move(rows_);
  g.degrees_.resize(n_);
  std::size_t total = 0;
  for (Vertex v = 0; v < n_; ++v) {
    std::size_t d = 0;
    for (std::size_t w = 0; w < stride_; ++w) d += static_cast<std::size_t>(std::popcount(g.rows_[v * stride_ + w]));
    g.degrees_[v] = static_cast<std::uint32_t>(d);
    total += d;
  }
  g.edges_ = total / 2;
  return g;
}

VertexSet::VertexSet(const Graph& g, std::span<const Vertex> members) : VertexSet(g) {
  for (Vertex v : members) {
    if (v >= g.size()) throw ValidationError("vertex id out of range: " + std::to_string(v));
    bits_.set(v);
  }
}

VertexSet VertexSet::all(const Graph& g) {
  VertexSet s(g);
  s.bits_.set_all();
  return s;
}

bool VertexSet::subset_of(const VertexSet& other) const {
  return popcount_and_not(bits_.words(), other.bits_.words()) == 0;
}

bool VertexSet::disjoint_from(const VertexSet& other) const {
  return popcount_and(bits_.words(), other.bits_.words()) == 0;
}

VertexSet& VertexSet::operator|=(const VertexSet& other) {
  bits_ |= other.bits_;
  return *this;
}

VertexSet& VertexSet::operator-=(const VertexSet& other) {
  bits_.and_not(other.bits_);
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& other) {
  bits_ &= other.bits_;
  return *this;
}

std::vector<std::size_t> Partition::piece_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(pieces.size());
  for (const auto& p : pieces) sizes.push_back(p.size());
  return sizes;
}

void Partition::validate(const VertexSet& ground) const {
  VertexSet seen = remainder;
  if (seen.universe() != ground.universe()) throw ValidationError("remainder belongs to a different graph");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& piece = pieces[i];
    if (piece.universe() != ground.universe()) throw ValidationError("piece " + std::to_string(i) + " belongs to a different graph");
    if (piece.empty()) throw ValidationError("piece " + std::to_string(i) + " is empty");
    if (!piece.disjoint_from(seen)) throw ValidationError("piece " + std::to_string(i) + " overlaps an earlier piece or the remainder");
    seen |= piece;
  }
  if (!(seen == ground)) throw ValidationError("pieces and remainder do not cover the ground set exactly");
}

bool is_equitable(std::span<const VertexSet> pieces) {
  if (pieces.empty()) return true;
  auto [lo, hi] = std::minmax_element(pieces.begin(), pieces.end(),
                                      [](const VertexSet& a, const VertexSet& b) { return a.size() < b.size(); });
  return hi->size() - lo->size() <= 1;
}

LoadedGraph read_edge_list(std::istream& in, bool compact_ids) {
  std::optional<std::size_t> declared;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  auto parse_int = [&](std::string_view token) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) throw ParseError(line_no, "expected an integer, got '" + std::string(token) + "'");
    if (value < 0) throw ParseError(line_no, "negative vertex id " + std::string(token));
    return value;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find_first_of("#%"); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens[0] == "n") {
      if (seen_data || declared) throw ParseError(line_no, "header 'n <count>' must be the first data line");
      if (tokens.size() != 2) throw ParseError(line_no, "header must be 'n <count>'");
      declared = static_cast<std::size_t>(parse_int(tokens[1]));
      seen_data = true;
      continue;
    }
    if (tokens.size() != 2) throw ParseError(line_no, "expected 'u v'");
    seen_data = true;
    auto u = parse_int(tokens[0]);
    auto v = parse_int(tokens[1]);
    if (u == v) throw ParseError(line_no, "self-loop at vertex " + tokens[0]);
    if (declared && (static_cast<std::size_t>(u) >= *declared || static_cast<std::size_t>(v) >= *declared))
      throw ParseError(line_no, "vertex id exceeds declared n = " + std::to_string(*declared));
    raw.emplace_back(u, v);
  }

  LoadedGraph out;
  std::map<std::int64_t, Vertex> rename;
  std::size_t n = 0;
  if (compact_ids) {
    for (auto [u, v] : raw) rename.emplace(u, 0), rename.emplace(v, 0);
    if (declared)
      for (std::size_t v = 0; v < *declared; ++v) rename.emplace(static_cast<std::int64_t>(v), 0);
    for (auto& [orig, id] : rename) {
      id = static_cast<Vertex>(out.original_ids.size());
      out.original_ids.push_back(orig);
    }
    n = rename.size();
    out.identity_ids = std::all_of(rename.begin(), rename.end(), [](const auto& kv) { return kv.first == kv.second; });
  } else {
    std::int64_t max_id = -1;
    for (auto [u, v] : raw) max_id = std::max({max_id, u, v});
    n = declared ? *declared : static_cast<std::size_t>(max_id + 1);
    out.original_ids.resize(n);
    for (std::size_t v = 0; v < n; ++v) out.original_ids[v] = static_cast<std::int64_t>(v);
  }
  if (n >= (std::size_t{1} << 31)) throw ValidationError("graph too large");
  GraphBuilder builder(n);
  for (auto [u, v] : raw) {
    Vertex a = compact_ids ? rename.at(u) : static_cast<Vertex>(u);
    Vertex b = compact_ids ? rename.at(v) : static_cast<Vertex>(v);
    builder.add_edge(a, b);
  }
  out.graph = std::move(builder).build();
  return out;
}

LoadedGraph load_edge_list(const std::string& path, bool compact_ids) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_edge_list(in, compact_ids);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "n " << g.size() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace stablereg
