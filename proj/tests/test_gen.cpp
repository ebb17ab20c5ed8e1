#include <doctest.h>

#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/gen.hpp"
#include "stablereg/measures.hpp"
#include "support.hpp"

using namespace stablereg;
using namespace stablereg::testing;

namespace {

std::size_t differing_pairs(const Graph& a, const Graph& b) {
  std::size_t count = 0;
  for (Vertex u = 0; u < a.size(); ++u)
    for (Vertex v = u + 1; v < a.size(); ++v) count += a.adjacent(u, v) != b.adjacent(u, v);
  return count;
}

}  // namespace

TEST_SUITE("gen") {
  TEST_CASE("half graph H3 has a_i R b_j exactly when i < j") {
    auto h = generate(GenSpec::half_graph(3));
    CHECK(h.graph.size() == 6);
    CHECK(h.graph.edge_count() == 3);
    CHECK(h.half_size == 3);
    for (Vertex i = 0; i < 3; ++i)
      for (Vertex j = 0; j < 3; ++j) CHECK(h.graph.adjacent(i, 3 + j) == (i < j));
  }

  TEST_CASE("two triangles") {
    auto c = generate(GenSpec::clique_union(2, 3));
    CHECK(c.graph.size() == 6);
    CHECK(c.graph.edge_count() == 6);
    CHECK(c.blocks.size() == 2);
    CHECK(c.intended[0][0] == Truth::one);
    CHECK(c.intended[0][1] == Truth::zero);
  }

  TEST_CASE("noise toggles exactly the requested number of pairs") {
    auto base = GenSpec::clique_union(2, 64);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto noisy = generate(GenSpec::noisy(base, 10, seed));
      CHECK(differing_pairs(noisy.graph, generate(base).graph) == 10);
      CHECK(noisy.blocks.size() == 2);
    }
  }

  TEST_CASE("seeded kinds are deterministic") {
    auto a = generate(GenSpec::random_gnp(80, 0.3, 5)).graph;
    auto b = generate(GenSpec::random_gnp(80, 0.3, 5)).graph;
    auto c = generate(GenSpec::random_gnp(80, 0.3, 6)).graph;
    CHECK(a.edges() == b.edges());
    CHECK(a.edges() != c.edges());
    auto na = generate(GenSpec::noisy(GenSpec::half_graph(20), 30, 2)).graph;
    auto nb = generate(GenSpec::noisy(GenSpec::half_graph(20), 30, 2)).graph;
    CHECK(na.edges() == nb.edges());
  }

  TEST_CASE("half graphs have a witness of length n and none longer") {
    for (std::size_t n = 2; n <= 6; ++n) {
      Graph g = half_graph(n);
      auto r = find_order_witness(g, n);
      REQUIRE(r.status == SearchStatus::found);
      CHECK(is_order_witness(g, *r.witness));
      CHECK(find_order_witness(g, n + 1).status == SearchStatus::none);
    }
  }

  TEST_CASE("intended blocks of a noisy blow-up are uniform with their template value") {
    auto base = GenSpec::blowup({{0, 1}, {1, 2}}, {20, 20, 20},
                                {BlockKind::clique, BlockKind::independent, BlockKind::clique});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto gen = generate(GenSpec::noisy(base, 18, seed));  // about 1% of the pairs
      Ratio eps(1, 10);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          if (i == j) continue;
          VertexSet a(gen.graph, gen.blocks[i]), b(gen.graph, gen.blocks[j]);
          auto u = check_uniform_pair(gen.graph, a, b, eps, eps);
          CHECK(u.is_uniform);
          REQUIRE(u.trv);
          CHECK(*u.trv == gen.intended[i][j]);
        }
    }
  }

  TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(GenSpec::clique_union(0, 4).validate(), ValidationError);
    CHECK_THROWS_AS(GenSpec::blowup({{0, 3}}, {2, 2}, {BlockKind::clique, BlockKind::clique}).validate(), ValidationError);
    CHECK_THROWS_AS(GenSpec::random_gnp(10, 1.5, 0).validate(), ValidationError);
    CHECK_THROWS_AS(GenSpec::noisy(GenSpec::clique_union(1, 3), 4, 0).validate(), ValidationError);
    CHECK_NOTHROW(GenSpec::noisy(GenSpec::clique_union(1, 3), 3, 0).validate());
  }
}
