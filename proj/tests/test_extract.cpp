#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/extract.hpp"
#include "stablereg/gen.hpp"
#include "stablereg/indiscernible.hpp"
#include "stablereg/rng.hpp"
#include "stablereg/transversal.hpp"
#include "support.hpp"

using namespace stablereg;
using namespace stablereg::testing;

namespace {

oracle::Ids ids_of(const VertexSet& s) {
  oracle::Ids out;
  s.for_each([&](Vertex v) { out.push_back(static_cast<int>(v)); });
  return out;
}

oracle::Ids ids_of(std::span<const Vertex> seq) { return {seq.begin(), seq.end()}; }

Graph blowup_graph(std::size_t block, std::uint64_t flips, std::uint64_t seed) {
  auto base = GenSpec::blowup({{0, 1}, {1, 2}, {2, 3}}, {block, block, block, block},
                              {BlockKind::clique, BlockKind::independent, BlockKind::clique, BlockKind::independent});
  return flips ? generate(GenSpec::noisy(base, flips, seed)).graph : generate(base).graph;
}

std::vector<Vertex> interleaved(std::size_t count, std::size_t size) {
  std::vector<Vertex> seq;
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t c = 0; c < count; ++c) seq.push_back(static_cast<Vertex>(c * size + i));
  return seq;
}

std::vector<Vertex> shuffled_vertices(std::size_t n, std::uint64_t seed) {
  std::vector<Vertex> seq(n);
  std::iota(seq.begin(), seq.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<Vertex>(seq));
  return seq;
}

}  // namespace

TEST_SUITE("extract") {
  TEST_CASE("power and ratio sequences validate their relations") {
    auto ms = power_sequence(4096, Ratio(1, 2), 3);
    CHECK(ms.values == std::vector<std::size_t>{4096, 64, 8});
    CHECK(ms.next_size(2) == 2);
    MSequence ratio{MSequence::Mode::ratio, Ratio(1, 16), {256, 16}};
    CHECK_NOTHROW(ratio.validate());
    CHECK(ratio.level_ratio(0) == Ratio(1, 16));
    MSequence not_dividing{MSequence::Mode::ratio, Ratio(1, 4), {100, 24}};
    CHECK_THROWS_AS(not_dividing.validate(), PreconditionError);
    MSequence increasing{MSequence::Mode::power, Ratio(1, 2), {16, 16}};
    CHECK_THROWS_AS(increasing.validate(), PreconditionError);
  }

  TEST_CASE("a set inside one clique is returned at the root") {
    Graph g = clique_union(4, 64);
    VertexSet a = range_set(g, 64, 80);
    auto ext = extract_indivisible(g, a, power_sequence(16, Ratio(1, 2), 2));
    CHECK(ext.level == 0);
    CHECK(ext.piece == a);
  }

  TEST_CASE("half graph side overflows a small declared tree bound") {
    Graph g = half_graph(64);
    VertexSet left = range_set(g, 0, 64);
    try {
      extract_indivisible(g, left, power_sequence(64, Ratio(1, 2), 2));
      FAIL("expected a depth overflow");
    } catch (const DepthOverflow& e) {
      CHECK(e.tree().depth == 2);
      if (e.witness_valid()) CHECK(is_tree_witness(g, e.witness()));
      auto m = oracle::matrix_of(g);
      CHECK(oracle::tree_witness_exists(m, 2));
    }
  }

  TEST_CASE("extracted sets are indivisible at the next level size") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      Graph g = blowup_graph(16, 6 * seed, seed);
      auto m = oracle::matrix_of(g);
      VertexSet a(g);
      for (Vertex v : shuffled_vertices(g.size(), seed)) {
        if (a.size() == 27) break;
        a.insert(v);
      }
      auto ms = power_sequence(27, Ratio(2, 3), 3);
      try {
        auto ext = extract_indivisible(g, a, ms);
        CHECK(ext.piece.size() == ms.values[ext.level]);
        CHECK(ext.piece.subset_of(a));
        CHECK(oracle::indivisible_power(m, ids_of(ext.piece), 2, 3));
      } catch (const DepthOverflow& e) {
        CHECK(e.tree().depth == 3);
      }
    }
  }

  TEST_CASE("covers are size-ascending partitions into indivisible pieces") {
    Graph g = clique_union(4, 27);
    auto m = oracle::matrix_of(g);
    auto ms = power_sequence(27, Ratio(1, 3), 2);
    auto cover = extract_indivisible_cover(g, VertexSet::all(g), ms);
    CHECK(cover.remainder.size() < 27);
    Partition p{cover.pieces, cover.remainder};
    CHECK_NOTHROW(p.validate(VertexSet::all(g)));
    for (std::size_t i = 0; i < cover.pieces.size(); ++i) {
      CHECK(oracle::indivisible_power(m, ids_of(cover.pieces[i]), 1, 3));
      if (i > 0) CHECK(cover.pieces[i - 1].size() <= cover.pieces[i].size());
    }
  }

  TEST_CASE("a set smaller than m0 gives no pieces") {
    Graph g = clique_union(2, 10);
    auto cover = extract_indivisible_cover(g, range_set(g, 0, 15), power_sequence(16, Ratio(1, 2), 2));
    CHECK(cover.pieces.empty());
    CHECK(cover.remainder == range_set(g, 0, 15));
  }

  TEST_CASE("half graph covers overflow or give small pieces") {
    Graph g = half_graph(40);
    try {
      auto cover = extract_indivisible_cover(g, VertexSet::all(g), power_sequence(16, Ratio(1, 2), 2));
      for (const auto& piece : cover.pieces)
        CHECK(check_indivisible(g, piece, Threshold::power(Ratio(1, 2))).indivisible);
    } catch (const DepthOverflow& e) {
      CHECK(e.tree().depth == 2);
    }
  }

  TEST_CASE("excellent extraction returns excellent input at the root") {
    Graph g = clique_union(3, 64);
    WitnessFamily family(g, true);
    VertexSet a = range_set(g, 64, 128);
    auto ext = extract_excellent(g, a, Ratio(1, 8), family, 2);
    CHECK(ext.level == 0);
    CHECK(ext.piece == a);
  }

  TEST_CASE("excellent extraction on a half graph side with the other side as witness") {
    Graph g = half_graph(64);
    WitnessFamily family(g, true);
    family.add(range_set(g, 64, 128), "right side");
    VertexSet left = range_set(g, 0, 64);
    Ratio eps(1, 8);
    try {
      auto ext = extract_excellent(g, left, eps, family, 2);
      CHECK(check_excellent(g, ext.piece, eps, eps, family).excellent);
      CHECK(ext.piece.size() * 8 >= left.size());
    } catch (const DepthOverflow& e) {
      CHECK(e.tree().depth == 2);
      if (e.witness_valid()) CHECK(is_tree_witness(g, e.witness()));
    }
  }

  TEST_CASE("case I size bound and excellence on random inputs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Graph g = blowup_graph(12, 10 + seed, seed);
      WitnessFamily family(g, true);
      family.add_neighbourhoods();
      VertexSet a(g);
      for (Vertex v : shuffled_vertices(g.size(), seed + 50)) {
        if (a.size() == 40) break;
        a.insert(v);
      }
      Ratio eps(1, 5);
      std::size_t k_starstar = 2;
      try {
        auto ext = extract_excellent(g, a, eps, family, k_starstar);
        CHECK(ext.piece.subset_of(a));
        CHECK(check_excellent(g, ext.piece, eps, eps, family).excellent);
        // |A'| >= eps^(k**-1) |A|
        CHECK(Ratio(static_cast<std::int64_t>(ext.piece.size())) >=
              eps.pow(static_cast<unsigned>(k_starstar - 1)) * Ratio(static_cast<std::int64_t>(a.size())));
      } catch (const DepthOverflow& e) {
        CHECK(e.tree().depth == k_starstar);
      }
    }
  }

  TEST_CASE("case II returns a set of an exact sequence size") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Graph g = blowup_graph(20, 5 * seed, seed);
      WitnessFamily family(g, true);
      MSequence ms{MSequence::Mode::ratio, Ratio(1, 8), {64, 8}};
      VertexSet a(g);
      for (Vertex v : shuffled_vertices(g.size(), seed)) {
        if (a.size() == 64) break;
        a.insert(v);
      }
      try {
        auto ext = extract_excellent(g, a, Ratio(1, 8), family, 2, &ms);
        CHECK(ext.piece.size() == ms.values[ext.level]);
        Ratio margin = ms.level_ratio(ext.level);
        CHECK(check_excellent(g, ext.piece, margin, margin, family).excellent);
      } catch (const DepthOverflow& e) {
        CHECK(e.tree().depth == 2);
      } catch (const VerificationFailure&) {
        // a witness did not leave two sides of the next size
      }
    }
  }

  TEST_CASE("excellent extraction refuses eps at or above 2^-k**") {
    Graph g = clique_union(2, 10);
    WitnessFamily family(g, true);
    CHECK_THROWS_AS(extract_excellent(g, VertexSet::all(g), Ratio(1, 4), family, 2), PreconditionError);
  }
}

TEST_SUITE("transversal") {
  TEST_CASE("an empty family only needs distinct draws") {
    std::vector<Vertex> ground(100);
    std::iota(ground.begin(), ground.end(), 0);
    auto t = sample_transversal(ground, {}, {Ratio(1, 4), Ratio(1, 2), Ratio(1, 4), 5}, 3);
    CHECK(t.elements.size() == floor_power(100, Ratio(1, 4)));
    CHECK(std::adjacent_find(t.elements.begin(), t.elements.end()) == t.elements.end());
  }

  TEST_CASE("singleton members with c = 1 reduce to distinctness") {
    std::vector<Vertex> ground(256);
    std::iota(ground.begin(), ground.end(), 0);
    std::vector<Bits> family;
    for (Vertex v = 0; v < 256; ++v) {
      Bits b(256);
      b.set(v);
      family.push_back(b);
    }
    auto t = draw_transversal(ground, family, 4, 1, 9, 1000);
    CHECK(t.elements.size() == 4);
    CHECK(t.max_intersection == 1);
  }

  TEST_CASE("lemma parameters at n = 4096") {
    TransversalParams p{Ratio(1, 4), Ratio(1, 2), Ratio(1, 4), 5};
    CHECK_NOTHROW(check_transversal_params(p));
    const std::uint64_t n = 4096;
    REQUIRE(transversal_inequality(n, p));
    std::vector<Vertex> ground(n);
    std::iota(ground.begin(), ground.end(), 0);
    Rng rng(21);
    std::vector<Bits> family;
    for (int i = 0; i < 3000; ++i) {
      Bits b(n);
      for (auto v : rng.sample_distinct(n, floor_power(n, p.eps))) b.set(v);
      family.push_back(b);
    }
    auto t = sample_transversal(ground, family, p, 5);
    CHECK(t.elements.size() == 8);
    for (const Bits& b : family) {
      std::size_t hits = 0;
      for (Vertex v : t.elements) hits += b.test(v);
      CHECK(hits <= 5);
    }
  }

  TEST_CASE("parameter checks name the violated constraint") {
    CHECK_THROWS_AS(check_transversal_params({Ratio(1, 4), Ratio(1, 2), Ratio(1, 4), 4}), PreconditionError);
    CHECK_THROWS_AS(check_transversal_params({Ratio(1, 4), Ratio(1, 2), Ratio(3, 4), 9}), PreconditionError);
    CHECK_THROWS_AS(check_transversal_params({Ratio(0), Ratio(1, 2), Ratio(1, 4), 9}), PreconditionError);
  }

  TEST_CASE("the threshold is the least n meeting the inequality") {
    for (std::size_t c = 5; c < 12; ++c) {
      TransversalParams p{Ratio(1, 4), Ratio(1, 2), Ratio(1, 4), c};
      auto t = transversal_threshold(p);
      CHECK(transversal_inequality(t, p));
      CHECK_FALSE(transversal_inequality(t - 1, p));
      std::vector<Vertex> ground(t);
      std::iota(ground.begin(), ground.end(), 0);
      CHECK_THROWS_AS(sample_transversal(ground, {}, p, 1), SizingError);
    }
  }

  TEST_CASE("c-indivisible extraction on complete and clique-union graphs") {
    struct Case {
      Graph g;
      CIndivisibleParams p;
    };
    std::vector<Case> cases{
        {complete_graph(1024), {Ratio(9, 20), Ratio(11, 50), Ratio(1, 2), 40, 2, 1}},
        {clique_union(4, 256), {Ratio(9, 20), Ratio(1, 10), Ratio(1, 4), 72, 4, 2}},
    };
    for (auto& c : cases) {
      auto m = oracle::matrix_of(c.g);
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto z = extract_c_indivisible(c.g, VertexSet::all(c.g), c.p, seed);
        CHECK(z.set.size() == floor_power(c.g.size(), c.p.xi));
        CHECK(oracle::indivisible_constant(m, ids_of(z.set), static_cast<std::int64_t>(c.p.c)));
      }
    }
  }

  TEST_CASE("c-indivisible parameter violations are refused") {
    Graph g = complete_graph(64);
    CIndivisibleParams low_c{Ratio(9, 20), Ratio(11, 50), Ratio(1, 2), 5, 2, 1};
    CHECK_THROWS_AS(extract_c_indivisible(g, VertexSet::all(g), low_c, 0), PreconditionError);
    CIndivisibleParams wide_zeta{Ratio(9, 20), Ratio(11, 50), Ratio(1, 1), 40, 2, 1};
    CHECK_THROWS_AS(extract_c_indivisible(g, VertexSet::all(g), wide_zeta, 0), PreconditionError);
    CIndivisibleParams big_threshold{Ratio(9, 20), Ratio(11, 50), Ratio(1, 2), 33, 2, 1};
    auto needed = transversal_threshold({big_threshold.eps, big_threshold.zeta, big_threshold.xi, big_threshold.c});
    Graph small = complete_graph(needed);
    CHECK_THROWS_AS(extract_c_indivisible(small, VertexSet::all(small), big_threshold, 0), SizingError);
  }

  TEST_CASE("minority traces are the smaller sides") {
    Graph g = blowup_graph(6, 4, 2);
    VertexSet a = range_set(g, 0, 12);
    auto traces = minority_traces(g, a);
    for (const Bits& t : traces) {
      std::size_t size = t.count();
      CHECK(size > 0);
      CHECK(2 * size <= a.size());
    }
  }
}

TEST_SUITE("indiscernible") {
  TEST_CASE("edge formula and vacuous phi") {
    Graph g = path_graph(4);
    DeltaFormula edge{DeltaFormula::Kind::edge, 1, 2, 0};
    std::vector<Vertex> pair{0, 1};
    CHECK(eval_delta_formula(g, edge, pair));
    // sigma = 1, m = 0: some y adjacent to none of the arguments
    DeltaFormula phi{DeltaFormula::Kind::phi, 1, 3, 0};
    std::vector<Vertex> triple{0, 1, 2};
    CHECK(eval_delta_formula(g, phi, triple) == oracle::delta_formula(oracle::matrix_of(g), 1, 3, 0, {0, 1, 2}));
    CHECK(eval_delta_formula(empty_graph(3), phi, triple));
    CHECK_FALSE(eval_delta_formula(complete_graph(3), phi, triple));
    CHECK_THROWS_AS(eval_delta_formula(g, phi, pair), ValidationError);
  }

  TEST_CASE("phi formulas on a path agree with a direct scan") {
    Graph g = path_graph(7);
    auto m = oracle::matrix_of(g);
    for (int sigma = 1; sigma <= 2; ++sigma)
      for (std::size_t split = 0; split <= 3; ++split)
        for (Vertex x = 0; x < 7; ++x)
          for (Vertex y = 0; y < 7; ++y)
            for (Vertex z = 0; z < 7; ++z) {
              std::vector<Vertex> args{x, y, z};
              DeltaFormula f{DeltaFormula::Kind::phi, sigma, 3, split};
              CHECK(eval_delta_formula(g, f, args) ==
                    oracle::delta_formula(m, sigma, 3, static_cast<int>(split), {int(x), int(y), int(z)}));
            }
  }

  TEST_CASE("clique sequences are indiscernible; short sequences vacuously") {
    Graph g = clique_union(2, 10);
    std::vector<Vertex> seq{0, 1, 2, 3, 4, 5};
    CHECK(check_indiscernible(g, seq, delta_set(2)).indiscernible);
    std::vector<Vertex> tiny{0};
    CHECK(check_indiscernible(g, tiny, delta_set(3)).indiscernible);
    std::vector<Vertex> mixed{0, 1, 10, 2};
    auto report = check_indiscernible(g, mixed, delta_set(2));
    CHECK_FALSE(report.indiscernible);
    CHECK_FALSE(report.first_tuple.empty());
  }

  TEST_CASE("indiscernibility agrees with the tuple oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Graph g = seed % 3 == 0 ? half_graph(8) : gnp(16, 0.3, seed);
      auto m = oracle::matrix_of(g);
      auto order = shuffled_vertices(g.size(), seed);
      std::vector<Vertex> seq(order.begin(), order.begin() + 4 + static_cast<long>(seed % 5));
      if (seed % 3 == 0) std::sort(seq.begin(), seq.end());
      for (std::size_t k = 1; k <= 3; ++k)
        CHECK(check_indiscernible(g, seq, delta_set(k)).indiscernible == oracle::indiscernible(m, ids_of(seq), int(k)));
    }
  }

  TEST_CASE("half graph left side in order") {
    Graph g = half_graph(8);
    std::vector<Vertex> left{0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(check_indiscernible(g, left, delta_set(2)).indiscernible ==
          oracle::indiscernible(oracle::matrix_of(g), ids_of(left), 2));
  }

  TEST_CASE("the length cap is enforced") {
    Graph g = empty_graph(50);
    std::vector<Vertex> seq(41);
    std::iota(seq.begin(), seq.end(), 0);
    CHECK_THROWS_AS(check_indiscernible(g, seq, delta_set(2)), PreconditionError);
  }

  TEST_CASE("isolated vertices form an initial segment") {
    Graph g = empty_graph(20);
    std::vector<Vertex> seq(20);
    std::iota(seq.begin(), seq.end(), 0);
    auto ext = extract_indiscernible(g, seq, delta_set(2));
    // all types agree, so only the stage parameters taken from the end are lost
    REQUIRE(ext.indices.size() + 1 == 20);
    for (std::size_t i = 0; i < ext.indices.size(); ++i) CHECK(ext.indices[i] == i);
  }

  TEST_CASE("extractions always pass the oracle") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      Graph g = seed % 2 ? clique_union(3, 10) : gnp(24, 0.25, seed);
      auto seq = seed % 2 ? interleaved(3, 10) : shuffled_vertices(g.size(), seed);
      for (std::size_t k = 1; k <= 3; ++k) {
        auto ext = extract_indiscernible(g, seq, delta_set(k));
        std::vector<Vertex> out;
        for (std::size_t i : ext.indices) out.push_back(seq[i]);
        CHECK(std::is_sorted(ext.indices.begin(), ext.indices.end()));
        CHECK(oracle::indiscernible(oracle::matrix_of(g), ids_of(out), int(k)));
      }
    }
  }

  TEST_CASE("short inputs give short outputs") {
    Graph g = path_graph(3);
    std::vector<Vertex> seq{0, 1};
    auto ext = extract_indiscernible(g, seq, delta_set(3));
    CHECK(ext.indices.size() <= 2);
  }

  TEST_CASE("elements split indiscernible sequences unevenly and heavy positions are few or most") {
    std::vector<Graph> graphs{
        clique_union(2, 40), clique_union(3, 24),
        generate(GenSpec::blowup({{0, 1}}, {30, 30}, {BlockKind::clique, BlockKind::independent})).graph};
    for (const Graph& g : graphs) {
      auto bound = minimal_order_bound(g, 5, {.compress_twins = true});
      REQUIRE(bound.certified);
      const std::size_t k_star = bound.value;
      auto m = oracle::matrix_of(g);
      auto delta = delta_set(k_star);
      std::vector<std::vector<Vertex>> found;
      for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto seq = seed == 0 ? interleaved(1, g.size()) : shuffled_vertices(g.size(), seed);
        auto ext = extract_indiscernible(g, seq, delta);
        std::vector<Vertex> out;
        for (std::size_t i : ext.indices) out.push_back(seq[i]);
        if (out.size() < 4 * k_star) continue;
        found.push_back(out);
        for (Vertex b = 0; b < g.size(); ++b) {
          std::size_t adjacent = 0;
          for (Vertex a : out) adjacent += m[a][b];
          std::size_t minority = std::min(adjacent, out.size() - adjacent);
          CHECK(minority_side(g, out, b) == minority);
          CHECK(minority < 2 * k_star);
        }
      }
      CHECK_FALSE(found.empty());
      for (const auto& rows : found)
        for (const auto& cols : found) {
          if (cols.size() <= 4 * k_star * k_star) continue;
          auto heavy = heavy_positions(g, rows, cols, 2 * k_star);
          std::size_t direct = 0;
          for (Vertex a : rows) {
            std::size_t adjacent = 0;
            for (Vertex b : cols) adjacent += m[a][b];
            direct += adjacent >= 2 * k_star;
          }
          CHECK(heavy.size() == direct);
          CHECK((heavy.size() <= 2 * k_star || heavy.size() + 2 * k_star >= rows.size()));
        }
    }
  }
}
