#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stablereg/cli.hpp"
#include "stablereg/errors.hpp"

using namespace stablereg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_config(const RunConfig& cfg) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run(cfg, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "stablereg-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

RunConfig stable_on_complete() {
  RunConfig cfg;
  cfg.command = Command::partition;
  cfg.algorithm = Algorithm::stable;
  cfg.gen = "clique_union:1,300";
  cfg.eps = Ratio(1, 4);
  cfg.k_star = 2;
  cfg.k_starstar = 1;
  cfg.seed = 9;
  return cfg;
}

Json pieces_json(std::initializer_list<std::pair<int, int>> ranges) {
  Json pieces = Json::array();
  for (auto [first, last] : ranges) {
    Json p = Json::array();
    for (int v = first; v < last; ++v) p.push_back(v);
    pieces.push_back(p);
  }
  return pieces;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("detect on H5 reports k* = 6 with a length-5 witness") {
    RunConfig cfg;
    cfg.command = Command::detect;
    cfg.gen = "half_graph:5";
    cfg.k_max = 6;
    auto o = run_config(cfg);
    REQUIRE(o.code == 0);
    Json j = Json::parse(o.out);
    CHECK(j["version"] == report_version);
    CHECK(j["detection"]["order"]["k_star"] == 6);
    CHECK(j["detection"]["order"]["certified"] == true);
    CHECK(j["detection"]["order"]["witness_below"]["length"] == 5);
  }

  TEST_CASE("reports carry the fixed top-level keys") {
    RunConfig cfg;
    cfg.command = Command::detect;
    cfg.gen = "clique_union:2,4";
    auto o = run_config(cfg);
    REQUIRE(o.code == 0);
    Json j = Json::parse(o.out);
    for (const char* key : {"version", "config_echo", "graph_summary", "detection", "partition", "pairwise_matrix",
                            "bounds", "timings", "seed"})
      CHECK(j.contains(key));
  }

  TEST_CASE("stable partition exits 0, verifies and is byte-for-byte reproducible") {
    auto first = run_config(stable_on_complete());
    auto second = run_config(stable_on_complete());
    REQUIRE(first.code == 0);
    CHECK(first.out == second.out);
    Json j = Json::parse(first.out);
    CHECK(j["partition"]["verification"]["passed"] == true);

    auto path = scratch("stable.json");
    write_file(path, first.out);
    RunConfig verify;
    verify.command = Command::verify;
    verify.gen = "clique_union:1,300";
    verify.partition_file = path.string();
    auto v = run_config(verify);
    CHECK(v.code == 0);
    CHECK(Json::parse(v.out)["partition"]["verification"]["passed"] == true);
  }

  TEST_CASE("a corrupted recorded matrix is caught by verify") {
    auto run = run_config(stable_on_complete());
    REQUIRE(run.code == 0);
    Json j = Json::parse(run.out);
    j["pairwise_matrix"]["entries"][0][1]["exceptions"] = 7;
    auto path = scratch("corrupt.json");
    write_file(path, j.dump());
    RunConfig verify;
    verify.command = Command::verify;
    verify.gen = "clique_union:1,300";
    verify.partition_file = path.string();
    auto v = run_config(verify);
    CHECK(v.code == 3);
    Json report = Json::parse(v.out);
    CHECK(report["error"]["kind"] == "verification");
    CHECK(report["partition"]["verification"]["recorded_matrix_matches"] == false);
  }

  TEST_CASE("pieces crossing two cliques fail the uniformity clause") {
    Json file{{"partition", {{"algorithm", "stable"}, {"eps", "1/4"},
                             {"pieces", pieces_json({{0, 10}, {10, 30}, {30, 40}})}}}};
    // second piece holds 10 vertices of each clique
    auto path = scratch("crossing.json");
    write_file(path, file.dump());
    RunConfig verify;
    verify.command = Command::verify;
    verify.gen = "clique_union:2,20";
    verify.partition_file = path.string();
    auto v = run_config(verify);
    CHECK(v.code == 3);
    Json report = Json::parse(v.out);
    CHECK(report["partition"]["verification"]["all_uniform"] == false);
    CHECK(report["partition"]["verification"]["failing_pair"].is_array());
  }

  TEST_CASE("empty partition of an empty graph passes vacuously") {
    auto graph = scratch("empty.txt");
    write_file(graph, "n 0\n");
    auto path = scratch("empty.json");
    write_file(path, Json{{"partition", {{"algorithm", "stable"}, {"eps", "1/4"}, {"pieces", Json::array()}}}}.dump());
    RunConfig verify;
    verify.command = Command::verify;
    verify.input = graph.string();
    verify.partition_file = path.string();
    auto v = run_config(verify);
    CHECK(v.code == 0);
  }

  TEST_CASE("exit codes for bad input") {
    RunConfig missing;
    missing.command = Command::detect;
    missing.input = scratch("does-not-exist.txt").string();
    CHECK(run_config(missing).code == 4);

    auto bad = scratch("bad.txt");
    write_file(bad, "0 1\n2 2\n");
    RunConfig parse;
    parse.command = Command::detect;
    parse.input = bad.string();
    auto o = run_config(parse);
    CHECK(o.code == 2);
    CHECK(Json::parse(o.out)["error"]["line"] == 2);

    RunConfig eps = stable_on_complete();
    eps.eps = Ratio(1, 2);
    auto e = run_config(eps);
    CHECK(e.code == 2);
    CHECK(Json::parse(e.out)["error"]["kind"] == "precondition");

    RunConfig small = stable_on_complete();
    small.gen = "clique_union:1,100";
    auto s = run_config(small);
    CHECK(s.code == 2);
    Json err = Json::parse(s.out)["error"];
    CHECK(err["kind"] == "sizing");
    CHECK(err["threshold"] == 169);
  }

  TEST_CASE("generate writes an edge list that reads back") {
    RunConfig cfg;
    cfg.command = Command::generate;
    cfg.gen = "clique_union:2,3";
    auto o = run_config(cfg);
    REQUIRE(o.code == 0);
    std::istringstream in(o.out);
    Graph g = read_edge_list(in).graph;
    CHECK(g.size() == 6);
    CHECK(g.edge_count() == 6);
  }

  TEST_CASE("generator spec forms") {
    CHECK(parse_gen_spec("half_graph:4", 0).kind == GenSpec::Kind::half_graph);
    auto b = parse_gen_spec("blowup:0-1/1-2:8/8/8:c/i/c", 0);
    CHECK(b.kind == GenSpec::Kind::blowup);
    CHECK(b.block_sizes == std::vector<std::size_t>{8, 8, 8});
    CHECK(b.block_kinds[1] == BlockKind::independent);
    auto n = parse_gen_spec("noisy:10:clique_union:2,64", 3);
    CHECK(n.kind == GenSpec::Kind::noisy);
    CHECK(n.flip_count == 10);
    REQUIRE(n.base);
    CHECK(n.base->kind == GenSpec::Kind::clique_union);
    auto j = parse_gen_spec(R"({"kind": "gnp", "n": 30, "p": 0.5, "seed": 4})", 0);
    CHECK(j.kind == GenSpec::Kind::random_gnp);
    CHECK(j.seed == 4);
    CHECK(parse_gen_spec(b.str(), 0).str() == b.str());
    CHECK_THROWS_AS(parse_gen_spec("triangle:3", 0), Error);
    CHECK_THROWS_AS(parse_gen_spec("clique_union:2", 0), Error);
  }

  TEST_CASE("tsv summary lists scalar leaves and array lengths") {
    Json j{{"a", 1}, {"b", {{"c", "x"}, {"d", Json::array({1, 2, 3})}}}, {"e", nullptr}};
    CHECK(tsv_summary(j) == "a\t1\nb.c\tx\nb.d.length\t3\ne\tnull\n");
  }
}
