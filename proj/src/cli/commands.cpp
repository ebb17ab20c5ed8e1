#include <chrono>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "stablereg/cli.hpp"
#include "stablereg/detect.hpp"
#include "stablereg/errors.hpp"
#include "stablereg/indiscernible.hpp"
#include "stablereg/partition.hpp"
#include "stablereg/report.hpp"
#include "stablereg/transversal.hpp"

namespace stablereg {

std::string command_name(Command c) {
  switch (c) {
    case Command::detect: return "detect";
    case Command::partition: return "partition";
    case Command::verify: return "verify";
    case Command::generate: return "generate";
  }
  return "";
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::stable: return "stable";
    case Algorithm::prob: return "prob";
    case Algorithm::c_indivisible: return "c-indivisible";
    case Algorithm::indiscernible: return "indiscernible";
  }
  return "";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "stable") return Algorithm::stable;
  if (name == "prob") return Algorithm::prob;
  if (name == "c-indivisible") return Algorithm::c_indivisible;
  if (name == "indiscernible") return Algorithm::indiscernible;
  throw ValidationError("unknown algorithm '" + std::string(name) + "'");
}

namespace {

constexpr std::size_t no_parent = std::numeric_limits<std::size_t>::max();

struct Input {
  Graph graph;
  IdMap ids;
  Json source;
  std::optional<Generated> generated;
  std::optional<GenSpec> spec;
};

Input load_input(const RunConfig& cfg) {
  if (cfg.input.has_value() == cfg.gen.has_value())
    throw PreconditionError("input", "give exactly one of --input and --gen");
  Input in;
  if (cfg.input) {
    LoadedGraph loaded = load_edge_list(*cfg.input, cfg.compact_ids);
    in.graph = std::move(loaded.graph);
    if (!loaded.identity_ids) in.ids = IdMap(std::move(loaded.original_ids));
    in.source = Json{{"input", *cfg.input}};
  } else {
    in.spec = parse_gen_spec(*cfg.gen, cfg.seed);
    in.generated = generate(*in.spec);
    in.graph = in.generated->graph;
    in.source = Json{{"gen", gen_spec_to_json(*in.spec)}};
  }
  return in;
}

Json optional_json(const std::optional<Ratio>& r) { return r ? Json(r->str()) : Json(nullptr); }
Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

Json config_echo(const RunConfig& cfg, const Input* in) {
  Json j;
  j["command"] = command_name(cfg.command);
  if (cfg.command == Command::partition) j["algorithm"] = algorithm_name(cfg.algorithm);
  j["source"] = in ? in->source : Json(nullptr);
  j["compact_ids"] = cfg.compact_ids;
  j["eps"] = optional_json(cfg.eps);
  j["zeta"] = optional_json(cfg.zeta);
  j["theta"] = optional_json(cfg.theta);
  j["c"] = optional_json(cfg.c);
  j["n2"] = optional_json(cfg.n2);
  j["k_star"] = optional_json(cfg.k_star);
  j["k_starstar"] = optional_json(cfg.k_starstar);
  j["seed"] = cfg.seed;
  j["retry_limit"] = cfg.retry_limit;
  j["budget"] = cfg.budget;
  j["k_max"] = cfg.k_max;
  j["h_max"] = cfg.h_max;
  j["independence_max"] = cfg.independence_max;
  j["twin_compression"] = cfg.twin_compression;
  j["allow_boundary"] = cfg.allow_boundary;
  if (cfg.partition_file) j["partition_file"] = *cfg.partition_file;
  return j;
}

Json graph_summary(const Input& in) {
  Json j{{"vertices", in.graph.size()}, {"edges", in.graph.edge_count()}};
  if (in.generated && !in.generated->blocks.empty()) {
    Json sizes = Json::array();
    for (const auto& b : in.generated->blocks) sizes.push_back(b.size());
    j["intended_block_sizes"] = sizes;
  }
  return j;
}

Json empty_report(const RunConfig& cfg, const Input* in) {
  Json r;
  r["version"] = report_version;
  r["config_echo"] = config_echo(cfg, in);
  r["graph_summary"] = in ? graph_summary(*in) : Json(nullptr);
  r["detection"] = nullptr;
  r["partition"] = nullptr;
  r["pairwise_matrix"] = nullptr;
  r["bounds"] = nullptr;
  r["timings"] = nullptr;
  r["seed"] = cfg.seed;
  return r;
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) {}
  template <class Fn>
  auto time(const std::string& stage, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    struct Record {
      Stopwatch* self;
      std::string stage;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        if (self->enabled_)
          self->stages_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } record{this, stage, start};
    return fn();
  }
  Json json() const { return enabled_ ? stages_ : Json(nullptr); }

 private:
  bool enabled_;
  Json stages_ = Json::object();
};

SearchOptions search_options(const RunConfig& cfg) {
  SearchOptions o;
  o.budget = cfg.budget;
  o.compress_twins = cfg.twin_compression;
  return o;
}

// Failure carrying a partial report section and an exit code.
struct Outcome {
  int code = 0;
  std::string failure;
};

Outcome failed(int code, std::string what) { return {code, std::move(what)}; }

// ---------------------------------------------------------------------------------------------
// detect

Outcome run_detect(const RunConfig& cfg, const Input& in, Json& report, Stopwatch& watch) {
  const SearchOptions options = search_options(cfg);
  Json detection;
  OrderBound order = watch.time("order", [&] { return minimal_order_bound(in.graph, cfg.k_max, options); });
  detection["order"] = Json{{"k_star", order.value},
                            {"certified", order.certified},
                            {"nodes", order.nodes},
                            {"witness_below", order.witness_below ? order_witness_json(*order.witness_below, in.ids)
                                                                  : Json(nullptr)}};
  if (cfg.h_max > 0) {
    TreeBound tree = watch.time("tree", [&] { return tree_bound(in.graph, cfg.h_max, options); });
    detection["tree"] = Json{{"k_starstar", tree.value},
                             {"certified", tree.certified},
                             {"nodes", tree.nodes},
                             {"witness_below", tree.witness_below ? tree_witness_json(*tree.witness_below, in.ids)
                                                                  : Json(nullptr)}};
  }
  if (order.certified) detection["declared_tree_bound"] = declared_tree_bound(order.value);
  if (cfg.independence_max > 0) {
    Json ind;
    std::size_t value = cfg.independence_max + 1;
    bool certified = false;
    std::uint64_t nodes = 0;
    Json witness = nullptr;
    for (std::size_t k = 1; k <= cfg.independence_max; ++k) {
      auto result = watch.time("independence", [&] { return find_independence_witness(in.graph, k, options); });
      nodes += result.nodes;
      if (result.status == SearchStatus::budget_exhausted) throw BudgetExhausted("independence witness of size " + std::to_string(k));
      if (result.status == SearchStatus::none) {
        value = k;
        certified = true;
        break;
      }
      witness = independence_witness_json(*result.witness, in.ids);
    }
    detection["independence"] = Json{{"bound", value}, {"certified", certified}, {"nodes", nodes}, {"witness_below", witness}};
  }
  report["detection"] = detection;
  return {};
}

// ---------------------------------------------------------------------------------------------
// partition

struct DeclaredBounds {
  std::size_t k_star = 0;
  std::optional<std::size_t> k_starstar;
  Json json;
};

DeclaredBounds resolve_bounds(const RunConfig& cfg, const Input& in, Stopwatch& watch) {
  DeclaredBounds b;
  const SearchOptions options = search_options(cfg);
  if (cfg.k_star) {
    b.k_star = *cfg.k_star;
    b.json["k_star"] = Json{{"value", b.k_star}, {"source", "declared"}};
  } else {
    OrderBound order = watch.time("order", [&] { return minimal_order_bound(in.graph, cfg.k_max, options); });
    if (!order.certified)
      throw PreconditionError("k* declared or certified",
                              "order witnesses exist up to length " + std::to_string(cfg.k_max) + "; pass --k-star");
    b.k_star = order.value;
    b.json["k_star"] = Json{{"value", b.k_star}, {"source", "detected"}, {"nodes", order.nodes}};
  }
  if (cfg.k_starstar) {
    b.k_starstar = *cfg.k_starstar;
    b.json["k_starstar"] = Json{{"value", *b.k_starstar}, {"source", "declared"}};
  } else if (cfg.h_max > 0) {
    TreeBound tree = watch.time("tree", [&] { return tree_bound(in.graph, cfg.h_max, options); });
    if (tree.certified) {
      b.k_starstar = tree.value;
      b.json["k_starstar"] = Json{{"value", tree.value}, {"source", "detected"}, {"nodes", tree.nodes}};
    }
  }
  if (!b.k_starstar)
    b.json["k_starstar"] = Json{{"value", declared_tree_bound(b.k_star)}, {"source", "declared from k*"}};
  return b;
}

Ratio require(const std::optional<Ratio>& value, const char* flag) {
  if (!value) throw PreconditionError(flag, std::string("missing ") + flag);
  return *value;
}
std::size_t require(const std::optional<std::size_t>& value, const char* flag) {
  if (!value) throw PreconditionError(flag, std::string("missing ") + flag);
  return *value;
}

Json verification_json(const StableVerification& v, const std::optional<std::string>& recorded) {
  Json j;
  j["valid_partition"] = v.valid_partition;
  j["remainder_empty"] = v.remainder_empty;
  j["equitable"] = v.equitable;
  j["all_uniform"] = v.all_uniform;
  j["failing_pair"] = v.failing_pair ? Json{v.failing_pair->first, v.failing_pair->second} : Json(nullptr);
  j["all_excellent"] = v.all_excellent;
  j["failing_piece"] = v.failing_piece ? Json(*v.failing_piece) : Json(nullptr);
  j["bound_checked"] = v.bound_checked;
  j["within_bound"] = v.bound_checked ? Json(v.within_bound) : Json(nullptr);
  j["bound_value"] = v.bound_checked ? Json(v.bound_value.str()) : Json(nullptr);
  if (recorded) j["recorded_matrix_matches"] = recorded->empty();
  std::string first = v.first_failure;
  if (first.empty() && recorded && !recorded->empty()) first = *recorded;
  j["first_failure"] = first.empty() ? Json(nullptr) : Json(first);
  j["passed"] = first.empty();
  return j;
}

Json stable_bounds_json(const StableResult& r) {
  return Json{{"piece_count", r.piece_count},
              {"bound_value", r.bound_value.str()},
              {"bound_value_approx", r.bound_value.value()},
              {"bound_claimed", r.bound_claimed},
              {"bound_holds", r.bound_holds},
              {"k_starstar", r.k_starstar},
              {"eps2", r.build.eps2.str()},
              {"eps3", r.build.eps3.str()},
              {"q", r.build.q},
              {"m_starstar", r.build.m_starstar},
              {"m_sequence", m_sequence_json(r.build.ms)}};
}

Outcome run_stable(const RunConfig& cfg, const Input& in, const DeclaredBounds& b, Json& report, Stopwatch& watch) {
  const Ratio eps = require(cfg.eps, "--eps");
  StableOptions options;
  options.k_starstar = b.k_starstar;
  options.retry_limit = cfg.retry_limit;
  options.allow_boundary = cfg.allow_boundary;
  const VertexSet ground = VertexSet::all(in.graph);
  StableResult r = watch.time("partition", [&] { return partition_stable(in.graph, ground, eps, b.k_star, cfg.seed, options); });
  Json part = partition_json(r.partition, in.ids);
  part["algorithm"] = "stable";
  part["eps"] = eps.str();
  part["refinement_rounds"] = r.refinement_rounds;
  part["family_size"] = r.family_size;
  part["extraction_levels"] = r.extraction_levels;
  part["split_attempts"] = r.split_attempts;
  Json excellence = Json::array();
  for (const auto& e : r.excellence) excellence.push_back(Json{{"excellent", e.excellent}, {"applicable_members", e.applicable_members}});
  part["excellence"] = excellence;
  StableVerification v = watch.time("verify", [&] {
    return verify_stable(in.graph, ground, r.partition, eps, r.bound_claimed ? std::optional(r.k_starstar) : std::nullopt);
  });
  part["verification"] = verification_json(v, std::nullopt);
  report["partition"] = part;
  report["pairwise_matrix"] = pair_matrix_json(r.pairwise, eps, eps);
  report["bounds"] = stable_bounds_json(r);
  if (!v.passed()) return failed(3, v.first_failure);
  return {};
}

Json pieces_parent_json(const std::vector<std::size_t>& parent) {
  Json j = Json::array();
  for (std::size_t p : parent) j.push_back(p == no_parent ? Json(nullptr) : Json(p));
  return j;
}

Outcome run_prob(const RunConfig& cfg, const Input& in, const DeclaredBounds& b, Json& report, Stopwatch& watch) {
  const Ratio eps = require(cfg.eps, "--eps");
  ProbOptions options;
  options.k_starstar = b.k_starstar;
  options.retry_limit = cfg.retry_limit;
  const VertexSet ground = VertexSet::all(in.graph);
  ProbResult r = watch.time("partition", [&] { return partition_prob(in.graph, ground, eps, b.k_star, cfg.seed, options); });
  Json part = partition_json(r.partition, in.ids);
  part["algorithm"] = "prob";
  part["eps"] = eps.str();
  part["parent"] = pieces_parent_json(r.parent);
  Json cover = Json::array();
  for (const auto& c : r.cover) cover.push_back(set_json(c, in.ids));
  part["cover"] = cover;
  part["attempts"] = r.attempts;
  report["partition"] = part;
  report["bounds"] = Json{{"k_starstar", r.k_starstar},
                          {"m_starstar", r.m_starstar},
                          {"m_sequence", m_sequence_json(r.ms)},
                          {"zeta", r.zeta},
                          {"zeta_below_eps_power", r.zeta_below},
                          {"singleton_count", r.singleton_count},
                          {"irregular_pairs", r.irregular_pairs},
                          {"total_pairs", r.total_pairs},
                          {"irregular_fraction", r.irregular_fraction},
                          {"fraction_target", r.fraction_target},
                          {"exceptional_edges_on_regular_pairs", r.exceptional_edges},
                          {"exponent_c", r.exponent_c}};
  return {};
}

Outcome run_c_indivisible(const RunConfig& cfg, const Input& in, const DeclaredBounds& b, Json& report, Stopwatch& watch) {
  const Ratio eps = require(cfg.eps, "--eps");
  const Ratio zeta = require(cfg.zeta, "--zeta");
  const Ratio theta = require(cfg.theta, "--theta");
  const std::size_t c = require(cfg.c, "--c");
  CIndivisibleOptions options;
  options.k_starstar = b.k_starstar;
  const VertexSet ground = VertexSet::all(in.graph);
  CIndivisibleResult r = watch.time("partition", [&] {
    return partition_c_indivisible(in.graph, ground, eps, zeta, theta, c, b.k_star, cfg.seed, options);
  });
  Json part = partition_json(r.partition, in.ids);
  part["algorithm"] = "c-indivisible";
  part["eps"] = eps.str();
  part["zeta"] = zeta.str();
  part["theta"] = theta.str();
  part["c"] = c;
  part["levels"] = r.levels;
  part["attempts"] = r.attempts;
  report["partition"] = part;
  report["bounds"] = Json{{"piece_size", r.piece_size},
                          {"m_sequence", m_sequence_json(r.ms)},
                          {"remainder_bound", r.remainder_bound},
                          {"remainder_within_bound", r.remainder_within_bound}};
  if (!r.remainder_within_bound)
    return failed(3, "remainder: " + std::to_string(r.partition.remainder.size()) + " vertices exceed " +
                         std::to_string(r.remainder_bound));
  return {};
}

Json indiscernible_pairs_json(const std::vector<IndiscerniblePair>& pairs, const IdMap& ids) {
  Json list = Json::array();
  for (const auto& p : pairs)
    list.push_back(Json{{"i", p.i},
                        {"j", p.j},
                        {"trv", as_int(p.trv)},
                        {"omitted_i", p.omitted_i ? Json(ids(*p.omitted_i)) : Json(nullptr)},
                        {"omitted_j", p.omitted_j ? Json(ids(*p.omitted_j)) : Json(nullptr)},
                        {"bad_rows", p.bad_rows},
                        {"bad_columns", p.bad_columns},
                        {"exceptional_edges", p.exceptional_edges},
                        {"density", p.density},
                        {"density_bound", p.density_bound},
                        {"passes", p.passes}});
  return Json{{"bound", nullptr}, {"pairs", list}};
}

Outcome run_indiscernible(const RunConfig& cfg, const Input& in, const DeclaredBounds& b, Json& report, Stopwatch& watch) {
  const std::size_t n2 = require(cfg.n2, "--n2");
  const VertexSet ground = VertexSet::all(in.graph);
  IndiscernibleResult r =
      watch.time("partition", [&] { return partition_indiscernible(in.graph, ground, n2, b.k_star, cfg.seed); });
  Json part = partition_json(r.partition, in.ids);
  part["algorithm"] = "indiscernible";
  part["n2"] = n2;
  part["k_star"] = b.k_star;
  Json sequences = Json::array();
  for (const auto& s : r.sequences) sequences.push_back(ids_json(s, in.ids));
  part["sequences"] = sequences;
  Json appended = Json::array();
  for (const auto& a : r.appended) appended.push_back(a ? Json(in.ids(*a)) : Json(nullptr));
  part["appended"] = appended;
  part["indiscernible_verified"] = r.indiscernible_verified;
  part["homogeneous"] = r.homogeneous;
  part["target_pieces"] = r.target_pieces;
  part["partial"] = r.partial;
  part["all_verified"] = r.all_verified;
  report["partition"] = part;
  Json pairs = indiscernible_pairs_json(r.pairs, in.ids);
  pairs["bound"] = 2 * b.k_star;
  report["pairwise_matrix"] = pairs;
  if (!r.all_verified) {
    // A failing pair would contradict the declared k*: look for the order witness directly.
    SearchOptions options = search_options(cfg);
    auto search = find_order_witness(in.graph, b.k_star, options);
    report["detection"]["recheck"] =
        Json{{"k", b.k_star},
             {"status", search.status == SearchStatus::found ? "found" : search.status == SearchStatus::none ? "none" : "budget"},
             {"witness", search.witness ? order_witness_json(*search.witness, in.ids) : Json(nullptr)}};
    return failed(3, "indiscernible pieces: a homogeneity or pair clause fails");
  }
  return {};
}

Outcome run_partition(const RunConfig& cfg, const Input& in, Json& report, Stopwatch& watch) {
  DeclaredBounds b = resolve_bounds(cfg, in, watch);
  report["detection"] = b.json;
  switch (cfg.algorithm) {
    case Algorithm::stable: return run_stable(cfg, in, b, report, watch);
    case Algorithm::prob: return run_prob(cfg, in, b, report, watch);
    case Algorithm::c_indivisible: return run_c_indivisible(cfg, in, b, report, watch);
    case Algorithm::indiscernible: return run_indiscernible(cfg, in, b, report, watch);
  }
  return {};
}

// ---------------------------------------------------------------------------------------------
// verify

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(1, path + ": malformed JSON");
  return j;
}

std::string describe(const PairEntry& e) {
  std::string trv = e.trv ? std::to_string(as_int(*e.trv)) : "undefined";
  return "trv " + trv + ", " + std::to_string(e.exceptions) + " exceptions, " + std::to_string(e.edges) + " edges";
}

// Empty when the recorded matrix equals the recomputed one.
std::string compare_matrices(const PairMatrix& recorded, const PairMatrix& actual) {
  if (recorded.size() != actual.size())
    return "recorded matrix: " + std::to_string(recorded.size()) + " rows recorded for " + std::to_string(actual.size()) +
           " pieces";
  for (std::size_t i = 0; i < actual.size(); ++i)
    for (std::size_t j = 0; j < actual.size(); ++j) {
      if (i == j) continue;
      const auto& r = recorded[i][j];
      const auto& a = actual[i][j];
      if (r.trv != a.trv || r.exceptions != a.exceptions || r.edges != a.edges)
        return "recorded matrix: pair (" + std::to_string(i) + "," + std::to_string(j) + ") recorded " + describe(r) +
               ", recomputed " + describe(a);
    }
  return "";
}

std::optional<Ratio> file_ratio(const Json& part, const char* key) {
  if (!part.contains(key) || !part.at(key).is_string()) return std::nullopt;
  return Ratio::parse(part.at(key).get<std::string>());
}

Outcome verify_stable_file(const RunConfig& cfg, const Input& in, const Json& file, const Json& part, Json& report) {
  const Ratio eps = cfg.eps ? *cfg.eps : file_ratio(part, "eps").value_or(Ratio(0));
  if (eps <= Ratio(0)) throw PreconditionError("--eps", "missing --eps and no eps recorded in the partition file");
  std::optional<std::size_t> k_starstar = cfg.k_starstar;
  const Json bounds = file.value("bounds", Json());
  if (!k_starstar && bounds.is_object() && bounds.value("bound_claimed", false) && bounds.contains("k_starstar"))
    k_starstar = bounds.at("k_starstar").get<std::size_t>();
  const VertexSet ground = VertexSet::all(in.graph);
  Partition p = partition_from_json(part, in.graph, in.ids);
  StableVerification v = verify_stable(in.graph, ground, p, eps, k_starstar);
  std::optional<std::string> recorded;
  if (file.contains("pairwise_matrix") && file.at("pairwise_matrix").is_object() && v.valid_partition)
    recorded = compare_matrices(pair_matrix_from_json(file.at("pairwise_matrix")), v.pairwise);
  Json out = partition_json(p, in.ids);
  out["algorithm"] = "stable";
  out["eps"] = eps.str();
  Json verification = verification_json(v, recorded);
  out["verification"] = verification;
  report["partition"] = out;
  if (v.valid_partition) report["pairwise_matrix"] = pair_matrix_json(v.pairwise, eps, eps);
  report["bounds"] = Json{{"k_starstar", optional_json(k_starstar)},
                          {"bound_value", v.bound_checked ? Json(v.bound_value.str()) : Json(nullptr)},
                          {"piece_count", p.pieces.size()}};
  if (!verification.at("passed").get<bool>()) return failed(3, verification.at("first_failure").get<std::string>());
  return {};
}

Outcome verify_prob_file(const RunConfig& cfg, const Input& in, const Json& file, const Json& part, Json& report) {
  const Ratio eps = cfg.eps ? *cfg.eps : file_ratio(part, "eps").value_or(Ratio(0));
  if (eps <= Ratio(0)) throw PreconditionError("--eps", "missing --eps and no eps recorded in the partition file");
  const Json bounds = file.value("bounds", Json());
  std::optional<std::size_t> k_starstar = cfg.k_starstar;
  if (!k_starstar && bounds.is_object() && bounds.contains("k_starstar")) k_starstar = bounds.at("k_starstar").get<std::size_t>();
  if (!k_starstar) throw PreconditionError("--k-starstar", "missing k** for the irregular-fraction target");
  const VertexSet ground = VertexSet::all(in.graph);
  Partition p = partition_from_json(part, in.graph, in.ids);
  std::string failure;
  auto fail = [&](const std::string& what) {
    if (failure.empty()) failure = what;
  };
  try {
    p.validate(ground);
  } catch (const ValidationError& e) {
    fail(std::string("partition: ") + e.what());
  }
  const std::uint64_t n = in.graph.size();
  std::size_t block = 0;
  std::size_t singles = 0;
  for (const auto& piece : p.pieces) block = std::max(block, piece.size());
  for (const auto& piece : p.pieces) {
    if (piece.size() == 1) ++singles;
    else if (piece.size() != block) fail("sizes: piece of size " + std::to_string(piece.size()) + " besides " + std::to_string(block));
  }
  if (!at_most_power(singles, n, eps)) fail("singletons: " + std::to_string(singles) + " exceed n^eps");

  // Blocks are matched to their parents through the recorded cover.
  std::vector<VertexSet> cover;
  if (part.contains("cover")) cover = partition_from_json(Json{{"pieces", part.at("cover")}}, in.graph, in.ids).pieces;
  std::vector<VertexSet> blocks;
  std::vector<std::size_t> parent;
  for (const auto& piece : p.pieces) {
    if (piece.size() < 2) continue;
    std::size_t owner = no_parent;
    for (std::size_t c = 0; c < cover.size(); ++c)
      if (piece.subset_of(cover[c])) owner = c;
    if (owner == no_parent) {
      fail("cover: a block of size " + std::to_string(piece.size()) + " lies in no recorded cover piece");
      continue;
    }
    blocks.push_back(piece);
    parent.push_back(owner);
  }
  Json out = partition_json(p, in.ids);
  out["algorithm"] = "prob";
  if (failure.empty()) {
    BlockScan scan = scan_blocks(in.graph, blocks, parent, cover, eps);
    const std::size_t total = p.pieces.size();
    const std::size_t pairs = total * (total - (total ? 1 : 0)) / 2;
    const std::size_t irregular = scan.irregular + singles * blocks.size() + singles * (singles - (singles ? 1 : 0)) / 2;
    const double fraction = pairs ? static_cast<double>(irregular) / static_cast<double>(pairs) : 0.0;
    const std::uint64_t r = static_cast<std::uint64_t>(eps.den());
    long double exponent = 1.0L;
    for (std::size_t l = 0; l < *k_starstar; ++l) exponent /= static_cast<long double>(r);
    const double target = static_cast<double>(2.0L * std::pow(static_cast<long double>(n), -exponent));
    if (scan.exceptional != 0) fail("exceptional edges: " + std::to_string(scan.exceptional) + " on regular pairs");
    if (fraction > target) fail("irregular fraction " + std::to_string(fraction) + " above " + std::to_string(target));
    report["bounds"] = Json{{"irregular_pairs", irregular},
                            {"total_pairs", pairs},
                            {"irregular_fraction", fraction},
                            {"fraction_target", target},
                            {"exceptional_edges_on_regular_pairs", scan.exceptional},
                            {"singleton_count", singles}};
  }
  out["verification"] = Json{{"first_failure", failure.empty() ? Json(nullptr) : Json(failure)}, {"passed", failure.empty()}};
  report["partition"] = out;
  if (!failure.empty()) return failed(3, failure);
  return {};
}

Outcome verify_c_indivisible_file(const RunConfig& cfg, const Input& in, const Json& part, Json& report) {
  std::optional<std::size_t> c = cfg.c;
  if (!c && part.contains("c")) c = part.at("c").get<std::size_t>();
  if (!c) throw PreconditionError("--c", "missing c");
  const VertexSet ground = VertexSet::all(in.graph);
  Partition p = partition_from_json(part, in.graph, in.ids);
  std::string failure;
  auto fail = [&](const std::string& what) {
    if (failure.empty()) failure = what;
  };
  try {
    p.validate(ground);
  } catch (const ValidationError& e) {
    fail(std::string("partition: ") + e.what());
  }
  for (std::size_t i = 0; i < p.pieces.size(); ++i) {
    if (p.pieces[i].size() != p.pieces.front().size()) fail("sizes: piece " + std::to_string(i) + " differs in size");
    auto rep = check_indivisible(in.graph, p.pieces[i], Threshold::constant(Ratio(static_cast<std::int64_t>(*c))));
    if (!rep.indivisible) fail("indivisibility: piece " + std::to_string(i) + " is split by vertex " + std::to_string(in.ids(rep.worst_b)));
  }
  Json out = partition_json(p, in.ids);
  out["algorithm"] = "c-indivisible";
  out["c"] = *c;
  out["verification"] = Json{{"first_failure", failure.empty() ? Json(nullptr) : Json(failure)}, {"passed", failure.empty()}};
  report["partition"] = out;
  if (!failure.empty()) return failed(3, failure);
  return {};
}

Outcome verify_indiscernible_file(const RunConfig& cfg, const Input& in, const Json& part, Json& report) {
  std::optional<std::size_t> k_star = cfg.k_star;
  if (!k_star && part.contains("k_star")) k_star = part.at("k_star").get<std::size_t>();
  if (!k_star) throw PreconditionError("--k-star", "missing k*");
  const VertexSet ground = VertexSet::all(in.graph);
  Partition p = partition_from_json(part, in.graph, in.ids);
  std::string failure;
  auto fail = [&](const std::string& what) {
    if (failure.empty()) failure = what;
  };
  try {
    p.validate(ground);
  } catch (const ValidationError& e) {
    fail(std::string("partition: ") + e.what());
  }
  std::vector<std::vector<Vertex>> pieces;
  for (const auto& piece : p.pieces) pieces.push_back(piece.members());
  if (part.contains("sequences")) {
    const DeltaSet delta = delta_set(*k_star);
    const Json& seqs = part.at("sequences");
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      std::vector<Vertex> seq;
      for (const auto& id : seqs[i]) seq.push_back(in.ids.internal(id.get<std::int64_t>(), in.graph.size()));
      if (i < p.pieces.size())
        for (Vertex v : seq)
          if (!p.pieces[i].contains(v)) fail("sequence " + std::to_string(i) + " leaves its piece");
      if (seq.size() <= indiscernible_length_cap && *k_star <= indiscernible_arity_cap &&
          !check_indiscernible(in.graph, seq, delta).indiscernible)
        fail("indiscernibility: sequence " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (!homogeneous_after_omission(in.graph, pieces[i])) fail("homogeneity: piece " + std::to_string(i));
  std::vector<IndiscerniblePair> pairs;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      IndiscerniblePair pair = check_indiscernible_pair(in.graph, pieces[i], pieces[j], 2 * *k_star);
      pair.i = i;
      pair.j = j;
      if (!pair.passes) fail("pair (" + std::to_string(i) + "," + std::to_string(j) + ") exceeds 2k* exceptions");
      pairs.push_back(pair);
    }
  Json out = partition_json(p, in.ids);
  out["algorithm"] = "indiscernible";
  out["k_star"] = *k_star;
  out["verification"] = Json{{"first_failure", failure.empty() ? Json(nullptr) : Json(failure)}, {"passed", failure.empty()}};
  report["partition"] = out;
  Json matrix = indiscernible_pairs_json(pairs, in.ids);
  matrix["bound"] = 2 * *k_star;
  report["pairwise_matrix"] = matrix;
  if (!failure.empty()) return failed(3, failure);
  return {};
}

Outcome run_verify(const RunConfig& cfg, const Input& in, Json& report) {
  if (!cfg.partition_file) throw PreconditionError("--partition", "verify needs a partition file");
  Json file = read_json_file(*cfg.partition_file);
  const Json part = file.contains("partition") ? file.at("partition") : file;
  if (!part.is_object()) throw ValidationError("partition file: no partition object");
  const std::string algorithm = part.value("algorithm", std::string("stable"));
  try {
    switch (parse_algorithm(algorithm)) {
      case Algorithm::stable: return verify_stable_file(cfg, in, file, part, report);
      case Algorithm::prob: return verify_prob_file(cfg, in, file, part, report);
      case Algorithm::c_indivisible: return verify_c_indivisible_file(cfg, in, part, report);
      case Algorithm::indiscernible: return verify_indiscernible_file(cfg, in, part, report);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("partition file: ") + e.what());
  }
  return {};
}

// ---------------------------------------------------------------------------------------------
// generate

Json annotations_json(const Input& in) {
  Json blocks = Json::array();
  Json intended = Json::array();
  if (in.generated) {
    for (const auto& b : in.generated->blocks) blocks.push_back(ids_json(b, in.ids));
    for (const auto& row : in.generated->intended) {
      Json r = Json::array();
      for (Truth t : row) r.push_back(as_int(t));
      intended.push_back(r);
    }
  }
  Json j{{"spec", in.spec ? gen_spec_to_json(*in.spec) : Json(nullptr)}, {"blocks", blocks}, {"intended", intended}};
  if (in.generated && in.generated->half_size) j["half_size"] = in.generated->half_size;
  return j;
}

void write_text(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream file(*path);
  if (!file) throw IoError("cannot write " + *path);
  file << text;
  if (!file) throw IoError("write failed for " + *path);
}

std::string render(const Json& report, OutputFormat format) {
  return format == OutputFormat::json ? report.dump(2) + "\n" : tsv_summary(report);
}

Json error_json(const std::exception& e, const char* kind) {
  Json j{{"kind", kind}, {"message", e.what()}};
  if (auto* p = dynamic_cast<const PreconditionError*>(&e)) j["condition"] = p->condition();
  if (auto* s = dynamic_cast<const SizingError*>(&e)) j["threshold"] = s->threshold();
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) j["line"] = pe->line();
  return j;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::optional<Input> input;
  Json report = empty_report(cfg, nullptr);
  Stopwatch watch(cfg.timings);
  int code = 0;
  auto finish = [&](const Json& error) {
    if (!error.is_null()) report["error"] = error;
    report["timings"] = watch.json();
    write_text(cfg.out, render(report, cfg.format), out);
  };
  try {
    input = load_input(cfg);
    report = empty_report(cfg, &*input);
    if (cfg.command == Command::generate) {
      std::ostringstream text;
      write_edge_list(input->graph, text);
      write_text(cfg.out, text.str(), out);
      if (cfg.annotations) write_text(cfg.annotations, annotations_json(*input).dump(2) + "\n", out);
      return 0;
    }
    Outcome outcome;
    switch (cfg.command) {
      case Command::detect: outcome = run_detect(cfg, *input, report, watch); break;
      case Command::partition: outcome = run_partition(cfg, *input, report, watch); break;
      case Command::verify: outcome = run_verify(cfg, *input, report); break;
      case Command::generate: break;
    }
    Json error = nullptr;
    if (outcome.code != 0) {
      error = Json{{"kind", "verification"}, {"message", outcome.failure}};
      err << "verification failed: " << outcome.failure << "\n";
    }
    finish(error);
    return outcome.code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const DepthOverflow& e) {
    const IdMap ids = input ? input->ids : IdMap();
    Json error = error_json(e, "depth_overflow");
    error["witness"] = tree_witness_json(e.witness(), ids);
    error["witness_valid"] = e.witness_valid();
    error["tree"] = split_tree_json(e.tree(), ids);
    err << "error: " << e.what() << "\n";
    code = 3;
    try {
      finish(error);
    } catch (const IoError& io) {
      err << "error: " << io.what() << "\n";
      return 4;
    }
    return code;
  } catch (const Error& e) {
    const char* kind = "error";
    code = 2;
    if (dynamic_cast<const VerificationFailure*>(&e)) kind = "verification", code = 3;
    else if (dynamic_cast<const RetryExhausted*>(&e)) kind = "retry_exhausted", code = 3;
    else if (dynamic_cast<const BudgetExhausted*>(&e)) kind = "budget_exhausted", code = 3;
    else if (dynamic_cast<const SizingError*>(&e)) kind = "sizing";
    else if (dynamic_cast<const PreconditionError*>(&e)) kind = "precondition";
    else if (dynamic_cast<const ParseError*>(&e)) kind = "parse";
    else if (dynamic_cast<const ValidationError*>(&e)) kind = "validation";
    err << "error: " << e.what() << "\n";
    try {
      finish(error_json(e, kind));
    } catch (const IoError& io) {
      err << "error: " << io.what() << "\n";
      return 4;
    }
    return code;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace stablereg
