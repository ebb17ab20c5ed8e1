#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stablereg/gen.hpp"
#include "stablereg/ratio.hpp"

namespace stablereg {

using Json = nlohmann::ordered_json;

inline constexpr const char* report_version = "1.0";

enum class Command { detect, partition, verify, generate };
enum class Algorithm { stable, prob, c_indivisible, indiscernible };
enum class OutputFormat { json, tsv_summary };

struct RunConfig {
  Command command = Command::detect;
  Algorithm algorithm = Algorithm::stable;
  std::optional<std::string> input;
  std::optional<std::string> gen;  // compact form, inline JSON or @file
  bool compact_ids = false;
  std::optional<Ratio> eps;
  std::optional<Ratio> zeta;
  std::optional<Ratio> theta;
  std::optional<std::size_t> c;
  std::optional<std::size_t> n2;
  std::optional<std::size_t> k_star;
  std::optional<std::size_t> k_starstar;
  std::uint64_t seed = 0;
  std::size_t retry_limit = 64;
  std::uint64_t budget = 100'000'000;
  std::size_t k_max = 8;
  std::size_t h_max = 3;
  std::size_t independence_max = 3;
  bool twin_compression = true;
  bool allow_boundary = false;
  bool timings = false;
  std::optional<std::string> partition_file;  // verify
  std::optional<std::string> annotations;     // generate: ground-truth JSON path
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::json;
};

// Runs one command, writes the report (or the edge list for generate) to config.out or
// `out`, diagnostics to `err`. Returns 0 on verified success, 2 on input, precondition or
// sizing errors, 3 when a result fails verification or a search runs out of retries or
// budget, 4 on I/O errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// "half_graph:N", "clique_union:COUNT,SIZE", "gnp:N,P", "blowup:EDGES:SIZES:KINDS" (edges
// "0-1/1-2", sizes "8/8/8", kinds "c/i/c"), "noisy:FLIPS:BASE", a JSON object, or "@path"
// to a JSON file. Randomized kinds take `seed` unless the JSON form names one.
GenSpec parse_gen_spec(std::string_view text, std::uint64_t seed);
GenSpec gen_spec_from_json(const Json& j, std::uint64_t seed);
Json gen_spec_to_json(const GenSpec& spec);

// Scalar leaves as "path<TAB>value" lines; arrays appear as their length.
std::string tsv_summary(const Json& report);

std::string command_name(Command c);
std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

}  // namespace stablereg
