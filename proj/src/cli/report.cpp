#include "stablereg/report.hpp"

#include <algorithm>
#include <sstream>

#include "stablereg/errors.hpp"

namespace stablereg {

Vertex IdMap::internal(std::int64_t id, std::size_t vertex_count) const {
  if (original_.empty()) {
    if (id < 0 || static_cast<std::uint64_t>(id) >= vertex_count)
      throw ValidationError("vertex id " + std::to_string(id) + " is not in the graph");
    return static_cast<Vertex>(id);
  }
  auto it = std::lower_bound(original_.begin(), original_.end(), id);
  if (it == original_.end() || *it != id) throw ValidationError("vertex id " + std::to_string(id) + " is not in the graph");
  return static_cast<Vertex>(it - original_.begin());
}

Json truth_json(MaybeTruth t) { return t ? Json(as_int(*t)) : Json(nullptr); }

Json ids_json(std::span<const Vertex> vertices, const IdMap& ids) {
  Json out = Json::array();
  for (Vertex v : vertices) out.push_back(ids(v));
  return out;
}

Json set_json(const VertexSet& set, const IdMap& ids) {
  auto members = set.members();
  return ids_json(members, ids);
}

Json order_witness_json(const OrderWitness& w, const IdMap& ids) {
  return Json{{"length", w.length()}, {"a", ids_json(w.a, ids)}, {"b", ids_json(w.b, ids)}};
}

Json tree_witness_json(const TreeWitness& w, const IdMap& ids) {
  Json internal = Json::object();
  for (std::size_t i = 1; i < w.internal.size(); ++i) internal[node_label(i).empty() ? "root" : node_label(i)] = ids(w.internal[i]);
  Json leaves = Json::object();
  for (std::size_t i = 0; i < w.leaves.size(); ++i) leaves[leaf_label(i, w.height)] = ids(w.leaves[i]);
  return Json{{"height", w.height}, {"internal", internal}, {"leaves", leaves}};
}

Json independence_witness_json(const IndependenceWitness& w, const IdMap& ids) {
  return Json{{"k", w.a.size()}, {"a", ids_json(w.a, ids)}, {"b", ids_json(w.b, ids)}};
}

Json split_tree_json(const SplitTree& tree, const IdMap& ids) {
  Json nodes = Json::array();
  for (const auto& node : tree.nodes) {
    Json j{{"label", node.label}, {"size", node.members.size()}};
    if (node.splitter_vertex) j["splitter_vertex"] = ids(*node.splitter_vertex);
    if (!node.splitter_name.empty()) j["splitter"] = node.splitter_name;
    nodes.push_back(std::move(j));
  }
  return Json{{"depth", tree.depth}, {"result", tree.result_label}, {"nodes", nodes}};
}

Json m_sequence_json(const MSequence& ms) {
  return Json{{"mode", ms.mode == MSequence::Mode::power ? "power" : "ratio"}, {"step", ms.step.str()}, {"values", ms.values}};
}

Json partition_json(const Partition& p, const IdMap& ids) {
  Json pieces = Json::array();
  for (const auto& piece : p.pieces) pieces.push_back(set_json(piece, ids));
  return Json{{"piece_count", p.pieces.size()},
              {"piece_sizes", p.piece_sizes()},
              {"pieces", pieces},
              {"remainder", p.remainder.universe() ? set_json(p.remainder, ids) : Json::array()}};
}

Json pair_matrix_json(const PairMatrix& m, Ratio eps, Ratio zeta) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (i == j) {
        row.push_back(nullptr);
        continue;
      }
      const auto& e = m[i][j];
      row.push_back(Json{{"trv", truth_json(e.trv)}, {"exceptions", e.exceptions}, {"edges", e.edges}, {"uniform", e.uniform}});
    }
    rows.push_back(std::move(row));
  }
  return Json{{"eps", eps.str()}, {"zeta", zeta.str()}, {"entries", rows}};
}

Partition partition_from_json(const Json& j, const Graph& g, const IdMap& ids) {
  if (!j.is_object() || !j.contains("pieces") || !j.at("pieces").is_array())
    throw ValidationError("partition file: \"pieces\" array expected");
  Partition p;
  auto read_set = [&](const Json& list, const std::string& what) {
    if (!list.is_array()) throw ValidationError("partition file: " + what + " must be an array of vertex ids");
    VertexSet set(g);
    for (const auto& id : list) {
      if (!id.is_number_integer()) throw ValidationError("partition file: non-integer id in " + what);
      Vertex v = ids.internal(id.get<std::int64_t>(), g.size());
      if (set.contains(v)) throw ValidationError("partition file: vertex " + id.dump() + " repeated in " + what);
      set.insert(v);
    }
    return set;
  };
  const Json& pieces = j.at("pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) p.pieces.push_back(read_set(pieces[i], "piece " + std::to_string(i)));
  p.remainder = j.contains("remainder") ? read_set(j.at("remainder"), "remainder") : VertexSet(g);
  return p;
}

PairMatrix pair_matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("entries")) throw ValidationError("pairwise matrix: \"entries\" expected");
  const Json& rows = j.at("entries");
  PairMatrix m(rows.size(), std::vector<PairEntry>(rows.size()));
  try {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw ValidationError("pairwise matrix: row " + std::to_string(i) + " has wrong length");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const Json& e = rows[i][k];
        if (i == k || e.is_null()) continue;
        PairEntry& out = m[i][k];
        if (!e.at("trv").is_null()) out.trv = truth_of(e.at("trv").get<int>() == 1);
        out.exceptions = e.at("exceptions").get<std::size_t>();
        out.edges = e.value("edges", std::size_t{0});
        out.uniform = e.value("uniform", false);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pairwise matrix: ") + e.what());
  }
  return m;
}

namespace {

void flatten(const Json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (j.is_array()) {
    out << path << ".length\t" << j.size() << "\n";
  } else if (j.is_string()) {
    out << path << "\t" << j.get<std::string>() << "\n";
  } else {
    out << path << "\t" << j.dump() << "\n";
  }
}

}  // namespace

std::string tsv_summary(const Json& report) {
  std::ostringstream out;
  flatten(report, "", out);
  return out.str();
}

}  // namespace stablereg
