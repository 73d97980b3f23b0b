#pragma once

// Disjoint relational-unit sampling over a latent graph.
//
// Each round picks the lowest-scoring unit of the requested kind in the working
// graph, records it, and deletes its closed neighborhood from the working graph.
// When no unit remains, the surviving nodes become distractors. Because every
// neighbor of a chosen unit is deleted with it, later units and the surviving
// distractors are never adjacent to an earlier unit in the source graph.
//
// Scores always use degrees in the working graph. Ties break on canonical ids:
//   Edge   : deg(u) + deg(v), then (u, v)
//   Star   : sum of deg over N[v] for nodes with deg(v) == d, then center id
//   Clique : sum of deg over members, then the sorted member list

#include "memdrift/error.hpp"
#include "memdrift/graph.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

enum class ConnectionKind { Edge, Star, Clique };

inline std::string to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::Edge: return "edge";
    case ConnectionKind::Star: return "star";
    case ConnectionKind::Clique: return "clique";
  }
  return "edge";
}

inline ConnectionKind parse_connection_kind(std::string_view s) {
  if (s == "edge") return ConnectionKind::Edge;
  if (s == "star" || s == "degree" || s == "subgraph") return ConnectionKind::Star;
  if (s == "clique") return ConnectionKind::Clique;
  throw ParameterError("unknown connection kind '" + std::string(s) + "'");
}

inline void to_json(nlohmann::json& j, ConnectionKind k) { j = to_string(k); }
inline void from_json(const nlohmann::json& j, ConnectionKind& k) { k = parse_connection_kind(j.get<std::string>()); }

/// One sampled relational unit. For stars, members[0] is the center.
struct Connection {
  ConnectionKind kind = ConnectionKind::Edge;
  std::vector<EntityId> members;
  EdgeSet internal_edges;

  NodeSet member_set() const { return NodeSet(members.begin(), members.end()); }

  friend bool operator==(const Connection&, const Connection&) = default;
};

struct SamplePool {
  ConnectionKind kind = ConnectionKind::Edge;
  std::size_t param = 0;
  std::vector<Connection> connections;
  NodeSet distractors;

  friend bool operator==(const SamplePool&, const SamplePool&) = default;
};

inline Connection make_edge_connection(const Edge& e) {
  return Connection{ConnectionKind::Edge, {e.first, e.second}, {e}};
}

inline Connection make_star_connection(const LatentGraph& graph, const EntityId& center) {
  Connection c{ConnectionKind::Star, {center}, {}};
  for (const auto& leaf : graph.neighbors(center)) {
    c.members.push_back(leaf);
    c.internal_edges.insert(Edge::make(center, leaf));
  }
  return c;
}

inline Connection make_clique_connection(std::vector<EntityId> members) {
  Connection c{ConnectionKind::Clique, std::move(members), {}};
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    for (std::size_t j = i + 1; j < c.members.size(); ++j) {
      c.internal_edges.insert(Edge::make(c.members[i], c.members[j]));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Selectors. The try_ forms return nullopt when no unit exists.
// ---------------------------------------------------------------------------

inline std::optional<Edge> try_select_min_edge(const LatentGraph& graph) {
  std::optional<Edge> best;
  std::size_t best_score = 0;
  // edges() iterates in canonical order, so the first strict minimum wins ties.
  for (const auto& e : graph.edges()) {
    std::size_t score = graph.degree(e.first) + graph.degree(e.second);
    if (!best || score < best_score) {
      best = e;
      best_score = score;
    }
  }
  return best;
}

inline Edge select_min_edge(const LatentGraph& graph) {
  auto e = try_select_min_edge(graph);
  if (!e) throw NoValidUnitError("graph has no edges");
  return *e;
}

inline std::optional<Connection> try_select_min_star(const LatentGraph& graph, std::size_t d) {
  std::optional<EntityId> best;
  std::size_t best_score = 0;
  for (const auto& v : graph.nodes()) {
    if (graph.degree(v) != d) continue;
    std::size_t score = d;
    for (const auto& u : graph.neighbors(v)) score += graph.degree(u);
    if (!best || score < best_score) {
      best = v;
      best_score = score;
    }
  }
  if (!best) return std::nullopt;
  return make_star_connection(graph, *best);
}

inline Connection select_min_star(const LatentGraph& graph, std::size_t d) {
  if (d < 1) throw ParameterError("star degree must be >= 1");
  auto c = try_select_min_star(graph, d);
  if (!c) throw NoValidUnitError("no node of degree " + std::to_string(d));
  return *c;
}

namespace detail {

/// Enumerates every k-clique exactly once as an ascending id list by extending partial cliques
/// only with larger, commonly adjacent ids. Exponential in the worst case; intended for graphs
/// of tens to low hundreds of nodes.
class MinCliqueSearch {
 public:
  MinCliqueSearch(const LatentGraph& graph, std::size_t k) : graph_(graph), k_(k) {}

  std::optional<std::vector<EntityId>> run() {
    std::vector<EntityId> candidates;
    for (const auto& v : graph_.nodes()) {
      if (graph_.degree(v) + 1 >= k_) candidates.push_back(v);
    }
    std::vector<EntityId> current;
    extend(current, 0, candidates);
    return best_;
  }

 private:
  void extend(std::vector<EntityId>& current, std::size_t score, const std::vector<EntityId>& candidates) {
    if (current.size() == k_) {
      if (!best_ || score < best_score_ || (score == best_score_ && current < *best_)) {
        best_ = current;
        best_score_ = score;
      }
      return;
    }
    const std::size_t missing = k_ - current.size();
    for (std::size_t i = 0; i + missing <= candidates.size(); ++i) {
      const EntityId& v = candidates[i];
      std::vector<EntityId> next;
      const auto& adj = graph_.neighbors(v);
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        if (adj.count(candidates[j])) next.push_back(candidates[j]);
      }
      if (next.size() + 1 < missing) continue;
      current.push_back(v);
      extend(current, score + graph_.degree(v), next);
      current.pop_back();
    }
  }

  const LatentGraph& graph_;
  std::size_t k_;
  std::optional<std::vector<EntityId>> best_;
  std::size_t best_score_ = 0;
};

}  // namespace detail

inline std::optional<Connection> try_select_min_clique(const LatentGraph& graph, std::size_t k) {
  auto members = detail::MinCliqueSearch(graph, k).run();
  if (!members) return std::nullopt;
  return make_clique_connection(std::move(*members));
}

inline Connection select_min_clique(const LatentGraph& graph, std::size_t k) {
  if (k < 2) throw ParameterError("clique size must be >= 2");
  auto c = try_select_min_clique(graph, k);
  if (!c) throw NoValidUnitError("no clique of size " + std::to_string(k));
  return *c;
}

// ---------------------------------------------------------------------------

inline void validate_selector(ConnectionKind kind, std::size_t param) {
  if (kind == ConnectionKind::Star && param < 1) throw ParameterError("star selector needs degree d >= 1");
  if (kind == ConnectionKind::Clique && param < 2) throw ParameterError("clique selector needs size k >= 2");
}

inline SamplePool run_subgraph_sampling(const LatentGraph& graph, ConnectionKind kind, std::size_t param) {
  validate_selector(kind, param);
  SamplePool pool{kind, kind == ConnectionKind::Edge ? 0 : param, {}, {}};
  LatentGraph working = graph;

  while (true) {
    std::optional<Connection> unit;
    switch (kind) {
      case ConnectionKind::Edge:
        if (auto e = try_select_min_edge(working)) unit = make_edge_connection(*e);
        break;
      case ConnectionKind::Star:
        unit = try_select_min_star(working, param);
        break;
      case ConnectionKind::Clique:
        unit = try_select_min_clique(working, param);
        break;
    }
    if (!unit) break;
    working.remove_nodes(closed_neighborhood(working, unit->member_set()));
    pool.connections.push_back(std::move(*unit));
  }
  pool.distractors = working.nodes();
  return pool;
}

// ---------------------------------------------------------------------------
// Pool files, for audit and replay.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const Connection& c) {
  j = {{"kind", c.kind}, {"members", c.members}, {"edges", c.internal_edges}};
}

inline void from_json(const nlohmann::json& j, Connection& c) {
  c.kind = j.at("kind").get<ConnectionKind>();
  c.members = j.at("members").get<std::vector<EntityId>>();
  c.internal_edges.clear();
  for (const auto& e : j.at("edges")) c.internal_edges.insert(e.get<Edge>());
}

inline void to_json(nlohmann::json& j, const SamplePool& p) {
  j = {{"kind", p.kind}, {"param", p.param}, {"connections", p.connections}, {"distractors", p.distractors}};
}

inline void from_json(const nlohmann::json& j, SamplePool& p) {
  p.kind = j.at("kind").get<ConnectionKind>();
  p.param = j.at("param").get<std::size_t>();
  p.connections = j.at("connections").get<std::vector<Connection>>();
  p.distractors.clear();
  for (const auto& d : j.at("distractors")) p.distractors.insert(d.get<EntityId>());
}

inline void save_pool(const SamplePool& pool, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write pool file " + path.string());
  out << nlohmann::json(pool).dump(2) << "\n";
}

inline SamplePool load_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pool file " + path.string());
  try {
    return nlohmann::json::parse(in).get<SamplePool>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("pool " + path.string() + ": " + ex.what());
  }
}

}  // namespace memdrift
