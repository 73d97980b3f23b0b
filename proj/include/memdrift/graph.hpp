#pragma once

#include "memdrift/error.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

/// Opaque entity identifier, unique within a corpus.
class EntityId {
 public:
  EntityId() = default;
  explicit EntityId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const EntityId&, const EntityId&) = default;
  friend bool operator==(const EntityId&, const EntityId&) = default;

  friend std::ostream& operator<<(std::ostream& os, const EntityId& id) { return os << id.value_; }

 private:
  std::string value_;
};

inline void to_json(nlohmann::json& j, const EntityId& id) { j = id.str(); }
inline void from_json(const nlohmann::json& j, EntityId& id) { id = EntityId(j.get<std::string>()); }

/// Undirected edge stored canonically: first < second.
struct Edge {
  EntityId first;
  EntityId second;

  static Edge make(EntityId a, EntityId b) {
    if (a == b) throw IntegrityError("self-loop on entity '" + a.str() + "'");
    if (b < a) std::swap(a, b);
    return Edge{std::move(a), std::move(b)};
  }

  static Edge make(const std::string& a, const std::string& b) {
    return make(EntityId(a), EntityId(b));
  }

  bool touches(const EntityId& v) const { return first == v || second == v; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Edge& e) {
    return os << '(' << e.first << ',' << e.second << ')';
  }
};

inline void to_json(nlohmann::json& j, const Edge& e) { j = nlohmann::json::array({e.first, e.second}); }
inline void from_json(const nlohmann::json& j, Edge& e) {
  if (!j.is_array() || j.size() != 2) throw ParseError("edge must be a two-element array: " + j.dump());
  e = Edge::make(j.at(0).get<EntityId>(), j.at(1).get<EntityId>());
}

using NodeSet = std::set<EntityId>;
using EdgeSet = std::set<Edge>;

/// Canonicalizes arbitrary endpoint pairs into an edge set; reversed duplicates collapse.
inline EdgeSet canonicalize(const std::vector<std::pair<EntityId, EntityId>>& pairs) {
  EdgeSet out;
  for (const auto& [a, b] : pairs) out.insert(Edge::make(a, b));
  return out;
}

inline EdgeSet canonicalize(const EdgeSet& edges) {
  EdgeSet out;
  for (const auto& e : edges) out.insert(Edge::make(e.first, e.second));
  return out;
}

/// Simple undirected graph over entity ids. No self-loops, no multi-edges.
class LatentGraph {
 public:
  void add_node(const EntityId& v) {
    if (v.empty()) throw IntegrityError("empty entity id");
    adjacency_.try_emplace(v);
    nodes_.insert(v);
  }

  /// Both endpoints must already be nodes. Returns false if the edge was already present.
  bool add_edge(const EntityId& a, const EntityId& b) {
    Edge e = Edge::make(a, b);
    require(e.first);
    require(e.second);
    if (!edges_.insert(e).second) return false;
    adjacency_[e.first].insert(e.second);
    adjacency_[e.second].insert(e.first);
    return true;
  }

  bool contains(const EntityId& v) const { return nodes_.count(v) != 0; }

  bool has_edge(const EntityId& a, const EntityId& b) const {
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.count(b) != 0;
  }

  const NodeSet& nodes() const noexcept { return nodes_; }
  const EdgeSet& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const NodeSet& neighbors(const EntityId& v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) throw IntegrityError("unknown entity '" + v.str() + "'");
    return it->second;
  }

  std::size_t degree(const EntityId& v) const { return neighbors(v).size(); }

  /// Removes the nodes and every incident edge. Unknown ids are ignored.
  void remove_nodes(const NodeSet& doomed) {
    for (const auto& v : doomed) {
      auto it = adjacency_.find(v);
      if (it == adjacency_.end()) continue;
      for (const auto& u : it->second) {
        adjacency_[u].erase(v);
        edges_.erase(Edge::make(u, v));
      }
      adjacency_.erase(it);
      nodes_.erase(v);
    }
  }

  friend bool operator==(const LatentGraph& a, const LatentGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void require(const EntityId& v) const {
    if (!contains(v)) throw IntegrityError("edge references unknown entity '" + v.str() + "'");
  }

  std::map<EntityId, NodeSet> adjacency_;
  NodeSet nodes_;
  EdgeSet edges_;
};

inline std::size_t degree(const LatentGraph& graph, const EntityId& v) { return graph.degree(v); }

/// U together with every node adjacent to a member of U.
inline NodeSet closed_neighborhood(const LatentGraph& graph, const NodeSet& members) {
  NodeSet out;
  for (const auto& v : members) {
    const auto& adj = graph.neighbors(v);
    out.insert(v);
    out.insert(adj.begin(), adj.end());
  }
  return out;
}

}  // namespace memdrift

template <>
struct std::hash<memdrift::EntityId> {
  std::size_t operator()(const memdrift::EntityId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
