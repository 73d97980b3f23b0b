#pragma once

// Exhaustive reference for the sampler: scores every candidate unit by enumeration and
// checks pool invariants directly against the source graph.

#include "memdrift/graph.hpp"
#include "memdrift/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace memdrift::oracle {

inline LatentGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  LatentGraph g;
  std::vector<EntityId> ids;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "v%02u", static_cast<unsigned>(i));
    ids.emplace_back(buf);
    g.add_node(ids.back());
  }
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) g.add_edge(ids[i], ids[j]);
    }
  }
  return g;
}

inline std::size_t deg(const LatentGraph& g, const EntityId& v) {
  std::size_t d = 0;
  for (const auto& e : g.edges()) d += e.touches(v) ? 1 : 0;
  return d;
}

inline bool adjacent(const LatentGraph& g, const EntityId& a, const EntityId& b) {
  return a != b && g.edges().count(Edge::make(a, b)) != 0;
}

/// Best unit as a sorted-or-center-first member list, or nullopt.
inline std::optional<std::vector<EntityId>> best_unit(const LatentGraph& g, ConnectionKind kind, std::size_t param) {
  const std::vector<EntityId> v(g.nodes().begin(), g.nodes().end());
  std::optional<std::vector<EntityId>> best;
  std::size_t best_score = 0;
  auto offer = [&](std::vector<EntityId> unit, std::size_t score, const std::vector<EntityId>& key,
                   const std::vector<EntityId>& best_key) {
    if (!best || score < best_score || (score == best_score && key < best_key)) {
      best = std::move(unit);
      best_score = score;
    }
  };
  switch (kind) {
    case ConnectionKind::Edge:
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
          if (!adjacent(g, v[i], v[j])) continue;
          std::vector<EntityId> unit = {v[i], v[j]};
          offer(unit, deg(g, v[i]) + deg(g, v[j]), unit, best ? *best : unit);
        }
      }
      break;
    case ConnectionKind::Star:
      for (const auto& c : v) {
        if (deg(g, c) != param) continue;
        std::vector<EntityId> unit = {c};
        std::size_t score = deg(g, c);
        for (const auto& u : v) {
          if (u != c && adjacent(g, c, u)) {
            unit.push_back(u);
            score += deg(g, u);
          }
        }
        std::vector<EntityId> key = {c};
        std::vector<EntityId> best_key = best ? std::vector<EntityId>{best->front()} : key;
        offer(unit, score, key, best_key);
      }
      break;
    case ConnectionKind::Clique: {
      if (param > v.size()) break;
      std::vector<bool> mask(v.size(), false);
      std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(param), true);
      do {
        std::vector<EntityId> unit;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (mask[i]) unit.push_back(v[i]);
        }
        bool clique = true;
        for (std::size_t a = 0; a < unit.size() && clique; ++a) {
          for (std::size_t b = a + 1; b < unit.size() && clique; ++b) clique = adjacent(g, unit[a], unit[b]);
        }
        if (!clique) continue;
        std::size_t score = 0;
        for (const auto& u : unit) score += deg(g, u);
        offer(unit, score, unit, best ? *best : unit);
      } while (std::prev_permutation(mask.begin(), mask.end()));
      break;
    }
  }
  return best;
}

/// Reference run of the selection loop.
inline SamplePool reference_pool(const LatentGraph& source, ConnectionKind kind, std::size_t param) {
  SamplePool pool{kind, kind == ConnectionKind::Edge ? 0 : param, {}, {}};
  LatentGraph working = source;
  while (auto unit = best_unit(working, kind, param)) {
    Connection c{kind, *unit, {}};
    if (kind == ConnectionKind::Star) {
      for (std::size_t i = 1; i < unit->size(); ++i) c.internal_edges.insert(Edge::make((*unit)[0], (*unit)[i]));
    } else {
      for (std::size_t a = 0; a < unit->size(); ++a) {
        for (std::size_t b = a + 1; b < unit->size(); ++b) c.internal_edges.insert(Edge::make((*unit)[a], (*unit)[b]));
      }
    }
    NodeSet doomed(unit->begin(), unit->end());
    for (const auto& u : *unit) {
      for (const auto& w : working.nodes()) {
        if (adjacent(working, u, w)) doomed.insert(w);
      }
    }
    LatentGraph next;
    for (const auto& w : working.nodes()) {
      if (!doomed.count(w)) next.add_node(w);
    }
    for (const auto& e : working.edges()) {
      if (!doomed.count(e.first) && !doomed.count(e.second)) next.add_edge(e.first, e.second);
    }
    working = std::move(next);
    pool.connections.push_back(std::move(c));
  }
  pool.distractors = working.nodes();
  return pool;
}

/// Checks every pool invariant against the source graph. Returns the violations found.
inline std::vector<std::string> violations(const LatentGraph& source, const SamplePool& pool) {
  std::vector<std::string> out;
  const std::size_t param = pool.param;
  std::vector<NodeSet> member_sets;
  for (const auto& c : pool.connections) member_sets.emplace_back(c.members.begin(), c.members.end());

  for (std::size_t i = 0; i < pool.connections.size(); ++i) {
    const auto& c = pool.connections[i];
    for (const auto& e : c.internal_edges) {
      if (!source.edges().count(e)) out.push_back("internal edge missing from source");
    }
    if (member_sets[i].size() != c.members.size()) out.push_back("repeated member");
    switch (c.kind) {
      case ConnectionKind::Edge:
        if (c.members.size() != 2 || c.internal_edges.size() != 1) out.push_back("malformed edge unit");
        break;
      case ConnectionKind::Clique:
        if (c.members.size() != param || c.internal_edges.size() != param * (param - 1) / 2) {
          out.push_back("clique without k(k-1)/2 internal edges");
        }
        break;
      case ConnectionKind::Star: {
        if (c.members.size() != param + 1 || c.internal_edges.size() != param) out.push_back("malformed star");
        if (deg(source, c.members[0]) < param) out.push_back("star center below degree d in source");
        // Degree at selection time: the working graph after removing earlier closed neighborhoods.
        NodeSet removed;
        for (std::size_t j = 0; j < i; ++j) {
          for (const auto& m : member_sets[j]) {
            removed.insert(m);
            for (const auto& w : source.nodes()) {
              if (adjacent(source, m, w)) removed.insert(w);
            }
          }
        }
        std::size_t working_degree = 0;
        for (const auto& w : source.nodes()) {
          if (!removed.count(w) && w != c.members[0] && adjacent(source, c.members[0], w)) ++working_degree;
        }
        if (working_degree != param) out.push_back("star center degree != d at selection time");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < member_sets.size(); ++i) {
    for (std::size_t j = i + 1; j < member_sets.size(); ++j) {
      for (const auto& a : member_sets[i]) {
        if (member_sets[j].count(a)) out.push_back("units share a member");
        for (const auto& b : member_sets[j]) {
          if (adjacent(source, a, b)) out.push_back("source edge joins two units");
        }
      }
    }
  }
  for (const auto& d : pool.distractors) {
    for (const auto& m : member_sets) {
      if (m.count(d)) out.push_back("distractor is a unit member");
      for (const auto& a : m) {
        if (adjacent(source, a, d)) out.push_back("source edge joins a distractor to a unit");
      }
    }
    if (pool.kind == ConnectionKind::Edge) {
      for (const auto& d2 : pool.distractors) {
        if (d < d2 && adjacent(source, d, d2)) out.push_back("edge task distractors are adjacent");
      }
    }
  }
  return out;
}

}  // namespace memdrift::oracle
