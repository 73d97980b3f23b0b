#include "sampling_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace memdrift;
using namespace memdrift::testing;

TEST(SelectMinEdge, SingleEdge) {
  EXPECT_EQ(select_min_edge(graph({}, {{"A", "B"}})), Edge::make(std::string("A"), std::string("B")));
}

TEST(SelectMinEdge, StarTiesBreakOnCanonicalPair) {
  // All three edges score 4; canonical pairs are (W,X) < (X,Y) < (X,Z).
  auto g = graph({}, {{"X", "Y"}, {"X", "Z"}, {"X", "W"}});
  EXPECT_EQ(select_min_edge(g), Edge::make(std::string("W"), std::string("X")));
  // Same shape with the center sorting first: (A,B) wins.
  auto h = graph({}, {{"A", "B"}, {"A", "C"}, {"A", "D"}});
  EXPECT_EQ(select_min_edge(h), Edge::make(std::string("A"), std::string("B")));
}

TEST(SelectMinEdge, PathTie) {
  EXPECT_EQ(select_min_edge(graph({}, {{"A", "B"}, {"B", "C"}})), Edge::make(std::string("A"), std::string("B")));
}

TEST(SelectMinEdge, PrefersLowerDegreeSum) {
  // (A,B) sits in a dense corner; (Y,Z) is isolated and scores 2.
  auto g = graph({}, {{"A", "B"}, {"A", "C"}, {"B", "C"}, {"Y", "Z"}});
  EXPECT_EQ(select_min_edge(g), Edge::make(std::string("Y"), std::string("Z")));
}

TEST(SelectMinEdge, NoEdges) { EXPECT_THROW(select_min_edge(graph({"A", "B"})), NoValidUnitError); }

TEST(SelectMinStar, LoneStar) {
  auto c = select_min_star(graph({}, {{"X", "Y"}, {"X", "Z"}}), 2);
  EXPECT_EQ(c.kind, ConnectionKind::Star);
  EXPECT_EQ(c.members, (std::vector<EntityId>{id("X"), id("Y"), id("Z")}));
  EXPECT_EQ(c.internal_edges, edges({{"X", "Y"}, {"X", "Z"}}));
}

TEST(SelectMinStar, LowerClosedNeighborhoodSumWins) {
  // Center A has leaf C that is also tied to D: N[A] sums 2+1+2 = 5. C itself has degree 2
  // and scores 2+2+1 = 5. Center Z has two degree-1 leaves: 2+1+1 = 4, and wins despite
  // sorting last.
  auto g = graph({}, {{"A", "B"}, {"A", "C"}, {"C", "D"}, {"Z", "X"}, {"Z", "Y"}});
  auto c = select_min_star(g, 2);
  EXPECT_EQ(c.members.front(), id("Z"));
  EXPECT_EQ(c.member_set(), nodes({"X", "Y", "Z"}));
}

TEST(SelectMinStar, TiesBreakOnLowestCenter) {
  auto g = graph({}, {{"Q", "R"}, {"Q", "S"}, {"B", "C"}, {"B", "D"}});
  EXPECT_EQ(select_min_star(g, 2).members.front(), id("B"));
}

TEST(SelectMinStar, LeavesMayBeAdjacentButOnlySpokesAreGold) {
  auto g = graph({}, {{"C", "A"}, {"C", "B"}, {"A", "B"}});
  auto c = select_min_star(g, 2);
  EXPECT_EQ(c.members.front(), id("A"));
  EXPECT_EQ(c.internal_edges.size(), 2u);
}

TEST(SelectMinStar, Errors) {
  auto path = graph({}, {{"A", "B"}, {"B", "C"}, {"C", "D"}});
  EXPECT_THROW(select_min_star(path, 3), NoValidUnitError);
  EXPECT_THROW(select_min_star(path, 0), ParameterError);
}

TEST(SelectMinClique, LoneTriangle) {
  auto c = select_min_clique(graph({}, {{"A", "B"}, {"B", "C"}, {"A", "C"}}), 3);
  EXPECT_EQ(c.members, (std::vector<EntityId>{id("A"), id("B"), id("C")}));
  EXPECT_EQ(c.internal_edges.size(), 3u);
}

TEST(SelectMinClique, TriangleBeatsK4Triangles) {
  auto g = graph({}, {{"A", "B"},
                      {"B", "C"},
                      {"A", "C"},
                      {"D", "E"},
                      {"D", "F"},
                      {"D", "G"},
                      {"E", "F"},
                      {"E", "G"},
                      {"F", "G"}});
  EXPECT_EQ(select_min_clique(g, 3).member_set(), nodes({"A", "B", "C"}));
  EXPECT_EQ(select_min_clique(g, 4).member_set(), nodes({"D", "E", "F", "G"}));
}

TEST(SelectMinClique, PrefersLowerAggregateOverLowerIds) {
  // Triangle A,B,C carries a pendant on A (aggregate 7); triangle X,Y,Z aggregates 6.
  auto g = graph({}, {{"A", "B"}, {"B", "C"}, {"A", "C"}, {"A", "P"}, {"X", "Y"}, {"Y", "Z"}, {"X", "Z"}});
  EXPECT_EQ(select_min_clique(g, 3).member_set(), nodes({"X", "Y", "Z"}));
}

TEST(SelectMinClique, Errors) {
  auto tri = graph({}, {{"A", "B"}, {"B", "C"}, {"A", "C"}});
  EXPECT_THROW(select_min_clique(tri, 4), NoValidUnitError);
  EXPECT_THROW(select_min_clique(tri, 1), ParameterError);
}

TEST(RunSampling, EdgelessGraph) {
  auto pool = run_subgraph_sampling(graph({"A", "B", "C", "D", "E"}), ConnectionKind::Edge, 0);
  EXPECT_TRUE(pool.connections.empty());
  EXPECT_EQ(pool.distractors.size(), 5u);
}

TEST(RunSampling, EmptyGraph) {
  auto pool = run_subgraph_sampling(LatentGraph{}, ConnectionKind::Clique, 3);
  EXPECT_TRUE(pool.connections.empty());
  EXPECT_TRUE(pool.distractors.empty());
}

TEST(RunSampling, PathOfFive) {
  auto g = graph({}, {{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "E"}});
  auto pool = run_subgraph_sampling(g, ConnectionKind::Edge, 0);
  ASSERT_EQ(pool.connections.size(), 2u);
  EXPECT_EQ(pool.connections[0].internal_edges, edges({{"A", "B"}}));
  EXPECT_EQ(pool.connections[1].internal_edges, edges({{"D", "E"}}));
  EXPECT_TRUE(pool.distractors.empty());
}

TEST(RunSampling, TwoTrianglesAndIsolatedNode) {
  auto g = graph({"G"}, {{"A", "B"}, {"B", "C"}, {"A", "C"}, {"D", "E"}, {"E", "F"}, {"D", "F"}});
  auto pool = run_subgraph_sampling(g, ConnectionKind::Clique, 3);
  ASSERT_EQ(pool.connections.size(), 2u);
  EXPECT_EQ(pool.connections[0].member_set(), nodes({"A", "B", "C"}));
  EXPECT_EQ(pool.connections[1].member_set(), nodes({"D", "E", "F"}));
  EXPECT_EQ(pool.distractors, nodes({"G"}));
}

TEST(RunSampling, InvalidParams) {
  auto g = graph({}, {{"A", "B"}});
  EXPECT_THROW(run_subgraph_sampling(g, ConnectionKind::Star, 0), ParameterError);
  EXPECT_THROW(run_subgraph_sampling(g, ConnectionKind::Clique, 1), ParameterError);
  EXPECT_NO_THROW(run_subgraph_sampling(g, ConnectionKind::Edge, 0));
}

TEST(RunSampling, KindNames) {
  EXPECT_EQ(parse_connection_kind("degree"), ConnectionKind::Star);
  EXPECT_EQ(parse_connection_kind("clique"), ConnectionKind::Clique);
  EXPECT_THROW(parse_connection_kind("triangle"), ParameterError);
}

TEST(RunSampling, PoolFileRoundTrip) {
  TempDir dir("pool");
  auto g = graph({"G"}, {{"A", "B"}, {"B", "C"}, {"A", "C"}, {"D", "E"}, {"E", "F"}, {"D", "F"}});
  auto pool = run_subgraph_sampling(g, ConnectionKind::Clique, 3);
  save_pool(pool, dir / "pool.json");
  EXPECT_EQ(load_pool(dir / "pool.json"), pool);
}

// Random graphs, every branch, compared against exhaustive selection and checked for
// every structural invariant.
TEST(SamplerProperties, MatchesExhaustiveReferenceOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  const double probabilities[] = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  const std::pair<ConnectionKind, std::size_t> selectors[] = {
      {ConnectionKind::Edge, 0},   {ConnectionKind::Star, 1},   {ConnectionKind::Star, 2},
      {ConnectionKind::Star, 3},   {ConnectionKind::Clique, 2}, {ConnectionKind::Clique, 3},
      {ConnectionKind::Clique, 4}};
  std::size_t graphs = 0;
  for (int round = 0; round < 50; ++round) {
    for (double p : probabilities) {
      const std::size_t n = 2 + rng() % 29;
      LatentGraph g = oracle::random_graph(rng, n, p);
      ++graphs;
      for (const auto& [kind, param] : selectors) {
        SamplePool pool = run_subgraph_sampling(g, kind, param);
        auto bad = oracle::violations(g, pool);
        ASSERT_TRUE(bad.empty()) << bad.front() << " (n=" << n << ", p=" << p << ")";
        ASSERT_EQ(pool, oracle::reference_pool(g, kind, param)) << to_string(kind) << " " << param;
        ASSERT_EQ(run_subgraph_sampling(g, kind, param), pool);
      }
    }
  }
  EXPECT_GE(graphs, 500u);
}
