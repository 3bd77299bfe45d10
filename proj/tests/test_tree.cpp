#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "padtree/io.hpp"
#include "padtree/tree.hpp"

using namespace padtree;

TEST_CASE("cayley truncations have the regular-tree shape") {
  // 1 + (k+1) * (k^depth - 1) / (k - 1) vertices for k >= 2.
  TreeGraph t = build_cayley({2, 3, 0});
  CHECK(t.vertices().size() == 22);
  CHECK(t.edges().size() == 21);
  CHECK(t.completion_degree == 3);

  int leaves = 0;
  for (int v : t.vertices()) {
    const int d = t.degree(v);
    CHECK((d == 1 || d == 3));
    if (d == 1) ++leaves;
  }
  CHECK(leaves == 12);  // (k+1) k^(depth-1)

  TreeGraph t3 = build_cayley({3, 2, 0});
  CHECK(t3.vertices().size() == 17);
  CHECK(t3.degree(0) == 4);
}

TEST_CASE("order-one cayley trees are chains") {
  TreeGraph t = build_cayley({1, 3, 0});
  CHECK(t.vertices().size() == 7);
  CHECK(t.completion_degree == 2);
  int endpoints = 0;
  for (int v : t.vertices()) {
    CHECK(t.degree(v) <= 2);
    if (t.degree(v) == 1) ++endpoints;
  }
  CHECK(endpoints == 2);
  CHECK(diameter_path(t).size() == 7);
}

TEST_CASE("cayley ids grow breadth-first from the root") {
  TreeGraph t = build_cayley({2, 2, 0});
  CHECK(t.neighbors(0) == std::vector<int>{1, 2, 3});
  for (int v : {1, 2, 3}) {
    // Each depth-1 vertex keeps the root plus two depth-2 children.
    const auto& nb = t.neighbors(v);
    CHECK(nb.size() == 3);
    CHECK(nb.front() == 0);
    CHECK(nb[1] >= 4);
  }
}

TEST_CASE("cayley construction rejects bad specs") {
  CHECK_THROWS_AS(build_cayley({0, 2, 0}), DomainError);
  CHECK_THROWS_AS(build_cayley({2, 0, 0}), DomainError);
  CHECK_THROWS_AS(build_cayley({2, 12, 0}, 1000), ResourceLimit);
}

TEST_CASE("tree construction validates its input") {
  CHECK_THROWS_AS(TreeGraph::from_edges({{0, 1}, {1, 2}, {2, 0}}),
                  DomainError);  // cycle
  CHECK_THROWS_AS(TreeGraph::from_edges({{0, 0}}), DomainError);
  CHECK_THROWS_AS(TreeGraph::from_vertices_and_edges({0, 1, 2}, {{0, 1}}),
                  DomainError);  // disconnected
  CHECK_THROWS_AS(TreeGraph::from_vertices_and_edges({5}, {}), DomainError);
  CHECK_NOTHROW(TreeGraph::from_edges({{4, 9}}));
}

TEST_CASE("directed edges list both orientations") {
  TreeGraph t = TreeGraph::from_edges({{0, 1}, {1, 2}});
  auto de = t.directed_edges();
  CHECK(de.size() == 4);
  std::set<std::pair<int, int>> seen;
  for (const DirectedEdge& e : de) seen.insert({e.tail, e.head});
  CHECK(seen.count({0, 1}) == 1);
  CHECK(seen.count({1, 0}) == 1);
  CHECK(seen.count({2, 1}) == 1);
  CHECK(edge_key({7, 3}) == "7->3");
}

TEST_CASE("volumes know their boundary and closure") {
  TreeGraph t = build_cayley({2, 2, 0});
  Volume lambda(t, {0});
  CHECK(boundary(t, lambda) == std::vector<int>{1, 2, 3});
  CHECK(closure(t, lambda) == std::vector<int>{0, 1, 2, 3});
  CHECK(interior_boundary(t, lambda) == std::vector<int>{0});
  CHECK(unique_inner_neighbor(t, lambda, 2) == 0);

  Volume bigger(t, {0, 1});
  auto bd = boundary(t, bigger);
  CHECK(bd.size() == 4);  // 2, 3 and the two children of 1
  CHECK(std::find(bd.begin(), bd.end(), 2) != bd.end());

  CHECK_THROWS_AS(Volume(t, {1, 2}), DomainError);  // not connected
  CHECK_THROWS_AS(Volume(t, {}), DomainError);
  CHECK_THROWS_AS(Volume(t, {99}), DomainError);
}

TEST_CASE("diameter path is deterministic and maximal") {
  //        0 - 1 - 2 - 3
  //            |
  //            4
  TreeGraph t = TreeGraph::from_edges({{0, 1}, {1, 2}, {2, 3}, {1, 4}});
  auto path = diameter_path(t);
  CHECK(path.size() == 4);
  CHECK(path.front() < path.back());
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    CHECK(t.adjacent(path[i], path[i + 1]));
  }
}

TEST_CASE("embedding recovers a cayley truncation inside its own tree") {
  TreeGraph t = build_cayley({2, 3, 0});
  CayleyEmbedding emb = embed_cayley(t, 2, 3);
  CHECK(emb.k == 2);
  CHECK(emb.depth == 3);
  CHECK(emb.core.size() == 22);
  for (const auto& e : t.edges()) {
    CHECK(emb.classify(e.first, e.second) == EdgeClass::Core);
  }
}

TEST_CASE("embedding classifies pendant attachments as crossing") {
  TreeGraph host = TreeGraph::from_edges(
      {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}, {2, 6}, {2, 7}, {3, 8},
       {3, 9}, {0, 10}});  // cayley(2,2) plus a pendant at the root
  CayleyEmbedding emb = embed_cayley(host, 2, 2);
  CHECK(emb.core.size() == 10);
  bool has_crossing = false;
  for (const auto& e : host.edges()) {
    EdgeClass c = emb.classify(e.first, e.second);
    if (c == EdgeClass::Crossing) {
      has_crossing = true;
      CHECK((emb.in_core(e.first) != emb.in_core(e.second)));
    }
  }
  CHECK(has_crossing);
}

TEST_CASE("embedding fails when the host is too thin") {
  TreeGraph path = TreeGraph::from_edges({{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK_THROWS_AS(embed_cayley(path, 2, 2), NoEmbedding);
}

TEST_CASE("tree json round trips") {
  TreeGraph t = build_cayley({2, 2, 0});
  Json j = tree_to_json(t);
  TreeGraph back = tree_from_json(j);
  CHECK(back.vertices() == t.vertices());
  CHECK(back.edges() == t.edges());
  CHECK(back.completion_degree == t.completion_degree);

  Json spec = {{"cayley", {{"k", 2}, {"depth", 2}}}};
  TreeGraph fromspec = tree_from_json(spec);
  CHECK(fromspec.vertices().size() == 10);
}
