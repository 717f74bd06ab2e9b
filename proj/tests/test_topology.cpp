#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "qnet/error.h"
#include "qnet/topology.h"

using namespace qnet;

namespace {

void check_degree_rule(const Topology& t)
{
    for (const auto& n : t.nodes())
        CHECK(n.memory_count == t.degree(n.id));
}

// Plain BFS on the adjacency lists, independent of hop_distances.
std::vector<int> bfs(const Topology& t, NodeId src)
{
    std::vector<int> d(t.size(), -1);
    std::deque<NodeId> q{src};
    d[src] = 0;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop_front();
        for (auto [a, b] : t.edges()) {
            NodeId v = a == u ? b : (b == u ? a : u);
            if (v != u && d[v] < 0) {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    return d;
}

std::set<Topology::Edge> edge_set(const Topology& t) { return {t.edges().begin(), t.edges().end()}; }

} // namespace

TEST_CASE("star")
{
    auto t = make_star(25);
    CHECK(t.size() == 26);
    CHECK(t.edges().size() == 25);
    CHECK(t.node(0).kind == NodeKind::Router);
    CHECK(t.node(0).memory_count == 25);
    check_degree_rule(t);

    auto one = make_star(1);
    CHECK(one.size() == 2);
    CHECK(one.edges().size() == 1);
    CHECK(one.node(0).memory_count == 1);
    CHECK(one.node(1).memory_count == 1);

    auto three = make_star(3);
    CHECK(three.node(0).memory_count == 3);
    for (NodeId leaf = 1; leaf <= 3; ++leaf) {
        CHECK(three.node(leaf).memory_count == 1);
        CHECK(three.node(leaf).kind == NodeKind::Processor);
    }
    CHECK_THROWS_AS(make_star(0), InvalidParameter);
}

TEST_CASE("bottleneck")
{
    auto t = make_bottleneck(12, 13);
    CHECK(t.size() == 27);
    CHECK(t.edges().size() == 26);
    CHECK(t.degree(0) == 13);
    CHECK(t.degree(1) == 14);
    CHECK(t.has_edge(0, 1));
    check_degree_rule(t);

    auto path = make_bottleneck(1, 1);
    CHECK(path.size() == 4);
    CHECK(path.node(0).memory_count == 2);
    CHECK(path.node(1).memory_count == 2);

    auto small = make_bottleneck(2, 3);
    CHECK(small.size() == 7);
    CHECK(small.edges().size() == 6);
    CHECK_THROWS_AS(make_bottleneck(0, 3), InvalidParameter);
    CHECK_THROWS_AS(make_bottleneck(3, 0), InvalidParameter);
}

TEST_CASE("grid")
{
    auto t = make_grid(5, 5);
    CHECK(t.size() == 25);
    CHECK(t.edges().size() == 40);
    CHECK(t.degree(0) == 2);
    CHECK(t.degree(2) == 3);
    CHECK(t.degree(12) == 4);
    CHECK_FALSE(t.has_edge(4, 5)); // no wrap between rows
    CHECK_FALSE(t.has_edge(0, 20));
    check_degree_rule(t);

    auto line = make_grid(1, 2);
    CHECK(line.size() == 2);
    CHECK(line.edges().size() == 1);

    auto square = make_grid(2, 2);
    CHECK(square.edges().size() == 4);
    for (const auto& n : square.nodes())
        CHECK(n.memory_count == 2);
    CHECK_THROWS_AS(make_grid(1, 1), InvalidParameter);
}

TEST_CASE("caveman matches the reference connected-caveman generator")
{
    // networkx.connected_caveman_graph(5, 5).edges(), frozen
    const std::set<Topology::Edge> reference{
        {0, 2},   {0, 3},   {0, 4},   {0, 24},  {1, 2},   {1, 3},   {1, 4},   {2, 3},   {2, 4},   {3, 4},
        {4, 5},   {5, 7},   {5, 8},   {5, 9},   {6, 7},   {6, 8},   {6, 9},   {7, 8},   {7, 9},   {8, 9},
        {9, 10},  {10, 12}, {10, 13}, {10, 14}, {11, 12}, {11, 13}, {11, 14}, {12, 13}, {12, 14}, {13, 14},
        {14, 15}, {15, 17}, {15, 18}, {15, 19}, {16, 17}, {16, 18}, {16, 19}, {17, 18}, {17, 19}, {18, 19},
        {19, 20}, {20, 22}, {20, 23}, {20, 24}, {21, 22}, {21, 23}, {21, 24}, {22, 23}, {22, 24}, {23, 24}};
    auto t = make_caveman(5, 5);
    CHECK(t.size() == 25);
    CHECK(t.edges().size() == 50);
    CHECK(edge_set(t) == reference);
    check_degree_rule(t);
    for (const auto& n : t.nodes())
        CHECK(n.kind == NodeKind::Processor);

    auto small = make_caveman(2, 3);
    CHECK(small.size() == 6);
    CHECK(edge_set(small) == std::set<Topology::Edge>{{0, 2}, {0, 5}, {1, 2}, {2, 3}, {3, 5}, {4, 5}});

    CHECK_THROWS_AS(make_caveman(5, 2), InvalidParameter);
    CHECK_THROWS_AS(make_caveman(1, 5), InvalidParameter);
}

TEST_CASE("build rejects malformed graphs")
{
    std::vector<NodeSpec> nodes{{0, NodeKind::Processor, 1}, {1, NodeKind::Processor, 1}, {2, NodeKind::Processor, 1}};
    CHECK_THROWS_AS(Topology::build("x", 10, nodes, {{0, 1}}), InvalidParameter);          // disconnected
    CHECK_THROWS_AS(Topology::build("x", 10, nodes, {{0, 1}, {1, 1}, {1, 2}}), InvalidParameter); // self-loop
    CHECK_THROWS_AS(Topology::build("x", 10, nodes, {{0, 1}, {1, 0}, {1, 2}}), InvalidParameter); // parallel
    CHECK_THROWS_AS(Topology::build("x", 10, nodes, {{0, 1}, {1, 7}}), InvalidParameter);  // unknown endpoint
    CHECK_THROWS_AS(Topology::build("x", 0, nodes, {{0, 1}, {1, 2}}), InvalidParameter);   // length
    CHECK_NOTHROW(Topology::build("x", 10, nodes, {{0, 1}, {1, 2}}));
}

TEST_CASE("dijkstra_path examples")
{
    auto star = make_star(25);
    CHECK(dijkstra_path(star, 1, 2) == std::vector<NodeId>{1, 0, 2});

    auto grid = make_grid(5, 5);
    auto corner = dijkstra_path(grid, 0, 24);
    CHECK(corner.size() == 9);
    CHECK(corner.front() == 0);
    CHECK(corner.back() == 24);
    // lexicographically smallest: go along the row ids first (1 < 5)
    CHECK(corner == std::vector<NodeId>{0, 1, 2, 3, 4, 9, 14, 19, 24});

    CHECK_THROWS_AS(dijkstra_path(grid, 3, 3), InvalidParameter);
}

TEST_CASE("dijkstra_path length equals BFS distance on every pair")
{
    for (const auto& t : {make_caveman(5, 5), make_grid(5, 5), make_bottleneck(12, 13), make_star(25)}) {
        for (NodeId i = 0; i < t.size(); ++i) {
            const auto d = bfs(t, i);
            for (NodeId j = 0; j < t.size(); ++j) {
                if (i == j)
                    continue;
                const auto p = dijkstra_path(t, i, j);
                REQUIRE(static_cast<int>(p.size()) == d[j] + 1);
                for (std::size_t k = 0; k + 1 < p.size(); ++k)
                    CHECK(t.has_edge(p[k], p[k + 1]));
            }
        }
    }
}

TEST_CASE("dijkstra_path picks the lexicographically smallest shortest path")
{
    // Enumerate every shortest path on a small caveman graph by DFS and
    // compare against the smallest one.
    auto t = make_caveman(3, 4);
    for (NodeId i = 0; i < t.size(); ++i) {
        for (NodeId j = 0; j < t.size(); ++j) {
            if (i == j)
                continue;
            const auto d = bfs(t, j);
            std::vector<std::vector<NodeId>> all;
            std::vector<NodeId> cur{i};
            auto dfs = [&](auto&& self, NodeId u) -> void {
                if (u == j) {
                    all.push_back(cur);
                    return;
                }
                for (NodeId v : t.neighbors(u))
                    if (d[v] == d[u] - 1) {
                        cur.push_back(v);
                        self(self, v);
                        cur.pop_back();
                    }
            };
            dfs(dfs, i);
            CHECK(dijkstra_path(t, i, j) == *std::min_element(all.begin(), all.end()));
        }
    }
}

TEST_CASE("generators are deterministic and serialize")
{
    CHECK(make_caveman(5, 5) == make_caveman(5, 5));
    CHECK(dijkstra_path(make_grid(5, 5), 3, 21) == dijkstra_path(make_grid(5, 5), 3, 21));
    for (const auto& t : {make_caveman(5, 5), make_bottleneck(12, 13)}) {
        auto doc = to_json(t);
        CHECK(doc.at("nodes").size() == t.size());
        CHECK(doc.at("edges").size() == t.edges().size());
        CHECK(topology_from_json(doc) == t);
    }
    auto doc = to_json(make_star(3));
    CHECK(doc.dump() ==
          R"({"edges":[[0,1],[0,2],[0,3]],"link_length_km":10.0,"name":"star","nodes":[{"id":0,"kind":"router","memory_count":3},{"id":1,"kind":"processor","memory_count":1},{"id":2,"kind":"processor","memory_count":1},{"id":3,"kind":"processor","memory_count":1}]})");
}
