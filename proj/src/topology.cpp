#include "qnet/topology.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "qnet/error.h"

namespace qnet {

const char* to_string(NodeKind kind)
{
    return kind == NodeKind::Router ? "router" : "processor";
}

NodeKind node_kind_from_string(const std::string& s)
{
    if (s == "router")
        return NodeKind::Router;
    if (s == "processor")
        return NodeKind::Processor;
    throw InvalidParameter("unknown node kind '" + s + "'");
}

Topology Topology::build(std::string name, double link_length_km, std::vector<NodeSpec> nodes,
                         std::vector<Edge> edges)
{
    if (!(link_length_km > 0.0))
        throw InvalidParameter("link_length_km must be > 0");
    if (nodes.size() < 2)
        throw InvalidParameter("topology needs at least two nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id != i)
            throw InvalidParameter("node ids must be dense and ordered (expected " + std::to_string(i) + ")");
    }

    Topology t;
    t.name_ = std::move(name);
    t.link_length_km_ = link_length_km;
    t.nodes_ = std::move(nodes);
    t.adjacency_.resize(t.nodes_.size());

    std::set<Edge> seen;
    for (auto [a, b] : edges) {
        if (a >= t.nodes_.size() || b >= t.nodes_.size())
            throw InvalidParameter("edge references unknown node");
        if (a == b)
            throw InvalidParameter("self-loop on node " + std::to_string(a));
        Edge e{std::min(a, b), std::max(a, b)};
        if (!seen.insert(e).second)
            throw InvalidParameter("parallel edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
        t.adjacency_[a].push_back(b);
        t.adjacency_[b].push_back(a);
    }
    t.edges_.assign(seen.begin(), seen.end());
    for (auto& adj : t.adjacency_)
        std::sort(adj.begin(), adj.end());

    auto dist = hop_distances(t, 0);
    if (std::any_of(dist.begin(), dist.end(), [](auto d) { return d == std::numeric_limits<std::uint32_t>::max(); }))
        throw InvalidParameter("topology '" + t.name_ + "' is not connected");
    return t;
}

bool Topology::has_edge(NodeId a, NodeId b) const
{
    const auto& adj = adjacency_.at(a);
    return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<NodeId> Topology::processors() const
{
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (n.kind == NodeKind::Processor)
            out.push_back(n.id);
    return out;
}

namespace {

// Assigns memory_count = degree, the sizing rule all generators share.
Topology finish(std::string name, double length, std::vector<NodeKind> kinds, std::vector<Topology::Edge> edges)
{
    std::vector<std::uint32_t> degree(kinds.size(), 0);
    for (auto [a, b] : edges) {
        ++degree[a];
        ++degree[b];
    }
    std::vector<NodeSpec> nodes;
    nodes.reserve(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i)
        nodes.push_back({static_cast<NodeId>(i), kinds[i], degree[i]});
    return Topology::build(std::move(name), length, std::move(nodes), std::move(edges));
}

} // namespace

Topology make_star(std::uint32_t k, double link_length_km)
{
    if (k < 1)
        throw InvalidParameter("star: k must be >= 1");
    std::vector<NodeKind> kinds(k + 1, NodeKind::Processor);
    kinds[0] = NodeKind::Router;
    std::vector<Topology::Edge> edges;
    for (NodeId leaf = 1; leaf <= k; ++leaf)
        edges.emplace_back(0, leaf);
    return finish("star", link_length_km, std::move(kinds), std::move(edges));
}

Topology make_bottleneck(std::uint32_t k_left, std::uint32_t k_right, double link_length_km)
{
    if (k_left < 1 || k_right < 1)
        throw InvalidParameter("bottleneck: k_left and k_right must be >= 1");
    const std::uint32_t n = 2 + k_left + k_right;
    std::vector<NodeKind> kinds(n, NodeKind::Processor);
    kinds[0] = kinds[1] = NodeKind::Router;
    std::vector<Topology::Edge> edges{{0, 1}};
    for (NodeId leaf = 2; leaf < 2 + k_left; ++leaf)
        edges.emplace_back(0, leaf);
    for (NodeId leaf = 2 + k_left; leaf < n; ++leaf)
        edges.emplace_back(1, leaf);
    return finish("bottleneck", link_length_km, std::move(kinds), std::move(edges));
}

Topology make_grid(std::uint32_t rows, std::uint32_t cols, double link_length_km)
{
    if (rows < 1 || cols < 1 || static_cast<std::uint64_t>(rows) * cols < 2)
        throw InvalidParameter("grid: rows*cols must be >= 2");
    std::vector<Topology::Edge> edges;
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            NodeId id = r * cols + c;
            if (c + 1 < cols)
                edges.emplace_back(id, id + 1);
            if (r + 1 < rows)
                edges.emplace_back(id, id + cols);
        }
    }
    return finish("grid", link_length_km, std::vector<NodeKind>(rows * cols, NodeKind::Processor), std::move(edges));
}

Topology make_caveman(std::uint32_t cliques, std::uint32_t clique_size, double link_length_km)
{
    if (cliques < 2)
        throw InvalidParameter("caveman: need at least 2 cliques");
    if (clique_size < 3)
        throw InvalidParameter("caveman: clique_size must be >= 3 to rewire an edge");
    const std::uint32_t n = cliques * clique_size;
    std::set<Topology::Edge> edges;
    for (std::uint32_t s = 0; s < n; s += clique_size)
        for (NodeId a = s; a < s + clique_size; ++a)
            for (NodeId b = a + 1; b < s + clique_size; ++b)
                edges.emplace(a, b);
    for (std::uint32_t s = 0; s < n; s += clique_size) {
        edges.erase({s, s + 1});
        NodeId prev = (s + n - 1) % n;
        edges.emplace(std::min(s, prev), std::max(s, prev));
    }
    return finish("caveman", link_length_km, std::vector<NodeKind>(n, NodeKind::Processor),
                  std::vector<Topology::Edge>(edges.begin(), edges.end()));
}

std::vector<std::uint32_t> hop_distances(const Topology& topo, NodeId target)
{
    constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(topo.size(), kInf);
    using Entry = std::pair<std::uint32_t, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist.at(target) = 0;
    heap.emplace(0, target);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[u])
            continue;
        for (NodeId v : topo.neighbors(u)) {
            if (d + 1 < dist[v]) {
                dist[v] = d + 1;
                heap.emplace(d + 1, v);
            }
        }
    }
    return dist;
}

std::vector<NodeId> dijkstra_path(const Topology& topo, NodeId from, NodeId to)
{
    if (from >= topo.size() || to >= topo.size())
        throw InvalidParameter("dijkstra_path: unknown node");
    if (from == to)
        throw InvalidParameter("dijkstra_path: endpoints must differ");
    auto dist = hop_distances(topo, to);
    if (dist[from] == std::numeric_limits<std::uint32_t>::max())
        throw NoPathError("no path from " + std::to_string(from) + " to " + std::to_string(to));

    std::vector<NodeId> path{from};
    NodeId cur = from;
    while (cur != to) {
        // neighbors are sorted, so the first hit is the smallest id
        for (NodeId v : topo.neighbors(cur)) {
            if (dist[v] + 1 == dist[cur]) {
                cur = v;
                break;
            }
        }
        path.push_back(cur);
    }
    return path;
}

nlohmann::json to_json(const Topology& topo)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : topo.nodes())
        nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"memory_count", n.memory_count}});
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : topo.edges())
        edges.push_back({a, b});
    return {{"name", topo.name()}, {"link_length_km", topo.link_length_km()}, {"nodes", nodes}, {"edges", edges}};
}

Topology topology_from_json(const nlohmann::json& doc)
{
    try {
        std::vector<NodeSpec> nodes;
        for (const auto& n : doc.at("nodes"))
            nodes.push_back({n.at("id").get<NodeId>(), node_kind_from_string(n.at("kind").get<std::string>()),
                             n.at("memory_count").get<std::uint32_t>()});
        std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        std::vector<Topology::Edge> edges;
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw InvalidParameter("edge must be a two-element array");
            edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
        }
        return Topology::build(doc.value("name", std::string{"custom"}), doc.value("link_length_km", kDefaultLinkLengthKm),
                               std::move(nodes), std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("topology document: ") + e.what());
    }
}

} // namespace qnet
