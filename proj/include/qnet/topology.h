#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace qnet {

using NodeId = std::uint32_t;

enum class NodeKind { Router, Processor };

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

struct NodeSpec {
    NodeId id = 0;
    NodeKind kind = NodeKind::Processor;
    std::uint32_t memory_count = 0;

    bool operator==(const NodeSpec&) const = default;
};

/// Undirected quantum-link graph. Node ids are dense: nodes[i].id == i.
///
/// Construction through `Topology::build` (or the generators) validates
/// connectivity, self-loops, parallel edges and endpoint existence; an
/// instance is immutable afterwards.
class Topology {
public:
    using Edge = std::pair<NodeId, NodeId>;

    static Topology build(std::string name, double link_length_km, std::vector<NodeSpec> nodes,
                          std::vector<Edge> edges);

    const std::string& name() const { return name_; }
    double link_length_km() const { return link_length_km_; }
    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const NodeSpec& node(NodeId id) const { return nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }

    /// Edges normalized to (min, max), sorted ascending.
    const std::vector<Edge>& edges() const { return edges_; }

    /// Neighbors of `id`, ascending.
    const std::vector<NodeId>& neighbors(NodeId id) const { return adjacency_.at(id); }
    std::uint32_t degree(NodeId id) const { return static_cast<std::uint32_t>(adjacency_.at(id).size()); }
    bool has_edge(NodeId a, NodeId b) const;

    std::vector<NodeId> processors() const;

    bool operator==(const Topology& o) const
    {
        return name_ == o.name_ && link_length_km_ == o.link_length_km_ && nodes_ == o.nodes_ && edges_ == o.edges_;
    }

private:
    std::string name_;
    double link_length_km_ = 0.0;
    std::vector<NodeSpec> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adjacency_;
};

inline constexpr double kDefaultLinkLengthKm = 10.0;

// Generators. Every node's memory_count equals its degree.

/// Router hub (id 0) with `k` Processor leaves (ids 1..k).
Topology make_star(std::uint32_t k, double link_length_km = kDefaultLinkLengthKm);

/// Left hub 0, right hub 1, left leaves 2..k_l+1, right leaves k_l+2..k_l+k_r+1.
Topology make_bottleneck(std::uint32_t k_left, std::uint32_t k_right, double link_length_km = kDefaultLinkLengthKm);

/// Row-major ids, no wrap-around.
Topology make_grid(std::uint32_t rows, std::uint32_t cols, double link_length_km = kDefaultLinkLengthKm);

/// Connected caveman graph: `cliques` cliques of `clique_size` consecutive ids
/// arranged in a ring. In clique c starting at s = c*clique_size, edge (s, s+1)
/// is removed and replaced with (s, s-1 mod n), linking to the previous clique.
Topology make_caveman(std::uint32_t cliques, std::uint32_t clique_size, double link_length_km = kDefaultLinkLengthKm);

/// Shortest hop path from `from` to `to`, both endpoints included.
///
/// Distances to `to` come from Dijkstra over unit link weights; the path is
/// then walked forward from `from` taking the smallest-id neighbor that is
/// one step closer, which yields the lexicographically smallest shortest path.
std::vector<NodeId> dijkstra_path(const Topology& topo, NodeId from, NodeId to);

/// Hop distance from every node to `target` (unreachable = UINT32_MAX).
std::vector<std::uint32_t> hop_distances(const Topology& topo, NodeId target);

nlohmann::json to_json(const Topology& topo);
Topology topology_from_json(const nlohmann::json& doc);

} // namespace qnet
