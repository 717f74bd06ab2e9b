#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnet/physics.h"
#include "qnet/sim_time.h"
#include "qnet/topology.h"

namespace qnet {

using ObjectiveId = std::uint64_t;

/// A user request for `pair_count` Bell pairs between two Processor nodes,
/// `memories` memories per endpoint, over [arrival, end).
struct Objective {
    NodeId source = 0;
    NodeId destination = 0;
    SimTime arrival;
    SimTime end;
    std::uint32_t memories = 1;
    WernerFidelity target_fidelity{0.8};
    std::uint32_t pair_count = 100;
    ObjectiveId id = 0;
    std::uint32_t priority = 0; // 0 is most urgent

    SimTime duration() const { return end - arrival; }

    bool operator==(const Objective&) const = default;
};

/// Source-destination weights over ordered Processor pairs.
class TrafficMatrix {
public:
    /// Throws InvalidParameter if `counts` is not square, has a nonzero
    /// diagonal, or sums to zero.
    explicit TrafficMatrix(std::vector<std::vector<std::uint64_t>> counts);

    std::size_t size() const { return counts_.size(); }
    std::uint64_t count(NodeId i, NodeId j) const { return counts_.at(i).at(j); }
    std::uint64_t total() const { return total_; }
    double probability(NodeId i, NodeId j) const
    {
        return static_cast<double>(counts_.at(i).at(j)) / static_cast<double>(total_);
    }

    /// Row-major flattened counts, index i*N + j. Feeds a discrete sampler.
    std::vector<double> weights() const;

private:
    std::vector<std::vector<std::uint64_t>> counts_;
    std::uint64_t total_ = 0;
};

/// Draws M_ij ~ Poisson(rate) for every ordered Processor pair i != j.
/// An all-zero draw is resampled once before failing.
TrafficMatrix build_traffic_matrix(const Topology& topo, double rate, std::uint64_t seed);

struct ObjectiveParams {
    std::size_t count = 100;
    double arrival_rate = 50.0;
    double duration_s = 1.0;
    std::uint32_t memories = 1;
    WernerFidelity target_fidelity{0.8};
    std::uint32_t pair_count = 100;
};

/// Objectives in arrival order with ids 0..count-1. Pair, priority and
/// inter-arrival draws each use their own stream derived from `seed`.
std::vector<Objective> generate_objectives(const TrafficMatrix& tm, const ObjectiveParams& params, std::uint64_t seed);

nlohmann::json to_json(const Objective& o);
Objective objective_from_json(const nlohmann::json& j);

/// One JSON document per line.
std::string to_jsonl(const std::vector<Objective>& objectives);
std::vector<Objective> objectives_from_jsonl(const std::string& text);

} // namespace qnet
