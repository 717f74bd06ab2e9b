#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "qnet/physics.h"
#include "qnet/scheduler.h"
#include "qnet/sim_time.h"
#include "qnet/topology.h"

namespace qnet {

enum class EventKind : std::uint8_t { GenerationAttempt, GenerationHerald, SwapComplete, SagaStart, SagaEnd, Notify };

const char* to_string(EventKind kind);

struct Event {
    SimTime time;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Notify;
    std::uint32_t saga = 0;
    std::uint32_t lane = 0;
    std::uint32_t position = 0; // link index for generation, path index for swaps, path node for Notify
    std::uint64_t attempts = 0; // GenerationHerald only
};

/// Time-ordered event heap; equal times pop in insertion order.
class EventQueue {
public:
    void push(Event e);
    Event pop();
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

/// An entangled pair between two path positions of one saga lane. The
/// current fidelity is always derived from creation time, never stored.
struct WernerPair {
    WernerFidelity fidelity_at_creation{1.0};
    SimTime created_at;
    std::uint32_t left = 0;  // path index
    std::uint32_t right = 0; // path index
    std::uint32_t saga = 0;
    std::uint64_t attempts = 0; // generation attempts spent on every constituent link

    WernerFidelity fidelity_at(SimTime now, double coherence_time_s) const;
};

struct DeliveryRecord {
    ObjectiveId saga_id = 0;
    std::uint32_t pair_seq = 0;
    SimTime delivered_at;
    WernerFidelity fidelity{1.0};
    std::uint32_t hops = 0;
    std::uint32_t priority = 0;
    SimTime time_to_serve; // delivered_at - requested start
    std::uint64_t attempts = 0;
    bool below_target = false;
};

struct SagaOutcome {
    ObjectiveId saga_id = 0;
    std::uint32_t delivered = 0;
    std::uint32_t requested = 0;
    std::uint64_t attempts = 0;
    std::optional<SimTime> last_delivery;
    SimTime scheduled_start;
    SimTime requested_start;

    /// last delivery - scheduled start
    std::optional<SimTime> completion_time() const;
    /// last delivery - requested start
    std::optional<SimTime> time_to_serve() const;
};

struct TraceEntry {
    SimTime time;
    EventKind kind = EventKind::Notify;
    std::uint32_t saga = 0;
    std::uint32_t lane = 0;
    std::uint32_t position = 0;
    SimTime left_created;  // SwapComplete: creation time of each consumed pair
    SimTime right_created;
};

struct KernelOptions {
    SimTime classical_delay = SimTime::from_seconds(1e-3);
    SimTime notify_buffer = SimTime::from_seconds(50e-3);
    std::optional<double> success_probability; // overrides the fiber model when set
    bool record_trace = false;
};

struct SimulationResult {
    std::vector<DeliveryRecord> deliveries; // in delivery order
    std::vector<SagaOutcome> sagas;         // parallel to the approved list
    std::vector<TraceEntry> trace;
    std::uint64_t heralds = 0;
    std::uint64_t swaps = 0;
};

/// Executes approved sagas on one event loop.
///
/// Within its window every lane of a saga (one per reserved memory set) runs
/// heralded generation on each link; a pair is recorded with the initial
/// fidelity at herald time. An intermediate node holding pairs on both sides
/// schedules a swap one classical delay later, composing the two
/// decay-adjusted fidelities. Swaps are eager; nodes that become ready at
/// the same instant are scheduled left to right. A pair spanning the whole
/// path is delivered and its memories go back to generation at the next
/// attempt boundary. Each saga draws from its own seeded stream.
SimulationResult run_simulation(const std::vector<Saga>& approved, const Topology& topo, const NoiseParams& noise,
                                std::uint64_t seed, const KernelOptions& options = {});

/// saga_id,pair_seq,delivered_at_s,fidelity,hops,priority,time_to_serve_s,attempts,below_target
std::string deliveries_to_csv(const std::vector<DeliveryRecord>& records);

} // namespace qnet
