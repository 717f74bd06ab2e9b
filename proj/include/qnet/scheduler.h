#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnet/sim_time.h"
#include "qnet/topology.h"
#include "qnet/traffic.h"

namespace qnet {

struct Reservation {
    SimTime start;
    SimTime end; // exclusive
    ObjectiveId objective = 0;

    bool operator==(const Reservation&) const = default;
};

/// Reservations held by one quantum memory, sorted by start and pairwise
/// disjoint as half-open intervals.
class Timecard {
public:
    /// True if [start, end) overlaps no existing reservation. O(log n).
    bool is_free(SimTime start, SimTime end) const;

    /// Precondition: is_free(r.start, r.end).
    void insert(const Reservation& r);

    /// Removes the reservation of `objective` starting at `start`; returns false if absent.
    bool erase(ObjectiveId objective, SimTime start);

    const std::vector<Reservation>& reservations() const { return reservations_; }

private:
    std::vector<Reservation> reservations_;
};

/// The timecards of every memory on one node.
using NodeTimecards = std::vector<Timecard>;

/// Assigns the `count` lowest-indexed memories free over [start, end) and
/// returns their indices, or nullopt (assigning nothing) when fewer are free.
/// Throws InfeasibleObjective if `count` exceeds the node's memory count.
std::optional<std::vector<std::uint32_t>> try_reserve(NodeTimecards& cards, ObjectiveId objective, SimTime start,
                                                      SimTime end, std::uint32_t count);

/// Shifts the objective window by (priority + 1) * duration.
Objective backoff(const Objective& o);

/// An approved reservation. `objective` carries the scheduled window;
/// `requested_start` is the original arrival time.
///
/// `assignments[n]` lists the memories reserved on `path[n]`. Endpoints hold
/// k memories. Intermediate nodes hold 2k: the first k face the previous hop,
/// the last k face the next hop.
struct Saga {
    Objective objective;
    std::vector<NodeId> path;
    std::vector<std::vector<std::uint32_t>> assignments;
    SimTime requested_start;
    std::uint64_t backoffs = 0;

    SimTime scheduled_start() const { return objective.arrival; }
    SimTime scheduled_end() const { return objective.end; }
    SimTime delay() const { return objective.arrival - requested_start; }
    std::size_t hops() const { return path.size() - 1; }
};

/// Conflict attribution, indexed by node id.
///
/// `per_node` counts rejection events charged to the node (an objective
/// rejected five times at the same node counts five). `per_node_reservations`
/// counts distinct objectives the node caused at least one conflict for, so
/// `per_node_reservations / total_reservations` is a proportion in [0, 1].
struct ConflictLog {
    std::vector<std::uint64_t> per_node;
    std::vector<std::uint64_t> per_node_reservations;
    std::uint64_t total_reservations = 0; // objectives processed
    std::uint64_t rejection_events = 0;
};

struct ScheduleResult {
    std::vector<Saga> approved; // in approval order
    ConflictLog conflicts;
    std::vector<ObjectiveId> first_attempt_order; // ids in the order they were first popped
};

/// Centralized offline scheduling over a (priority, arrival, id) min-heap.
///
/// Each pop reserves k memories at the endpoints and 2k at intermediate
/// nodes along the Dijkstra path. The first node that cannot satisfy its
/// share is charged a conflict, every partial assignment is rolled back and
/// the objective is re-pushed after `backoff`.
class Scheduler {
public:
    explicit Scheduler(const Topology& topo);

    ScheduleResult schedule_all(const std::vector<Objective>& objectives);

    const Topology& topology() const { return topo_; }
    const std::vector<NodeTimecards>& timecards() const { return cards_; }

private:
    const std::vector<NodeId>& path(NodeId from, NodeId to);

    const Topology& topo_;
    std::vector<NodeTimecards> cards_;
    std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> path_cache_;
};

/// Convenience wrapper on fresh timecards.
ScheduleResult schedule_all(const std::vector<Objective>& objectives, const Topology& topo);

struct Notification {
    NodeId node = 0;
    std::size_t saga = 0; // index into the approved list
    SimTime sent_at;
    SimTime arrives_at;
};

/// One notification per path node per saga, sent `buffer` before the
/// scheduled start and arriving `classical_delay` later.
/// Throws ConfigError if buffer < classical_delay.
std::vector<Notification> emit_sagas(const std::vector<Saga>& approved, SimTime classical_delay, SimTime buffer);

nlohmann::json to_json(const Saga& s);
std::string sagas_to_jsonl(const std::vector<Saga>& sagas);

/// node_id,conflict_count,normalized_share,conflicted_reservations,max_normalized
///
/// normalized_share = conflicted_reservations / total_reservations;
/// max_normalized = conflict_count / max over nodes of conflict_count.
std::string conflicts_to_csv(const ConflictLog& log);

} // namespace qnet
