#include "qnet/scheduler.h"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <tuple>

#include "qnet/error.h"

namespace qnet {

bool Timecard::is_free(SimTime start, SimTime end) const
{
    // First reservation starting at or after `end` can't overlap; because the
    // list is disjoint, only its predecessor might still run past `start`.
    auto it = std::lower_bound(reservations_.begin(), reservations_.end(), end,
                               [](const Reservation& r, SimTime t) { return r.start < t; });
    if (it == reservations_.begin())
        return true;
    return std::prev(it)->end <= start;
}

void Timecard::insert(const Reservation& r)
{
    auto it = std::lower_bound(reservations_.begin(), reservations_.end(), r.start,
                               [](const Reservation& a, SimTime t) { return a.start < t; });
    reservations_.insert(it, r);
}

bool Timecard::erase(ObjectiveId objective, SimTime start)
{
    auto it = std::lower_bound(reservations_.begin(), reservations_.end(), start,
                               [](const Reservation& a, SimTime t) { return a.start < t; });
    for (; it != reservations_.end() && it->start == start; ++it) {
        if (it->objective == objective) {
            reservations_.erase(it);
            return true;
        }
    }
    return false;
}

std::optional<std::vector<std::uint32_t>> try_reserve(NodeTimecards& cards, ObjectiveId objective, SimTime start,
                                                      SimTime end, std::uint32_t count)
{
    if (count > cards.size())
        throw InfeasibleObjective("objective " + std::to_string(objective) + " needs " + std::to_string(count) +
                                  " memories on a node that has " + std::to_string(cards.size()));
    std::vector<std::uint32_t> picked;
    picked.reserve(count);
    for (std::uint32_t m = 0; m < cards.size() && picked.size() < count; ++m)
        if (cards[m].is_free(start, end))
            picked.push_back(m);
    if (picked.size() < count)
        return std::nullopt;
    for (auto m : picked)
        cards[m].insert({start, end, objective});
    return picked;
}

Objective backoff(const Objective& o)
{
    Objective out = o;
    const SimTime step = static_cast<std::int64_t>(o.priority + 1) * o.duration();
    out.arrival += step;
    out.end += step;
    return out;
}

Scheduler::Scheduler(const Topology& topo) : topo_(topo)
{
    cards_.reserve(topo.size());
    for (const auto& n : topo.nodes())
        cards_.emplace_back(n.memory_count);
}

const std::vector<NodeId>& Scheduler::path(NodeId from, NodeId to)
{
    auto key = std::make_pair(from, to);
    auto it = path_cache_.find(key);
    if (it == path_cache_.end())
        it = path_cache_.emplace(key, dijkstra_path(topo_, from, to)).first;
    return it->second;
}

namespace {

struct Pending {
    Objective objective;
    SimTime requested_start;
    std::uint64_t backoffs = 0;
    std::vector<NodeId> charged; // nodes already charged for this objective

    auto key() const { return std::make_tuple(objective.priority, objective.arrival, objective.id); }
};

struct HeapOrder {
    bool operator()(const Pending& a, const Pending& b) const { return a.key() > b.key(); }
};

} // namespace

ScheduleResult Scheduler::schedule_all(const std::vector<Objective>& objectives)
{
    ScheduleResult result;
    result.conflicts.per_node.assign(topo_.size(), 0);
    result.conflicts.per_node_reservations.assign(topo_.size(), 0);

    std::vector<Pending> initial;
    initial.reserve(objectives.size());
    for (const auto& o : objectives) {
        if (o.source >= topo_.size() || o.destination >= topo_.size() || o.source == o.destination)
            throw InvalidParameter("objective " + std::to_string(o.id) + " has invalid endpoints");
        if (topo_.node(o.source).kind != NodeKind::Processor || topo_.node(o.destination).kind != NodeKind::Processor)
            throw InvalidParameter("objective " + std::to_string(o.id) + " targets a router node");
        if (o.end <= o.arrival)
            throw InvalidParameter("objective " + std::to_string(o.id) + " has an empty window");
        initial.push_back({o, o.arrival, 0, {}});
    }
    std::priority_queue<Pending, std::vector<Pending>, HeapOrder> heap(HeapOrder{}, std::move(initial));

    while (!heap.empty()) {
        Pending r = heap.top();
        heap.pop();
        if (r.backoffs == 0)
            result.first_attempt_order.push_back(r.objective.id);

        const auto& route = path(r.objective.source, r.objective.destination);
        std::vector<std::vector<std::uint32_t>> assigned;
        assigned.reserve(route.size());
        bool rejected = false;
        for (std::size_t n = 0; n < route.size(); ++n) {
            const NodeId v = route[n];
            const bool endpoint = n == 0 || n + 1 == route.size();
            const std::uint32_t need = endpoint ? r.objective.memories : 2 * r.objective.memories;
            auto got = try_reserve(cards_[v], r.objective.id, r.objective.arrival, r.objective.end, need);
            if (!got) {
                ++result.conflicts.per_node[v];
                ++result.conflicts.rejection_events;
                if (std::find(r.charged.begin(), r.charged.end(), v) == r.charged.end()) {
                    r.charged.push_back(v);
                    ++result.conflicts.per_node_reservations[v];
                }
                for (std::size_t u = 0; u < assigned.size(); ++u)
                    for (auto m : assigned[u])
                        cards_[route[u]][m].erase(r.objective.id, r.objective.arrival);
                rejected = true;
                break;
            }
            assigned.push_back(std::move(*got));
        }
        if (rejected) {
            r.objective = backoff(r.objective);
            ++r.backoffs;
            heap.push(std::move(r));
            continue;
        }
        ++result.conflicts.total_reservations;
        result.approved.push_back({r.objective, route, std::move(assigned), r.requested_start, r.backoffs});
    }
    return result;
}

ScheduleResult schedule_all(const std::vector<Objective>& objectives, const Topology& topo)
{
    Scheduler s(topo);
    return s.schedule_all(objectives);
}

std::vector<Notification> emit_sagas(const std::vector<Saga>& approved, SimTime classical_delay, SimTime buffer)
{
    if (buffer < classical_delay)
        throw ConfigError("notify buffer must not be shorter than the classical delay");
    std::vector<Notification> out;
    for (std::size_t s = 0; s < approved.size(); ++s) {
        const SimTime sent = approved[s].scheduled_start() - buffer;
        for (NodeId v : approved[s].path)
            out.push_back({v, s, sent, sent + classical_delay});
    }
    return out;
}

nlohmann::json to_json(const Saga& s)
{
    return {{"id", s.objective.id},
            {"i", s.objective.source},
            {"j", s.objective.destination},
            {"p", s.objective.priority},
            {"path", s.path},
            {"assignments", s.assignments},
            {"requested_start_s", s.requested_start.seconds()},
            {"scheduled_start_s", s.scheduled_start().seconds()},
            {"scheduled_end_s", s.scheduled_end().seconds()},
            {"delay_s", s.delay().seconds()},
            {"backoffs", s.backoffs}};
}

std::string sagas_to_jsonl(const std::vector<Saga>& sagas)
{
    std::string out;
    for (const auto& s : sagas) {
        out += to_json(s).dump();
        out += '\n';
    }
    return out;
}

std::string conflicts_to_csv(const ConflictLog& log)
{
    std::string out = "node_id,conflict_count,normalized_share,conflicted_reservations,max_normalized\n";
    const std::uint64_t peak = log.per_node.empty() ? 0 : *std::max_element(log.per_node.begin(), log.per_node.end());
    char buf[160];
    for (std::size_t v = 0; v < log.per_node.size(); ++v) {
        const auto reservations = log.per_node_reservations.at(v);
        const double share = log.total_reservations
                                 ? static_cast<double>(reservations) / static_cast<double>(log.total_reservations)
                                 : 0.0;
        const double vs_peak = peak ? static_cast<double>(log.per_node[v]) / static_cast<double>(peak) : 0.0;
        std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%llu,%.17g\n", v,
                      static_cast<unsigned long long>(log.per_node[v]), share,
                      static_cast<unsigned long long>(reservations), vs_peak);
        out += buf;
    }
    return out;
}

} // namespace qnet
