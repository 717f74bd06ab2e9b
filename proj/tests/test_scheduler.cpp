#include <algorithm>
#include <random>
#include <tuple>

#include "doctest.h"
#include "qnet/error.h"
#include "qnet/scheduler.h"

using namespace qnet;

namespace {

SimTime sec(double s) { return SimTime::from_seconds(s); }

Objective objective(ObjectiveId id, NodeId i, NodeId j, double t_a, std::uint32_t p, double dt = 1.0)
{
    Objective o;
    o.id = id;
    o.source = i;
    o.destination = j;
    o.arrival = sec(t_a);
    o.end = sec(t_a + dt);
    o.priority = p;
    return o;
}

std::vector<Objective> random_objectives(const Topology& t, std::size_t n, std::uint64_t seed, double rate = 50.0)
{
    std::mt19937_64 rng(seed);
    const auto procs = t.processors();
    std::uniform_int_distribution<std::size_t> pick(0, procs.size() - 1);
    std::uniform_int_distribution<std::uint32_t> prio(0, 2);
    std::exponential_distribution<double> gap(rate);
    std::vector<Objective> out;
    double clock = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        clock += gap(rng);
        NodeId a = procs[pick(rng)], b = a;
        while (b == a)
            b = procs[pick(rng)];
        out.push_back(objective(k, a, b, clock, prio(rng)));
    }
    return out;
}

// Linear-scan oracle: free memories are exactly those with no interval overlapping [s, e).
std::vector<std::uint32_t> free_by_scan(const NodeTimecards& cards, SimTime s, SimTime e)
{
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 0; m < cards.size(); ++m) {
        bool ok = true;
        for (const auto& r : cards[m].reservations())
            if (r.start < e && s < r.end)
                ok = false;
        if (ok)
            out.push_back(m);
    }
    return out;
}

// Exhaustive O(n^2) overlap check over every memory's intervals. Rebuilt from
// the approved sagas, not from the timecards.
std::size_t overlap_violations(const Topology& t, const std::vector<Saga>& approved)
{
    std::map<std::pair<NodeId, std::uint32_t>, std::vector<std::pair<SimTime, SimTime>>> by_memory;
    for (const auto& s : approved)
        for (std::size_t n = 0; n < s.path.size(); ++n)
            for (auto m : s.assignments[n])
                by_memory[{s.path[n], m}].emplace_back(s.scheduled_start(), s.scheduled_end());
    std::size_t bad = 0;
    for (const auto& [key, iv] : by_memory) {
        CHECK(key.second < t.node(key.first).memory_count);
        for (std::size_t a = 0; a < iv.size(); ++a)
            for (std::size_t b = a + 1; b < iv.size(); ++b)
                if (iv[a].first < iv[b].second && iv[b].first < iv[a].second)
                    ++bad;
    }
    return bad;
}

} // namespace

TEST_CASE("timecard overlap uses half-open intervals")
{
    Timecard tc;
    tc.insert({sec(1), sec(2), 0});
    tc.insert({sec(4), sec(5), 1});
    CHECK(tc.is_free(sec(0), sec(1)));
    CHECK(tc.is_free(sec(2), sec(4)));
    CHECK(tc.is_free(sec(5), sec(9)));
    CHECK_FALSE(tc.is_free(sec(0.5), sec(1.5)));
    CHECK_FALSE(tc.is_free(sec(1.9), sec(4.1)));
    CHECK_FALSE(tc.is_free(sec(0), sec(10)));
    CHECK_FALSE(tc.is_free(sec(4.2), sec(4.3)));
    CHECK(tc.erase(0, sec(1)));
    CHECK_FALSE(tc.erase(0, sec(1)));
    CHECK(tc.is_free(sec(0.5), sec(1.5)));
}

TEST_CASE("try_reserve examples")
{
    NodeTimecards two(2);
    auto got = try_reserve(two, 1, sec(0), sec(1), 2);
    REQUIRE(got);
    CHECK(*got == std::vector<std::uint32_t>{0, 1});

    NodeTimecards one(1);
    one[0].insert({sec(0), sec(1), 9});
    CHECK_FALSE(try_reserve(one, 1, sec(0.5), sec(1.5), 1));
    CHECK(one[0].reservations().size() == 1); // nothing assigned on conflict

    NodeTimecards three(3);
    three[0].insert({sec(0), sec(1), 7});
    three[1].insert({sec(2), sec(3), 8});
    CHECK(free_by_scan(three, sec(0.5), sec(1.5)) == std::vector<std::uint32_t>{1, 2});
    got = try_reserve(three, 1, sec(0.5), sec(1.5), 2);
    REQUIRE(got);
    CHECK(*got == std::vector<std::uint32_t>{1, 2});

    CHECK_THROWS_AS(try_reserve(three, 2, sec(10), sec(11), 4), InfeasibleObjective);
}

TEST_CASE("try_reserve agrees with the linear-scan oracle")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> start(0.0, 20.0), len(0.1, 3.0);
    std::uniform_int_distribution<std::uint32_t> want(1, 3);
    NodeTimecards cards(5);
    for (ObjectiveId id = 0; id < 400; ++id) {
        const SimTime s = sec(start(rng));
        const SimTime e = s + sec(len(rng));
        const std::uint32_t k = want(rng);
        auto expected = free_by_scan(cards, s, e);
        auto got = try_reserve(cards, id, s, e, k);
        if (expected.size() < k) {
            CHECK_FALSE(got);
        } else {
            REQUIRE(got);
            expected.resize(k);
            CHECK(*got == expected);
        }
    }
}

TEST_CASE("backoff scales with priority")
{
    auto o = objective(0, 1, 2, 5.0, 0);
    CHECK(backoff(o).arrival == sec(6.0));
    CHECK(backoff(o).end == sec(7.0));
    o.priority = 2;
    CHECK(backoff(o).arrival == sec(8.0));
    o.priority = 1;
    CHECK(backoff(backoff(o)).arrival - o.arrival == sec(4.0));
    auto b = backoff(o);
    b.arrival = o.arrival;
    b.end = o.end;
    CHECK(b == o); // nothing else changes
}

TEST_CASE("identical objectives on a star: second is backed off")
{
    auto t = make_star(3);
    for (std::uint32_t p = 0; p < 3; ++p) {
        auto res = schedule_all({objective(0, 1, 2, 10.0, p), objective(1, 1, 2, 10.0, p)}, t);
        REQUIRE(res.approved.size() == 2);
        CHECK(res.approved[0].objective.id == 0);
        CHECK(res.approved[0].delay() == SimTime{});
        CHECK(res.approved[1].delay() == static_cast<std::int64_t>(p + 1) * sec(1.0));
        CHECK(res.conflicts.per_node[1] == 1); // source leaf is checked first
        CHECK(res.conflicts.rejection_events == 1);
    }
}

TEST_CASE("single objective on empty timecards")
{
    auto t = make_grid(3, 3);
    auto res = schedule_all({objective(0, 0, 8, 2.0, 1)}, t);
    REQUIRE(res.approved.size() == 1);
    const auto& s = res.approved[0];
    CHECK(s.delay() == SimTime{});
    CHECK(s.path == dijkstra_path(t, 0, 8));
    CHECK(s.assignments.front().size() == 1);
    CHECK(s.assignments.back().size() == 1);
    for (std::size_t n = 1; n + 1 < s.path.size(); ++n)
        CHECK(s.assignments[n].size() == 2);
}

TEST_CASE("schedules are conflict free")
{
    auto t = make_grid(3, 3);
    auto objs = random_objectives(t, 20, 99);
    auto res = schedule_all(objs, t);
    CHECK(res.approved.size() == 20);
    CHECK(overlap_violations(t, res.approved) == 0);

    for (const auto& topo : {make_star(6), make_bottleneck(3, 4), make_caveman(3, 4)}) {
        auto r = schedule_all(random_objectives(topo, 300, 4, 200.0), topo);
        CHECK(r.approved.size() == 300);
        CHECK(overlap_violations(topo, r.approved) == 0);
    }
}

TEST_CASE("scheduler invariants on a loaded star")
{
    auto t = make_star(8);
    auto objs = random_objectives(t, 500, 21, 100.0);
    auto res = schedule_all(objs, t);
    REQUIRE(res.approved.size() == objs.size());

    SUBCASE("first-attempt pops follow (p, t_a, id)")
    {
        std::map<ObjectiveId, const Objective*> by_id;
        for (const auto& o : objs)
            by_id[o.id] = &o;
        REQUIRE(res.first_attempt_order.size() == objs.size());
        for (std::size_t k = 1; k < res.first_attempt_order.size(); ++k) {
            const auto* a = by_id[res.first_attempt_order[k - 1]];
            const auto* b = by_id[res.first_attempt_order[k]];
            CHECK(std::make_tuple(a->priority, a->arrival, a->id) < std::make_tuple(b->priority, b->arrival, b->id));
        }
    }
    SUBCASE("delays are whole backoff steps")
    {
        for (const auto& s : res.approved) {
            const SimTime step = static_cast<std::int64_t>(s.objective.priority + 1) * sec(1.0);
            CHECK(s.delay() >= SimTime{});
            CHECK(s.delay().ps() % step.ps() == 0);
            CHECK(s.delay().ps() / step.ps() == static_cast<std::int64_t>(s.backoffs));
            CHECK(s.objective.duration() == sec(1.0));
        }
    }
    SUBCASE("conflict accounting")
    {
        std::uint64_t sum = 0;
        std::uint64_t backoffs = 0;
        for (auto c : res.conflicts.per_node)
            sum += c;
        for (const auto& s : res.approved)
            backoffs += s.backoffs;
        CHECK(sum == res.conflicts.rejection_events);
        CHECK(backoffs == res.conflicts.rejection_events);
        CHECK(res.conflicts.total_reservations == objs.size());
        for (std::size_t v = 0; v < t.size(); ++v)
            CHECK(res.conflicts.per_node_reservations[v] <= res.conflicts.total_reservations);
    }
    SUBCASE("replay is identical")
    {
        auto again = schedule_all(objs, t);
        REQUIRE(again.approved.size() == res.approved.size());
        for (std::size_t k = 0; k < res.approved.size(); ++k) {
            CHECK(again.approved[k].objective == res.approved[k].objective);
            CHECK(again.approved[k].assignments == res.approved[k].assignments);
        }
        CHECK(sagas_to_jsonl(again.approved) == sagas_to_jsonl(res.approved));
    }
}

TEST_CASE("priority dominance for identical requests")
{
    // Three probes with the same endpoints and start, one per priority,
    // inside random background load. Mean delay must not decrease with p.
    auto t = make_star(10);
    std::array<double, 3> total{};
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        auto objs = random_objectives(t, 200, 1000 + trial, 100.0);
        const double t0 = objs[100].arrival.seconds();
        for (std::uint32_t p = 0; p < 3; ++p)
            objs.push_back(objective(1000 + p, 1, 2, t0, p));
        auto res = schedule_all(objs, t);
        for (const auto& s : res.approved)
            if (s.objective.id >= 1000)
                total[s.objective.id - 1000] += s.delay().seconds();
    }
    CHECK(total[0] <= total[1]);
    CHECK(total[1] <= total[2]);
}

TEST_CASE("infeasible and invalid objectives")
{
    auto t = make_star(3);
    auto o = objective(0, 1, 2, 0.0, 0);
    o.memories = 2; // leaves only have one memory
    CHECK_THROWS_AS(schedule_all({o}, t), InfeasibleObjective);
    CHECK_THROWS_AS(schedule_all({objective(0, 0, 2, 0.0, 0)}, t), InvalidParameter); // router endpoint
    CHECK_THROWS_AS(schedule_all({objective(0, 2, 2, 0.0, 0)}, t), InvalidParameter);
}

TEST_CASE("emit_sagas notification timing")
{
    auto t = make_star(3);
    auto res = schedule_all({objective(0, 1, 2, 10.0, 0)}, t);
    auto notes = emit_sagas(res.approved, sec(1e-3), sec(50e-3));
    REQUIRE(notes.size() == 3);
    for (const auto& n : notes) {
        CHECK(n.sent_at == sec(9.950));
        CHECK(n.arrives_at == sec(9.951));
    }
    CHECK(notes[0].node == 1);
    CHECK(notes[1].node == 0);
    CHECK(notes[2].node == 2);
    CHECK_THROWS_AS(emit_sagas(res.approved, sec(0.1), sec(0.05)), ConfigError);
}

TEST_CASE("saga and conflict exports")
{
    auto t = make_star(3);
    auto res = schedule_all({objective(0, 1, 2, 1.0, 0), objective(1, 1, 3, 1.0, 1)}, t);
    const auto lines = sagas_to_jsonl(res.approved);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
    auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
    CHECK(first.at("path") == nlohmann::json::array({1, 0, 2}));
    CHECK(first.at("delay_s") == 0.0);

    const auto csv = conflicts_to_csv(res.conflicts);
    CHECK(csv.rfind("node_id,conflict_count,normalized_share", 0) == 0);
    CHECK(csv.find("\n1,1,0.5,1,1\n") != std::string::npos);
}
