#include "qnet/sim_kernel.h"

#include <cstdio>
#include <random>
#include <stdexcept>

#include "qnet/rng.h"

namespace qnet {

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::GenerationAttempt: return "generation_attempt";
    case EventKind::GenerationHerald: return "generation_herald";
    case EventKind::SwapComplete: return "swap_complete";
    case EventKind::SagaStart: return "saga_start";
    case EventKind::SagaEnd: return "saga_end";
    case EventKind::Notify: return "notify";
    }
    return "?";
}

void EventQueue::push(Event e)
{
    e.seq = next_seq_++;
    heap_.push(e);
}

Event EventQueue::pop()
{
    Event e = heap_.top();
    heap_.pop();
    return e;
}

WernerFidelity WernerPair::fidelity_at(SimTime now, double coherence_time_s) const
{
    return decay_fidelity(fidelity_at_creation, (now - created_at).seconds(), coherence_time_s);
}

std::optional<SimTime> SagaOutcome::completion_time() const
{
    if (!last_delivery)
        return std::nullopt;
    return *last_delivery - scheduled_start;
}

std::optional<SimTime> SagaOutcome::time_to_serve() const
{
    if (!last_delivery)
        return std::nullopt;
    return *last_delivery - requested_start;
}

namespace {

constexpr std::int32_t kNone = -1;

// Generation and swap state of one lane (one memory per side per hop).
struct Lane {
    std::vector<bool> generating;          // per link
    std::vector<std::int32_t> left_held;   // per path index: pair in the memory facing the previous hop
    std::vector<std::int32_t> right_held;  // per path index: pair in the memory facing the next hop
    std::vector<bool> swap_pending;        // per path index
};

struct SagaState {
    const Saga* saga = nullptr;
    Rng rng;
    std::geometric_distribution<std::int64_t> failures;
    bool usable_links = true;
    bool open = false;
    std::uint32_t notified = 0;
    std::vector<Lane> lanes;
    std::vector<WernerPair> pairs; // arena; indices held in Lane
    SagaOutcome outcome;
};

class Kernel {
public:
    Kernel(const std::vector<Saga>& approved, const Topology& topo, const NoiseParams& noise, std::uint64_t seed,
           const KernelOptions& options)
        : topo_(topo), noise_(noise), options_(options)
    {
        noise_.validate();
        if (options_.classical_delay < SimTime{} || options_.notify_buffer < options_.classical_delay)
            throw std::invalid_argument("kernel: notify buffer must be >= classical delay >= 0");

        const double p = options_.success_probability.value_or(link_success_probability(noise_, topo.link_length_km()));
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("kernel: success probability must be in [0, 1]");
        period_ = attempt_period_time(noise_, topo.link_length_km());
        herald_latency_ = SimTime::from_seconds(topo.link_length_km() / noise_.light_speed_km_per_s);

        states_.resize(approved.size());
        for (std::size_t s = 0; s < approved.size(); ++s) {
            auto& st = states_[s];
            st.saga = &approved[s];
            st.rng = Rng(derive_seed(seed, approved[s].objective.id));
            st.usable_links = p > 0.0;
            if (st.usable_links)
                st.failures = std::geometric_distribution<std::int64_t>(p);
            st.outcome.saga_id = approved[s].objective.id;
            st.outcome.requested = approved[s].objective.pair_count;
            st.outcome.scheduled_start = approved[s].scheduled_start();
            st.outcome.requested_start = approved[s].requested_start;
        }

        // SagaEnd events go in first so that a window closing at t is torn
        // down before a back-to-back window on the same memory opens at t.
        for (std::uint32_t s = 0; s < approved.size(); ++s)
            queue_.push({approved[s].scheduled_end(), 0, EventKind::SagaEnd, s});
        for (const auto& n : emit_sagas(approved, options_.classical_delay, options_.notify_buffer))
            queue_.push({n.arrives_at, 0, EventKind::Notify, static_cast<std::uint32_t>(n.saga), 0,
                         static_cast<std::uint32_t>(n.node)});
        for (std::uint32_t s = 0; s < approved.size(); ++s)
            queue_.push({approved[s].scheduled_start(), 0, EventKind::SagaStart, s});

        owner_.resize(topo.size());
        for (const auto& n : topo.nodes())
            owner_[n.id].assign(n.memory_count, kNone);
    }

    SimulationResult run()
    {
        while (!queue_.empty()) {
            const Event e = queue_.pop();
            auto& st = states_[e.saga];
            switch (e.kind) {
            case EventKind::Notify:
                ++st.notified;
                break;
            case EventKind::SagaStart:
                start(e, st);
                break;
            case EventKind::SagaEnd:
                finish(e, st);
                break;
            case EventKind::GenerationAttempt:
                if (live(e, st))
                    attempt(e, st);
                break;
            case EventKind::GenerationHerald:
                if (live(e, st))
                    herald(e, st);
                break;
            case EventKind::SwapComplete:
                if (live(e, st))
                    swap(e, st);
                break;
            }
        }
        for (auto& st : states_)
            result_.sagas.push_back(st.outcome);
        return std::move(result_);
    }

private:
    bool live(const Event& e, const SagaState& st) const { return st.open && e.time < st.saga->scheduled_end(); }

    void trace(const Event& e, SimTime left = {}, SimTime right = {})
    {
        if (options_.record_trace)
            result_.trace.push_back({e.time, e.kind, e.saga, e.lane, e.position, left, right});
    }

    std::uint32_t memory_of(const Saga& saga, std::uint32_t pos, std::uint32_t lane, bool facing_next) const
    {
        const auto& mems = saga.assignments[pos];
        const bool intermediate = pos != 0 && pos + 1 != saga.path.size();
        return intermediate && facing_next ? mems[saga.objective.memories + lane] : mems[lane];
    }

    void start(const Event& e, SagaState& st)
    {
        const Saga& saga = *st.saga;
        if (st.notified != saga.path.size())
            throw std::logic_error("saga " + std::to_string(saga.objective.id) + " started before all nodes were notified");
        for (std::size_t pos = 0; pos < saga.path.size(); ++pos) {
            for (auto m : saga.assignments[pos]) {
                auto& slot = owner_[saga.path[pos]].at(m);
                if (slot != kNone)
                    throw std::logic_error("memory double-booked at node " + std::to_string(saga.path[pos]));
                slot = static_cast<std::int32_t>(e.saga);
            }
        }
        st.open = true;
        trace(e);
        const std::size_t nodes = saga.path.size();
        st.lanes.assign(saga.objective.memories,
                        Lane{std::vector<bool>(nodes - 1, false), std::vector<std::int32_t>(nodes, kNone),
                             std::vector<std::int32_t>(nodes, kNone), std::vector<bool>(nodes, false)});
        for (std::uint32_t lane = 0; lane < st.lanes.size(); ++lane)
            for (std::uint32_t link = 0; link + 1 < nodes; ++link)
                begin_generation(e.time, e.saga, st, lane, link);
    }

    void finish(const Event& e, SagaState& st)
    {
        const Saga& saga = *st.saga;
        if (st.open) {
            for (std::size_t pos = 0; pos < saga.path.size(); ++pos)
                for (auto m : saga.assignments[pos])
                    owner_[saga.path[pos]].at(m) = kNone;
        }
        st.open = false;
        trace(e);
    }

    // Queue the next attempt run on `link` at the first attempt boundary >= now.
    void begin_generation(SimTime now, std::uint32_t saga_index, SagaState& st, std::uint32_t lane, std::uint32_t link)
    {
        auto& l = st.lanes[lane];
        if (l.generating[link] || l.right_held[link] != kNone || l.left_held[link + 1] != kNone)
            return;
        if (st.outcome.delivered >= st.outcome.requested || !st.usable_links)
            return;
        l.generating[link] = true;
        const SimTime origin = st.saga->scheduled_start();
        const std::int64_t elapsed = (now - origin).ps();
        const std::int64_t periods = (elapsed + period_.ps() - 1) / period_.ps();
        queue_.push({origin + periods * period_, 0, EventKind::GenerationAttempt, saga_index, lane, link});
    }

    void attempt(const Event& e, SagaState& st)
    {
        trace(e);
        const std::int64_t failures = st.failures(st.rng);
        Event h{e.time + failures * period_ + herald_latency_, 0, EventKind::GenerationHerald, e.saga, e.lane,
                e.position, static_cast<std::uint64_t>(failures + 1)};
        queue_.push(h);
    }

    void herald(const Event& e, SagaState& st)
    {
        trace(e);
        ++result_.heralds;
        auto& l = st.lanes[e.lane];
        const std::uint32_t link = e.position;
        l.generating[link] = false;
        const auto id = static_cast<std::int32_t>(st.pairs.size());
        st.pairs.push_back({noise_.initial_fidelity, e.time, link, link + 1, e.saga, e.attempts});
        l.right_held[link] = id;
        l.left_held[link + 1] = id;
        settle(e, st, id);
    }

    void swap(const Event& e, SagaState& st)
    {
        auto& l = st.lanes[e.lane];
        const std::uint32_t pos = e.position;
        const std::int32_t li = l.left_held[pos];
        const std::int32_t ri = l.right_held[pos];
        if (li == kNone || ri == kNone)
            throw std::logic_error("swap fired without pairs on both sides");
        const WernerPair left = st.pairs[li];
        const WernerPair right = st.pairs[ri];
        trace(e, left.created_at, right.created_at);
        ++result_.swaps;

        const double tau = noise_.coherence_time_s;
        const WernerFidelity f = swap_fidelity(left.fidelity_at(e.time, tau), right.fidelity_at(e.time, tau), noise_);
        const auto id = static_cast<std::int32_t>(st.pairs.size());
        st.pairs.push_back({f, e.time, left.left, right.right, e.saga, left.attempts + right.attempts});
        l.left_held[pos] = kNone;
        l.right_held[pos] = kNone;
        l.swap_pending[pos] = false;
        l.right_held[left.left] = id;
        l.left_held[right.right] = id;

        begin_generation(e.time, e.saga, st, e.lane, pos - 1);
        begin_generation(e.time, e.saga, st, e.lane, pos);
        settle(e, st, id);
    }

    // After pair `id` appears: deliver it if it spans the path, else arm any
    // swap it completes, left end first.
    void settle(const Event& e, SagaState& st, std::int32_t id)
    {
        auto& l = st.lanes[e.lane];
        const WernerPair pair = st.pairs[id];
        const Saga& saga = *st.saga;
        const auto last = static_cast<std::uint32_t>(saga.path.size() - 1);
        if (pair.left == 0 && pair.right == last) {
            deliver(e, st, pair);
            l.right_held[0] = kNone;
            l.left_held[last] = kNone;
            begin_generation(e.time, e.saga, st, e.lane, 0);
            begin_generation(e.time, e.saga, st, e.lane, last - 1);
            return;
        }
        for (std::uint32_t pos : {pair.left, pair.right}) {
            if (pos == 0 || pos == last || l.swap_pending[pos])
                continue;
            if (l.left_held[pos] != kNone && l.right_held[pos] != kNone) {
                l.swap_pending[pos] = true;
                queue_.push({e.time + options_.classical_delay, 0, EventKind::SwapComplete, e.saga, e.lane, pos});
            }
        }
    }

    void deliver(const Event& e, SagaState& st, const WernerPair& pair)
    {
        const Saga& saga = *st.saga;
        auto& out = st.outcome;
        if (out.delivered >= out.requested)
            return;
        DeliveryRecord r;
        r.saga_id = saga.objective.id;
        r.pair_seq = out.delivered;
        r.delivered_at = e.time;
        r.fidelity = pair.fidelity_at(e.time, noise_.coherence_time_s);
        r.hops = static_cast<std::uint32_t>(saga.hops());
        r.priority = saga.objective.priority;
        r.time_to_serve = e.time - saga.requested_start;
        r.attempts = pair.attempts;
        r.below_target = r.fidelity < saga.objective.target_fidelity;
        result_.deliveries.push_back(r);
        ++out.delivered;
        out.attempts += pair.attempts;
        out.last_delivery = e.time;
    }

    const Topology& topo_;
    NoiseParams noise_;
    KernelOptions options_;
    SimTime period_;
    SimTime herald_latency_;
    EventQueue queue_;
    std::vector<SagaState> states_;
    std::vector<std::vector<std::int32_t>> owner_; // node -> memory -> open saga
    SimulationResult result_;
};

} // namespace

SimulationResult run_simulation(const std::vector<Saga>& approved, const Topology& topo, const NoiseParams& noise,
                                std::uint64_t seed, const KernelOptions& options)
{
    return Kernel(approved, topo, noise, seed, options).run();
}

std::string deliveries_to_csv(const std::vector<DeliveryRecord>& records)
{
    std::string out = "saga_id,pair_seq,delivered_at_s,fidelity,hops,priority,time_to_serve_s,attempts,below_target\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%llu,%u,%.12f,%.17g,%u,%u,%.12f,%llu,%d\n",
                      static_cast<unsigned long long>(r.saga_id), r.pair_seq, r.delivered_at.seconds(),
                      r.fidelity.value(), r.hops, r.priority, r.time_to_serve.seconds(),
                      static_cast<unsigned long long>(r.attempts), r.below_target ? 1 : 0);
        out += buf;
    }
    return out;
}

} // namespace qnet
