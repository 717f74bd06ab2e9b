#include "qnet/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qnet/error.h"

namespace qnet {

namespace {

std::string fmt(const char* pattern, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

} // namespace

std::vector<CdfPoint> delay_cdf(std::span<const double> samples, std::span<const double> grid)
{
    if (samples.empty())
        throw InvalidParameter("delay_cdf: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<CdfPoint> out;
    out.reserve(grid.size());
    for (double x : grid) {
        auto below = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        out.push_back({x, static_cast<double>(below) / static_cast<double>(sorted.size())});
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0.0) || !(hi >= lo) || points < 2)
        throw InvalidParameter("log_grid: need 0 < lo <= hi and at least two points");
    std::vector<double> out(points);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_delay_grid(std::span<const double> samples)
{
    constexpr double kFloor = 1e-3;
    double hi = kFloor;
    for (double s : samples)
        hi = std::max(hi, s);
    return log_grid(kFloor, hi, 200);
}

double max_cdf_gap(std::span<const double> a, std::span<const double> b, std::span<const double> grid)
{
    const auto ca = delay_cdf(a, grid);
    const auto cb = delay_cdf(b, grid);
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        gap = std::max(gap, std::abs(ca[i].cdf - cb[i].cdf));
    return gap;
}

double median(std::vector<double> samples)
{
    if (samples.empty())
        throw InvalidParameter("median: no samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

double Histogram::standard_error() const
{
    return total > 1 ? std::sqrt(variance() / static_cast<double>(total)) : 0.0;
}

void Histogram::add(double x)
{
    const auto bins = counts.size();
    auto bin = static_cast<std::ptrdiff_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++counts[static_cast<std::size_t>(bin)];
    ++total;
    const double delta = x - mean;
    mean += delta / static_cast<double>(total);
    m2 += delta * (x - mean);
}

Histogram make_histogram(std::size_t bins, double lo, double hi)
{
    if (bins < 1 || !(hi > lo))
        throw InvalidParameter("histogram: need at least one bin over a non-empty range");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    return h;
}

std::map<std::uint32_t, Histogram> fidelity_histogram(const std::vector<DeliveryRecord>& records, SplitBy split,
                                                      std::size_t bins)
{
    if (records.empty())
        throw InvalidParameter("fidelity_histogram: no records");
    std::map<std::uint32_t, Histogram> out;
    for (const auto& r : records) {
        const std::uint32_t key = split == SplitBy::Hops ? r.hops : r.priority;
        auto it = out.find(key);
        if (it == out.end())
            it = out.emplace(key, make_histogram(bins)).first;
        it->second.add(r.fidelity.value());
    }
    return out;
}

std::vector<CongestionShare> congestion_map(const ConflictLog& log)
{
    if (log.total_reservations == 0)
        throw InvalidParameter("congestion_map: no reservations");
    const std::uint64_t peak = log.per_node.empty() ? 0 : *std::max_element(log.per_node.begin(), log.per_node.end());
    std::vector<CongestionShare> out;
    out.reserve(log.per_node.size());
    for (std::size_t v = 0; v < log.per_node.size(); ++v) {
        CongestionShare c;
        c.node = static_cast<NodeId>(v);
        c.conflicts = log.per_node[v];
        c.reservations = log.per_node_reservations.at(v);
        c.share = static_cast<double>(c.reservations) / static_cast<double>(log.total_reservations);
        c.max_normalized = peak ? static_cast<double>(c.conflicts) / static_cast<double>(peak) : 0.0;
        out.push_back(c);
    }
    return out;
}

std::vector<NodeId> rank_by_congestion(const std::vector<CongestionShare>& shares)
{
    std::vector<CongestionShare> sorted = shares;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.share != b.share)
            return a.share > b.share;
        if (a.conflicts != b.conflicts)
            return a.conflicts > b.conflicts;
        return a.node < b.node;
    });
    std::vector<NodeId> out;
    for (const auto& c : sorted)
        out.push_back(c.node);
    return out;
}

std::vector<double> RunSummary::all_delays() const
{
    std::vector<double> out;
    for (const auto& d : delays_by_priority)
        out.insert(out.end(), d.begin(), d.end());
    return out;
}

RunSummary summarize(const std::vector<Saga>& approved, const ConflictLog& conflicts, const SimulationResult* sim)
{
    RunSummary s;
    s.conflicts = conflicts;
    s.queue_size = approved.size();
    std::vector<double> fidelity_sum(approved.size(), 0.0);
    std::map<ObjectiveId, std::size_t> index;
    for (std::size_t i = 0; i < approved.size(); ++i)
        index[approved[i].objective.id] = i;
    double total = 0.0;
    if (sim) {
        for (const auto& r : sim->deliveries) {
            fidelity_sum[index.at(r.saga_id)] += r.fidelity.value();
            total += r.fidelity.value();
        }
        s.delivered_pairs = sim->deliveries.size();
        s.mean_fidelity = s.delivered_pairs ? total / static_cast<double>(s.delivered_pairs) : 0.0;
    }
    for (std::size_t i = 0; i < approved.size(); ++i) {
        const auto& saga = approved[i];
        const double delay = saga.delay().seconds();
        s.delays_by_priority.at(std::min<std::uint32_t>(saga.objective.priority, 2)).push_back(delay);
        SagaSample sample{saga.objective.id, saga.objective.priority, static_cast<std::uint32_t>(saga.hops()), delay,
                          0, 0.0};
        if (sim) {
            sample.delivered = sim->sagas.at(i).delivered;
            if (sample.delivered)
                sample.mean_fidelity = fidelity_sum[i] / sample.delivered;
        }
        s.sagas.push_back(sample);
    }
    return s;
}

std::string cdf_csv(const RunSummary& summary)
{
    const auto all = summary.all_delays();
    std::string out = "series,delay_s,cdf\n";
    if (all.empty())
        return out;
    const auto grid = default_delay_grid(all);
    auto emit = [&](const std::string& name, const std::vector<double>& samples) {
        if (samples.empty())
            return;
        for (const auto& p : delay_cdf(samples, grid))
            out += name + fmt(",%.17g,%.17g\n", p.x, p.cdf);
    };
    emit("all", all);
    for (std::size_t p = 0; p < summary.delays_by_priority.size(); ++p)
        emit("p" + std::to_string(p), summary.delays_by_priority[p]);
    return out;
}

std::string fidelity_hist_csv(const std::vector<DeliveryRecord>& records, std::size_t bins)
{
    std::string out = "split,key,bin_lo,bin_hi,count\n";
    if (records.empty())
        return out;
    for (auto [split, name] : {std::pair{SplitBy::Hops, "hops"}, std::pair{SplitBy::Priority, "priority"}}) {
        for (const auto& [key, h] : fidelity_histogram(records, split, bins)) {
            const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                out += fmt("%s,%u,%.17g,%.17g,%llu\n", name, key, h.lo + width * b, h.lo + width * (b + 1),
                           static_cast<unsigned long long>(h.counts[b]));
        }
    }
    return out;
}

std::string saga_outcomes_csv(const std::vector<Saga>& approved, const SimulationResult& sim)
{
    std::string out = "saga_id,priority,hops,delay_s,delivered,requested,completion_time_s,time_to_serve_s,attempts\n";
    for (std::size_t i = 0; i < approved.size(); ++i) {
        const auto& saga = approved[i];
        const auto& o = sim.sagas.at(i);
        const auto completion = o.completion_time();
        const auto serve = o.time_to_serve();
        out += fmt("%llu,%u,%zu,%.12f,%u,%u,", static_cast<unsigned long long>(saga.objective.id),
                   saga.objective.priority, saga.hops(), saga.delay().seconds(), o.delivered, o.requested);
        out += completion ? fmt("%.12f,", completion->seconds()) : std::string(",");
        out += serve ? fmt("%.12f,", serve->seconds()) : std::string(",");
        out += fmt("%llu\n", static_cast<unsigned long long>(o.attempts));
    }
    return out;
}

} // namespace qnet
