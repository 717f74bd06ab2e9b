#include "qnet/traffic.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "qnet/error.h"
#include "qnet/rng.h"

namespace qnet {

TrafficMatrix::TrafficMatrix(std::vector<std::vector<std::uint64_t>> counts) : counts_(std::move(counts))
{
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i].size() != counts_.size())
            throw InvalidParameter("traffic matrix must be square");
        if (counts_[i][i] != 0)
            throw InvalidParameter("traffic matrix diagonal must be zero");
        for (auto c : counts_[i])
            total_ += c;
    }
    if (total_ == 0)
        throw InvalidParameter("traffic matrix is all zero");
}

std::vector<double> TrafficMatrix::weights() const
{
    std::vector<double> w;
    w.reserve(counts_.size() * counts_.size());
    for (const auto& row : counts_)
        for (auto c : row)
            w.push_back(static_cast<double>(c));
    return w;
}

TrafficMatrix build_traffic_matrix(const Topology& topo, double rate, std::uint64_t seed)
{
    if (!(rate > 0.0))
        throw InvalidParameter("traffic: arrival rate must be > 0");
    const auto procs = topo.processors();
    if (procs.size() < 2)
        throw InvalidParameter("traffic: topology needs at least two processor nodes");

    Rng rng(derive_seed(seed, "traffic-matrix"));
    std::poisson_distribution<std::uint64_t> poisson(rate);
    const std::size_t n = topo.size();
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n, 0));
        std::uint64_t total = 0;
        for (NodeId i : procs)
            for (NodeId j : procs)
                if (i != j)
                    total += (m[i][j] = poisson(rng));
        if (total > 0)
            return TrafficMatrix(std::move(m));
    }
    throw InvalidParameter("traffic: matrix drawn all zero twice; raise the arrival rate");
}

std::vector<Objective> generate_objectives(const TrafficMatrix& tm, const ObjectiveParams& params, std::uint64_t seed)
{
    if (params.count < 1)
        throw InvalidParameter("traffic: number of objectives must be >= 1");
    if (!(params.arrival_rate > 0.0))
        throw InvalidParameter("traffic: arrival rate must be > 0");
    if (!(params.duration_s > 0.0))
        throw InvalidParameter("traffic: duration must be > 0");
    if (params.memories < 1 || params.pair_count < 1)
        throw InvalidParameter("traffic: memories and pair_count must be >= 1");

    Rng pair_rng(derive_seed(seed, "pairs"));
    Rng priority_rng(derive_seed(seed, "priorities"));
    Rng arrival_rng(derive_seed(seed, "arrivals"));

    const auto w = tm.weights();
    std::discrete_distribution<std::size_t> pair_dist(w.begin(), w.end());
    std::uniform_int_distribution<std::uint32_t> priority_dist(0, 2);
    std::exponential_distribution<double> gap_dist(params.arrival_rate);
    const SimTime duration = SimTime::from_seconds(params.duration_s);
    const std::size_t n = tm.size();

    std::vector<Objective> out;
    out.reserve(params.count);
    SimTime clock;
    for (std::size_t k = 0; k < params.count; ++k) {
        // keep arrivals strictly increasing even if a draw rounds to 0 ps
        clock += std::max(SimTime::from_ps(1), SimTime::from_seconds(gap_dist(arrival_rng)));
        const std::size_t cell = pair_dist(pair_rng);
        Objective o;
        o.source = static_cast<NodeId>(cell / n);
        o.destination = static_cast<NodeId>(cell % n);
        o.arrival = clock;
        o.end = clock + duration;
        o.memories = params.memories;
        o.target_fidelity = params.target_fidelity;
        o.pair_count = params.pair_count;
        o.id = k;
        o.priority = priority_dist(priority_rng);
        out.push_back(o);
    }
    return out;
}

nlohmann::json to_json(const Objective& o)
{
    // times carry both the exact picosecond value and a readable seconds field
    return {{"i", o.source},
            {"j", o.destination},
            {"t_a", o.arrival.seconds()},
            {"t_e", o.end.seconds()},
            {"t_a_ps", o.arrival.ps()},
            {"t_e_ps", o.end.ps()},
            {"k", o.memories},
            {"F", o.target_fidelity.value()},
            {"n_p", o.pair_count},
            {"id", o.id},
            {"p", o.priority}};
}

Objective objective_from_json(const nlohmann::json& j)
{
    Objective o;
    o.source = j.at("i").get<NodeId>();
    o.destination = j.at("j").get<NodeId>();
    o.arrival = j.contains("t_a_ps") ? SimTime::from_ps(j.at("t_a_ps").get<std::int64_t>())
                                     : SimTime::from_seconds(j.at("t_a").get<double>());
    o.end = j.contains("t_e_ps") ? SimTime::from_ps(j.at("t_e_ps").get<std::int64_t>())
                                 : SimTime::from_seconds(j.at("t_e").get<double>());
    o.memories = j.at("k").get<std::uint32_t>();
    o.target_fidelity = WernerFidelity{j.at("F").get<double>()};
    o.pair_count = j.at("n_p").get<std::uint32_t>();
    o.id = j.at("id").get<ObjectiveId>();
    o.priority = j.at("p").get<std::uint32_t>();
    if (o.source == o.destination)
        throw InvalidParameter("objective " + std::to_string(o.id) + ": source equals destination");
    if (o.end <= o.arrival)
        throw InvalidParameter("objective " + std::to_string(o.id) + ": t_e must be after t_a");
    return o;
}

std::string to_jsonl(const std::vector<Objective>& objectives)
{
    std::string out;
    for (const auto& o : objectives) {
        out += to_json(o).dump();
        out += '\n';
    }
    return out;
}

std::vector<Objective> objectives_from_jsonl(const std::string& text)
{
    std::vector<Objective> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        out.push_back(objective_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

} // namespace qnet
