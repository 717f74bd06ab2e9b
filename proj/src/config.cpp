#include "qnet/config.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qnet/error.h"
#include "qnet/rng.h"

namespace qnet {

using nlohmann::json;

const char* to_string(SweepAxis axis)
{
    return axis == SweepAxis::QueueSize ? "queue_size" : "arrival_rate";
}

NoiseParams NoiseConfig::resolve() const
{
    NoiseParams p;
    const bool fidelities = table_values_are == TableValues::Fidelities;
    p.gate_error = fidelities ? 1.0 - gate : gate;
    p.measurement_error = fidelities ? 1.0 - measurement : measurement;
    p.coherence_time_s = coherence_time_s;
    p.initial_fidelity = WernerFidelity{initial_fidelity};
    p.attenuation_db_per_km = attenuation_db_per_km;
    p.repetition_rate_hz = repetition_rate_hz;
    p.light_speed_km_per_s = light_speed_km_per_s;
    return p;
}

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ConfigError(where() + ": expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <typename T>
    void read(const std::string& key, T& out)
    {
        used_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end())
            return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean())
                    throw ConfigError(field(key) + ": expected true or false");
            } else if constexpr (std::is_unsigned_v<T>) {
                if (!it->is_number_unsigned())
                    throw ConfigError(field(key) + ": expected a non-negative integer");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number())
                    throw ConfigError(field(key) + ": expected a number");
            }
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(field(key) + ": " + e.what());
        }
    }

    const json* child(const std::string& key)
    {
        used_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (const auto& [key, _] : obj_.items())
            if (!used_.count(key))
                throw ConfigError(field(key) + ": unknown field");
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok)
        throw ConfigError(field + ": " + what);
}

std::string line_context(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ConfigError("config: empty document");
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error at " + line_context(text, e.byte) + ": " + e.what());
    }

    RunConfig cfg;
    Section root(doc, "");
    root.read("seed", cfg.seed);
    root.read("output_dir", cfg.output_dir);
    root.read("simulate", cfg.simulate);

    if (const json* t = root.child("topology")) {
        Section s(*t, "topology");
        auto& spec = cfg.topology;
        s.read("name", spec.name);
        s.read("link_length_km", spec.link_length_km);
        if (spec.name == "star") {
            s.read("k", spec.k);
        } else if (spec.name == "bottleneck") {
            s.read("k_left", spec.k_left);
            s.read("k_right", spec.k_right);
        } else if (spec.name == "grid") {
            s.read("rows", spec.rows);
            s.read("cols", spec.cols);
        } else if (spec.name == "caveman") {
            s.read("cliques", spec.cliques);
            s.read("clique_size", spec.clique_size);
        } else if (spec.name == "custom") {
            const json* file = s.child("file");
            const json* nodes = s.child("nodes");
            const json* edges = s.child("edges");
            json doc;
            if (file) {
                require(file->is_string(), "topology.file", "expected a path");
                std::filesystem::path p = file->get<std::string>();
                if (p.is_relative())
                    p = base_dir / p;
                std::ifstream in(p);
                if (!in)
                    throw ConfigError("topology.file: cannot open " + p.string());
                try {
                    doc = json::parse(in);
                } catch (const json::parse_error& e) {
                    throw ConfigError("topology.file: " + p.string() + ": " + e.what());
                }
                require(doc.contains("nodes") && doc.contains("edges"), "topology.file", "needs 'nodes' and 'edges'");
                if (!t->contains("link_length_km") && doc.contains("link_length_km"))
                    spec.link_length_km = doc.at("link_length_km").get<double>();
            } else {
                require(nodes && edges, "topology", "custom topology needs 'file' or inline 'nodes' and 'edges'");
                doc = json{{"nodes", *nodes}, {"edges", *edges}};
            }
            // normalized so that a resolved config round-trips
            spec.custom = json{{"name", "custom"},
                               {"link_length_km", spec.link_length_km},
                               {"nodes", doc.at("nodes")},
                               {"edges", doc.at("edges")}};
        } else {
            throw ConfigError("topology.name: unknown topology '" + spec.name + "'");
        }
        s.finish();
    }

    if (const json* n = root.child("noise")) {
        Section s(*n, "noise");
        auto& noise = cfg.noise;
        s.read("gate", noise.gate);
        s.read("measurement", noise.measurement);
        std::string mode = "fidelities";
        s.read("table_values_are", mode);
        if (mode == "fidelities")
            noise.table_values_are = TableValues::Fidelities;
        else if (mode == "errors")
            noise.table_values_are = TableValues::Errors;
        else
            throw ConfigError("noise.table_values_are: expected 'fidelities' or 'errors'");
        s.read("coherence_time_s", noise.coherence_time_s);
        s.read("initial_fidelity", noise.initial_fidelity);
        s.read("attenuation_db_per_km", noise.attenuation_db_per_km);
        s.read("repetition_rate_hz", noise.repetition_rate_hz);
        s.read("light_speed_km_per_s", noise.light_speed_km_per_s);
        s.finish();
    }

    if (const json* t = root.child("traffic")) {
        Section s(*t, "traffic");
        auto& tr = cfg.traffic;
        s.read("arrival_rate", tr.arrival_rate);
        s.read("num_objectives", tr.num_objectives);
        s.read("duration_s", tr.duration_s);
        s.read("memories", tr.memories);
        s.read("pairs", tr.pairs);
        s.read("target_fidelity", tr.target_fidelity);
        s.finish();
    }

    if (const json* c = root.child("control")) {
        Section s(*c, "control");
        s.read("classical_delay_s", cfg.control.classical_delay_s);
        s.read("notify_buffer_s", cfg.control.notify_buffer_s);
        s.finish();
    }

    if (const json* w = root.child("sweep"); w && !w->is_null()) {
        Section s(*w, "sweep");
        SweepSpec sweep;
        std::string axis;
        s.read("axis", axis);
        if (axis == "queue_size")
            sweep.axis = SweepAxis::QueueSize;
        else if (axis == "arrival_rate")
            sweep.axis = SweepAxis::ArrivalRate;
        else
            throw ConfigError("sweep.axis: expected 'queue_size' or 'arrival_rate'");
        const json* values = s.child("values");
        require(values && values->is_array() && !values->empty(), "sweep.values", "expected a non-empty array");
        for (const auto& v : *values) {
            require(v.is_number(), "sweep.values", "expected numbers");
            sweep.values.push_back(v.get<double>());
        }
        s.finish();
        cfg.sweep = std::move(sweep);
    }
    root.finish();

    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void validate(const RunConfig& cfg)
{
    const auto& n = cfg.noise;
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(cfg.topology.link_length_km > 0.0, "topology.link_length_km", "must be > 0");
    require(unit(n.gate), "noise.gate", "must be in [0, 1]");
    require(unit(n.measurement), "noise.measurement", "must be in [0, 1]");
    require(n.coherence_time_s > 0.0, "noise.coherence_time_s", "must be > 0");
    require(n.initial_fidelity >= 0.25 && n.initial_fidelity <= 1.0, "noise.initial_fidelity", "must be in [0.25, 1]");
    require(n.attenuation_db_per_km >= 0.0, "noise.attenuation_db_per_km", "must be >= 0");
    require(n.repetition_rate_hz > 0.0, "noise.repetition_rate_hz", "must be > 0");
    require(n.light_speed_km_per_s > 0.0, "noise.light_speed_km_per_s", "must be > 0");

    const auto& t = cfg.traffic;
    require(t.arrival_rate > 0.0, "traffic.arrival_rate", "must be > 0");
    require(t.num_objectives >= 1, "traffic.num_objectives", "must be >= 1");
    require(t.duration_s > 0.0, "traffic.duration_s", "must be > 0");
    require(t.memories >= 1, "traffic.memories", "must be >= 1");
    require(t.pairs >= 1, "traffic.pairs", "must be >= 1");
    require(t.target_fidelity >= 0.25 && t.target_fidelity <= 1.0, "traffic.target_fidelity", "must be in [0.25, 1]");

    require(cfg.control.classical_delay_s >= 0.0, "control.classical_delay_s", "must be >= 0");
    require(cfg.control.notify_buffer_s >= cfg.control.classical_delay_s, "control.notify_buffer_s",
            "must be >= control.classical_delay_s");
    require(!cfg.output_dir.empty(), "output_dir", "must not be empty");

    if (cfg.sweep) {
        for (double v : cfg.sweep->values) {
            if (cfg.sweep->axis == SweepAxis::QueueSize)
                require(v >= 1.0 && v == static_cast<double>(static_cast<std::uint64_t>(v)), "sweep.values",
                        "queue sizes must be positive integers");
            else
                require(v > 0.0, "sweep.values", "arrival rates must be > 0");
        }
    }

    try {
        (void)build_topology(cfg.topology);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("topology: ") + e.what());
    }
}

json to_json(const RunConfig& cfg)
{
    const auto& spec = cfg.topology;
    json topo{{"name", spec.name}, {"link_length_km", spec.link_length_km}};
    if (spec.name == "star") {
        topo["k"] = spec.k;
    } else if (spec.name == "bottleneck") {
        topo["k_left"] = spec.k_left;
        topo["k_right"] = spec.k_right;
    } else if (spec.name == "grid") {
        topo["rows"] = spec.rows;
        topo["cols"] = spec.cols;
    } else if (spec.name == "caveman") {
        topo["cliques"] = spec.cliques;
        topo["clique_size"] = spec.clique_size;
    } else if (spec.custom) {
        topo["nodes"] = spec.custom->at("nodes");
        topo["edges"] = spec.custom->at("edges");
    }
    const auto& n = cfg.noise;
    json out{{"seed", cfg.seed},
             {"output_dir", cfg.output_dir},
             {"simulate", cfg.simulate},
             {"topology", topo},
             {"noise",
              {{"gate", n.gate},
               {"measurement", n.measurement},
               {"table_values_are", n.table_values_are == TableValues::Fidelities ? "fidelities" : "errors"},
               {"coherence_time_s", n.coherence_time_s},
               {"initial_fidelity", n.initial_fidelity},
               {"attenuation_db_per_km", n.attenuation_db_per_km},
               {"repetition_rate_hz", n.repetition_rate_hz},
               {"light_speed_km_per_s", n.light_speed_km_per_s}}},
             {"traffic",
              {{"arrival_rate", cfg.traffic.arrival_rate},
               {"num_objectives", cfg.traffic.num_objectives},
               {"duration_s", cfg.traffic.duration_s},
               {"memories", cfg.traffic.memories},
               {"pairs", cfg.traffic.pairs},
               {"target_fidelity", cfg.traffic.target_fidelity}}},
             {"control",
              {{"classical_delay_s", cfg.control.classical_delay_s},
               {"notify_buffer_s", cfg.control.notify_buffer_s}}}};
    if (cfg.sweep)
        out["sweep"] = {{"axis", to_string(cfg.sweep->axis)}, {"values", cfg.sweep->values}};
    return out;
}

Topology build_topology(const TopologySpec& spec)
{
    if (spec.name == "star")
        return make_star(spec.k, spec.link_length_km);
    if (spec.name == "bottleneck")
        return make_bottleneck(spec.k_left, spec.k_right, spec.link_length_km);
    if (spec.name == "grid")
        return make_grid(spec.rows, spec.cols, spec.link_length_km);
    if (spec.name == "caveman")
        return make_caveman(spec.cliques, spec.clique_size, spec.link_length_km);
    if (spec.name == "custom" && spec.custom)
        return topology_from_json(*spec.custom);
    throw InvalidParameter("unknown topology '" + spec.name + "'");
}

std::vector<std::string> audit(const RunConfig& cfg, const Topology& topo)
{
    std::vector<std::string> warnings;
    const std::uint32_t k = cfg.traffic.memories;
    const auto procs = topo.processors();
    if (procs.size() < 2)
        warnings.push_back("topology has fewer than two processor nodes; no objective can be generated");

    // A node is a potential intermediate if it lies on the chosen path of
    // some processor pair; check each node against the share it would need.
    std::vector<bool> endpoint(topo.size(), false);
    std::vector<bool> intermediate(topo.size(), false);
    for (NodeId i : procs) {
        endpoint[i] = true;
        for (NodeId j : procs) {
            if (i == j)
                continue;
            const auto path = dijkstra_path(topo, i, j);
            for (std::size_t n = 1; n + 1 < path.size(); ++n)
                intermediate[path[n]] = true;
        }
    }
    for (const auto& node : topo.nodes()) {
        if (endpoint[node.id] && node.memory_count < k)
            warnings.push_back("node " + std::to_string(node.id) + " has " + std::to_string(node.memory_count) +
                               " memories but endpoints need k=" + std::to_string(k) +
                               "; objectives ending there are permanently infeasible");
        if (intermediate[node.id] && node.memory_count < 2 * k)
            warnings.push_back("node " + std::to_string(node.id) + " has " + std::to_string(node.memory_count) +
                               " memories but intermediate hops need 2k=" + std::to_string(2 * k) +
                               "; paths through it are permanently infeasible");
    }
    return warnings;
}

std::string fingerprint(const RunConfig& cfg)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
    return buf;
}

} // namespace qnet
