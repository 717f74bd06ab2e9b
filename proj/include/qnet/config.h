#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnet/physics.h"
#include "qnet/topology.h"
#include "qnet/traffic.h"

namespace qnet {

struct TopologySpec {
    std::string name = "star"; // star | bottleneck | grid | caveman | custom
    std::uint32_t k = 25;
    std::uint32_t k_left = 12;
    std::uint32_t k_right = 13;
    std::uint32_t rows = 5;
    std::uint32_t cols = 5;
    std::uint32_t cliques = 5;
    std::uint32_t clique_size = 5;
    double link_length_km = kDefaultLinkLengthKm;
    std::optional<nlohmann::json> custom; // resolved topology document for "custom"

    bool operator==(const TopologySpec&) const = default;
};

enum class TableValues { Fidelities, Errors };

/// Hardware noise as written in the parameter table. The gate and
/// measurement entries are read either as fidelities (error = 1 - value)
/// or as error probabilities, per `table_values_are`.
struct NoiseConfig {
    double gate = 0.99;
    double measurement = 0.995;
    TableValues table_values_are = TableValues::Fidelities;
    double coherence_time_s = 2.0;
    double initial_fidelity = 0.9;
    double attenuation_db_per_km = 0.2;
    double repetition_rate_hz = 1e10;
    double light_speed_km_per_s = 2e5;

    NoiseParams resolve() const;
    bool operator==(const NoiseConfig&) const = default;
};

struct TrafficConfig {
    double arrival_rate = 50.0;
    std::size_t num_objectives = 100;
    double duration_s = 1.0;
    std::uint32_t memories = 1;
    std::uint32_t pairs = 100;
    double target_fidelity = 0.8;

    bool operator==(const TrafficConfig&) const = default;
};

struct ControlConfig {
    double classical_delay_s = 1e-3;
    double notify_buffer_s = 50e-3;

    bool operator==(const ControlConfig&) const = default;
};

enum class SweepAxis { QueueSize, ArrivalRate };

const char* to_string(SweepAxis axis);

struct SweepSpec {
    SweepAxis axis = SweepAxis::QueueSize;
    std::vector<double> values;

    bool operator==(const SweepSpec&) const = default;
};

struct RunConfig {
    TopologySpec topology;
    NoiseConfig noise;
    TrafficConfig traffic;
    ControlConfig control;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    bool simulate = true;
    std::optional<SweepSpec> sweep;

    bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON config; missing fields take their defaults. Unknown keys
/// and out-of-range values throw ConfigError naming the field (for example
/// "noise.coherence_time_s"). Syntax errors carry line and column.
/// Relative custom-topology paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Range checks every field; throws ConfigError.
void validate(const RunConfig& cfg);

/// Fully resolved config, defaults filled; parse_config(dump) round-trips.
nlohmann::json to_json(const RunConfig& cfg);

Topology build_topology(const TopologySpec& spec);

/// Non-fatal findings, e.g. nodes that can never host a reservation
/// because k (endpoint) or 2k (intermediate) exceeds their memory count.
std::vector<std::string> audit(const RunConfig& cfg, const Topology& topo);

/// Hash of the resolved config, hex.
std::string fingerprint(const RunConfig& cfg);

} // namespace qnet
