#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnet/config.h"
#include "qnet/metrics.h"
#include "qnet/scheduler.h"
#include "qnet/sim_kernel.h"
#include "qnet/topology.h"
#include "qnet/traffic.h"

namespace qnet {

inline constexpr const char* kSoftwareVersion = "0.1.0";

struct RunOutput {
    RunConfig config;
    Topology topology;
    std::vector<Objective> objectives;
    ScheduleResult schedule;
    std::optional<SimulationResult> simulation; // absent when config.simulate is false
    RunSummary summary;
};

/// Topology, traffic, scheduling and (optionally) simulation for one config.
/// Deterministic in `cfg.seed`.
RunOutput run_pipeline(const RunConfig& cfg);

/// Writes manifest.json, topology.json, objectives.jsonl, schedule.jsonl,
/// congestion.csv, cdf.csv and, when simulated, deliveries.csv, sagas.csv
/// and fidelity_hist.csv. Returns the file names written.
std::vector<std::string> write_artifacts(const RunOutput& run, const std::filesystem::path& dir);

/// Manifest contents; identical configs give identical manifests apart from `created_at`.
nlohmann::json make_manifest(const RunOutput& run, const std::vector<std::string>& files);

/// Seed for one sweep point, independent of every other value in the sweep.
std::uint64_t sweep_seed(std::uint64_t run_seed, SweepAxis axis, double value);

/// `base` with the axis set to `value` and the seed replaced by sweep_seed.
RunConfig sweep_point(const RunConfig& base, SweepAxis axis, double value);

struct SweepPoint {
    double value = 0.0;
    std::uint64_t seed = 0;
    std::optional<RunSummary> summary;
    std::string error; // set when this point failed
};

/// One full run per value, keyed by value, across `jobs` threads. A failing
/// value records its error and the remaining values still run. When
/// `out_dir` is set each point writes its artifacts to `<axis>_<value>/`.
std::vector<SweepPoint> sweep(SweepAxis axis, const std::vector<double>& values, const RunConfig& base,
                              unsigned jobs = 1, const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// axis,value,seed,status,approved,median_delay_s,mean_delay_s,median_delay_p0_s,median_delay_p1_s,
/// median_delay_p2_s,delivered_pairs,mean_fidelity
std::string sweep_summary_csv(SweepAxis axis, const std::vector<SweepPoint>& points);

} // namespace qnet
