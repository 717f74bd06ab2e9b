#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qnet/scheduler.h"
#include "qnet/sim_kernel.h"

namespace qnet {

struct CdfPoint {
    double x = 0.0;
    double cdf = 0.0;
};

/// Empirical CDF of `samples` evaluated at each grid value (P[X <= x]).
/// Throws InvalidParameter on empty samples.
std::vector<CdfPoint> delay_cdf(std::span<const double> samples, std::span<const double> grid);

/// `points` values spaced logarithmically over [lo, hi]; hi is the last value exactly.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Delay grid: 1 ms up to the largest sample (at least 1 ms), 200 points.
std::vector<double> default_delay_grid(std::span<const double> samples);

/// Largest pointwise difference of two CDFs on a common grid.
double max_cdf_gap(std::span<const double> a, std::span<const double> b, std::span<const double> grid);

double median(std::vector<double> samples);

struct Histogram {
    double lo = 0.25;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    double mean = 0.0;
    double m2 = 0.0; // sum of squared deviations

    double variance() const { return total > 1 ? m2 / static_cast<double>(total - 1) : 0.0; }
    double standard_error() const;
    void add(double x);
};

Histogram make_histogram(std::size_t bins, double lo = 0.25, double hi = 1.0);

enum class SplitBy { Hops, Priority };

/// Per-split-value fidelity histograms with fixed-width bins over [1/4, 1].
std::map<std::uint32_t, Histogram> fidelity_histogram(const std::vector<DeliveryRecord>& records, SplitBy split,
                                                      std::size_t bins = 50);

struct CongestionShare {
    NodeId node = 0;
    std::uint64_t conflicts = 0;    // rejection events charged
    std::uint64_t reservations = 0; // distinct objectives charged
    double share = 0.0;             // reservations / total reservations
    double max_normalized = 0.0;    // conflicts / largest node conflicts
};

/// Throws InvalidParameter if the log has no reservations.
std::vector<CongestionShare> congestion_map(const ConflictLog& log);

/// Node ids ordered by descending share (ties: conflicts, then ascending id).
std::vector<NodeId> rank_by_congestion(const std::vector<CongestionShare>& shares);

struct SagaSample {
    ObjectiveId id = 0;
    std::uint32_t priority = 0;
    std::uint32_t hops = 0;
    double delay_s = 0.0;
    std::uint32_t delivered = 0;
    double mean_fidelity = 0.0; // NaN-free: 0 when nothing was delivered
};

struct RunSummary {
    std::string fingerprint;
    std::uint64_t seed = 0;
    std::size_t queue_size = 0;
    double arrival_rate = 0.0;
    std::array<std::vector<double>, 3> delays_by_priority; // seconds
    std::vector<SagaSample> sagas;
    ConflictLog conflicts;
    std::uint64_t delivered_pairs = 0;
    double mean_fidelity = 0.0;

    std::vector<double> all_delays() const;
};

RunSummary summarize(const std::vector<Saga>& approved, const ConflictLog& conflicts, const SimulationResult* sim);

// CSV renderers. Numbers use %.17g so output is reproducible byte for byte.

/// series,delay_s,cdf with series in {all, p0, p1, p2}
std::string cdf_csv(const RunSummary& summary);
/// split,key,bin_lo,bin_hi,count
std::string fidelity_hist_csv(const std::vector<DeliveryRecord>& records, std::size_t bins = 50);
/// saga_id,priority,hops,delay_s,delivered,requested,completion_time_s,time_to_serve_s,attempts
std::string saga_outcomes_csv(const std::vector<Saga>& approved, const SimulationResult& sim);

} // namespace qnet
