#include "qnet/experiment.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "qnet/error.h"
#include "qnet/rng.h"

namespace qnet {

namespace {

std::string format_value(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

RunOutput run_pipeline(const RunConfig& cfg)
{
    validate(cfg);
    RunOutput run{cfg, build_topology(cfg.topology), {}, {}, std::nullopt, {}};

    const auto matrix = build_traffic_matrix(run.topology, cfg.traffic.arrival_rate, derive_seed(cfg.seed, "traffic"));
    ObjectiveParams params;
    params.count = cfg.traffic.num_objectives;
    params.arrival_rate = cfg.traffic.arrival_rate;
    params.duration_s = cfg.traffic.duration_s;
    params.memories = cfg.traffic.memories;
    params.target_fidelity = WernerFidelity{cfg.traffic.target_fidelity};
    params.pair_count = cfg.traffic.pairs;
    run.objectives = generate_objectives(matrix, params, derive_seed(cfg.seed, "objectives"));

    run.schedule = schedule_all(run.objectives, run.topology);

    if (cfg.simulate) {
        KernelOptions options;
        options.classical_delay = SimTime::from_seconds(cfg.control.classical_delay_s);
        options.notify_buffer = SimTime::from_seconds(cfg.control.notify_buffer_s);
        run.simulation = run_simulation(run.schedule.approved, run.topology, cfg.noise.resolve(),
                                        derive_seed(cfg.seed, "kernel"), options);
    }

    run.summary = summarize(run.schedule.approved, run.schedule.conflicts,
                            run.simulation ? &*run.simulation : nullptr);
    run.summary.fingerprint = fingerprint(cfg);
    run.summary.seed = cfg.seed;
    run.summary.queue_size = cfg.traffic.num_objectives;
    run.summary.arrival_rate = cfg.traffic.arrival_rate;
    return run;
}

nlohmann::json make_manifest(const RunOutput& run, const std::vector<std::string>& files)
{
    const auto seed = run.config.seed;
    return {{"software", "qnetsim"},
            {"version", kSoftwareVersion},
            {"fingerprint", fingerprint(run.config)},
            {"config", to_json(run.config)},
            {"seeds",
             {{"run", seed},
              {"traffic", derive_seed(seed, "traffic")},
              {"objectives", derive_seed(seed, "objectives")},
              {"kernel", derive_seed(seed, "kernel")}}},
            {"files", files},
            {"created_at", utc_now()}};
}

std::vector<std::string> write_artifacts(const RunOutput& run, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        files.push_back(name);
    };
    put("topology.json", to_json(run.topology).dump(2) + "\n");
    put("objectives.jsonl", to_jsonl(run.objectives));
    put("schedule.jsonl", sagas_to_jsonl(run.schedule.approved));
    put("congestion.csv", conflicts_to_csv(run.schedule.conflicts));
    put("cdf.csv", cdf_csv(run.summary));
    if (run.simulation) {
        put("deliveries.csv", deliveries_to_csv(run.simulation->deliveries));
        put("sagas.csv", saga_outcomes_csv(run.schedule.approved, *run.simulation));
        put("fidelity_hist.csv", fidelity_hist_csv(run.simulation->deliveries));
    }
    write_file(dir / "manifest.json", make_manifest(run, files).dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

std::uint64_t sweep_seed(std::uint64_t run_seed, SweepAxis axis, double value)
{
    return derive_seed(run_seed, std::string(to_string(axis)) + "=" + format_value(value));
}

RunConfig sweep_point(const RunConfig& base, SweepAxis axis, double value)
{
    RunConfig cfg = base;
    cfg.sweep.reset();
    if (axis == SweepAxis::QueueSize)
        cfg.traffic.num_objectives = static_cast<std::size_t>(value);
    else
        cfg.traffic.arrival_rate = value;
    cfg.seed = sweep_seed(base.seed, axis, value);
    return cfg;
}

std::vector<SweepPoint> sweep(SweepAxis axis, const std::vector<double>& values, const RunConfig& base, unsigned jobs,
                              const std::optional<std::filesystem::path>& out_dir)
{
    if (values.empty())
        throw InvalidParameter("sweep: no values");
    std::vector<SweepPoint> points(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            auto& point = points[i];
            point.value = values[i];
            try {
                const RunConfig cfg = sweep_point(base, axis, values[i]);
                point.seed = cfg.seed;
                RunOutput run = run_pipeline(cfg);
                if (out_dir)
                    write_artifacts(run, *out_dir / (std::string(to_string(axis)) + "_" + format_value(values[i])));
                point.summary = std::move(run.summary);
            } catch (const std::exception& e) {
                point.error = e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < jobs; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();
    return points;
}

std::string sweep_summary_csv(SweepAxis axis, const std::vector<SweepPoint>& points)
{
    std::string out = "axis,value,seed,status,approved,median_delay_s,mean_delay_s,median_delay_p0_s,"
                      "median_delay_p1_s,median_delay_p2_s,delivered_pairs,mean_fidelity\n";
    char buf[512];
    for (const auto& p : points) {
        if (!p.summary) {
            std::snprintf(buf, sizeof buf, "%s,%s,%llu,error,,,,,,,,\n", to_string(axis), format_value(p.value).c_str(),
                          static_cast<unsigned long long>(p.seed));
            out += buf;
            continue;
        }
        const auto& s = *p.summary;
        const auto all = s.all_delays();
        double mean = 0.0;
        for (double d : all)
            mean += d;
        mean /= static_cast<double>(all.size());
        auto med = [](const std::vector<double>& v) { return v.empty() ? 0.0 : median(v); };
        std::snprintf(buf, sizeof buf, "%s,%s,%llu,ok,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%llu,%.17g\n", to_string(axis),
                      format_value(p.value).c_str(), static_cast<unsigned long long>(p.seed), s.sagas.size(),
                      median(all), mean, med(s.delays_by_priority[0]), med(s.delays_by_priority[1]),
                      med(s.delays_by_priority[2]), static_cast<unsigned long long>(s.delivered_pairs), s.mean_fidelity);
        out += buf;
    }
    return out;
}

} // namespace qnet
