// qnetsim: schedule and simulate entanglement-distribution objectives.
//
//   qnetsim run --config run.json [--seed N] [--out DIR]
//   qnetsim validate --config run.json
//   qnetsim sweep --config run.json [--jobs N] [--out DIR]
//   qnetsim topology-export --config run.json [--out FILE]
//
// Exit codes: 0 success, 1 config error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "qnet/config.h"
#include "qnet/error.h"
#include "qnet/experiment.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    unsigned jobs = 1;
};

qnet::RunConfig resolve(const Options& opt)
{
    auto cfg = qnet::load_config(opt.config);
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.out)
        cfg.output_dir = *opt.out;
    return cfg;
}

int cmd_validate(const Options& opt)
{
    const auto cfg = resolve(opt);
    const auto topo = qnet::build_topology(cfg.topology);
    for (const auto& w : qnet::audit(cfg, topo))
        std::cerr << "warning: " << w << "\n";
    std::cout << qnet::to_json(cfg).dump(2) << "\n";
    return kOk;
}

int cmd_run(const Options& opt)
{
    const auto cfg = resolve(opt);
    const auto topo = qnet::build_topology(cfg.topology);
    for (const auto& w : qnet::audit(cfg, topo))
        std::cerr << "warning: " << w << "\n";
    const auto run = qnet::run_pipeline(cfg);
    const auto files = qnet::write_artifacts(run, cfg.output_dir);
    std::cout << "approved " << run.schedule.approved.size() << " sagas";
    if (run.simulation)
        std::cout << ", delivered " << run.simulation->deliveries.size() << " pairs";
    std::cout << "; wrote " << files.size() << " files to " << cfg.output_dir << "\n";
    return kOk;
}

int cmd_sweep(const Options& opt)
{
    const auto cfg = resolve(opt);
    if (!cfg.sweep)
        throw qnet::ConfigError("sweep: config has no 'sweep' section");
    const std::filesystem::path out = cfg.output_dir;
    const auto points = qnet::sweep(cfg.sweep->axis, cfg.sweep->values, cfg, opt.jobs, out);
    std::filesystem::create_directories(out);
    std::ofstream(out / "sweep_summary.csv", std::ios::binary) << qnet::sweep_summary_csv(cfg.sweep->axis, points);
    int status = kOk;
    for (const auto& p : points) {
        if (!p.error.empty()) {
            std::cerr << "error: " << qnet::to_string(cfg.sweep->axis) << "=" << p.value << ": " << p.error << "\n";
            status = kRuntimeError;
        }
    }
    std::cout << "swept " << points.size() << " values; summary in " << (out / "sweep_summary.csv").string() << "\n";
    return status;
}

int cmd_topology_export(const Options& opt)
{
    const auto cfg = qnet::load_config(opt.config);
    const auto doc = qnet::to_json(qnet::build_topology(cfg.topology)).dump(2) + "\n";
    if (!opt.out) {
        std::cout << doc;
        return kOk;
    }
    std::ofstream f(*opt.out, std::ios::binary);
    if (!(f << doc))
        throw std::runtime_error("cannot write " + *opt.out);
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Centralized scheduling and discrete-event simulation of entanglement distribution"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Run config (JSON)")->required();
        sub->add_option("--out", opt.out, "Output directory (file for topology-export)");
    };
    auto* run = app.add_subcommand("run", "Schedule, simulate and write all artifacts");
    add_common(run);
    run->add_option("--seed", opt.seed, "Override the config seed");
    auto* val = app.add_subcommand("validate", "Check a config and print it with defaults filled in");
    val->add_option("--config", opt.config, "Run config (JSON)")->required();
    val->add_option("--seed", opt.seed, "Override the config seed");
    auto* swp = app.add_subcommand("sweep", "Run every value of the config's sweep section");
    add_common(swp);
    swp->add_option("--seed", opt.seed, "Override the config seed");
    swp->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    auto* exp = app.add_subcommand("topology-export", "Write the config's topology as JSON");
    add_common(exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (*run)
            return cmd_run(opt);
        if (*val)
            return cmd_validate(opt);
        if (*swp)
            return cmd_sweep(opt);
        return cmd_topology_export(opt);
    } catch (const qnet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}
