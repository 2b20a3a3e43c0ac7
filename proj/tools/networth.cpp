// networth: run allocation-scheme simulations and sweeps, emit CSV.

#include "networth/experiments.hpp"
#include "networth/profiles.hpp"
#include "networth/scenario.hpp"
#include "networth/simulator.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace networth;

namespace {

struct Overrides {
    std::optional<double> delta;
    std::optional<double> eta;
    std::optional<double> capacity;
    std::optional<double> rate_mult;

    void add_to(CLI::App* app)
    {
        app->add_option("--delta", delta, "greedy increment size (Mbps)");
        app->add_option("--eta", eta, "trunk-reservation utility threshold");
        app->add_option("--capacity", capacity, "total capacity (Mbps), split over paths proportionally");
        app->add_option("--rate-mult", rate_mult, "multiplier applied to every arrival rate");
    }

    void apply(ScenarioConfig& c) const
    {
        if (delta) {
            c.scheme.basmin.delta = *delta;
        }
        if (eta) {
            c.scheme.trunk.eta = *eta;
        }
        if (capacity) {
            c = apply_sweep_value(c, SweptParameter::TotalCapacity, *capacity);
        }
        if (rate_mult) {
            c.rate_multiplier = *rate_mult;
        }
    }
};

std::string render(void (*writer)(std::ostream&, const std::vector<SweepRow>&), const std::vector<SweepRow>& rows)
{
    std::ostringstream os;
    writer(os, rows);
    return os.str();
}

void echo_config(const ScenarioConfig& c)
{
    std::cout << "# resolved scenario\n";
    std::istringstream in(dump_scenario(c));
    for (std::string line; std::getline(in, line);) {
        std::cout << "# " << line << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Utility-based bandwidth allocation simulator"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "simulate one scenario with one scheme");
    std::string run_scenario;
    std::string run_scheme;
    std::optional<std::uint64_t> run_seed;
    std::string run_out = ".";
    bool run_check = false;
    Overrides run_over;
    run_cmd->add_option("--scenario", run_scenario, "scenario file (defaults apply when omitted)");
    run_cmd->add_option("--scheme", run_scheme, "basmin|best-effort|complete-partitioning|trunk-reservation");
    run_cmd->add_option("--seed", run_seed, "random seed");
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_flag("--check", run_check, "validate the network state after every event");
    run_over.add_to(run_cmd);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep file over all listed schemes");
    std::string sweep_file;
    std::string sweep_out = ".";
    std::optional<std::uint64_t> sweep_seed;
    unsigned workers = 0;
    Overrides sweep_over;
    sweep_cmd->add_option("--scenario", sweep_file, "sweep file")->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    sweep_cmd->add_option("--seed", sweep_seed, "base seed (replication r uses seed + r)");
    sweep_cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    sweep_over.add_to(sweep_cmd);

    // profiles
    auto* prof_cmd = app.add_subcommand("profiles", "print the built-in traffic profiles as a scenario file");
    std::string prof_out;
    prof_cmd->add_option("--out", prof_out, "write to this file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            ScenarioConfig c = run_scenario.empty() ? ScenarioConfig{} : load_scenario(run_scenario);
            if (!run_scheme.empty()) {
                const auto k = parse_scheme_kind(run_scheme);
                if (!k) {
                    std::cerr << "error: unknown scheme '" << run_scheme << "'\n";
                    return 2;
                }
                c.scheme.kind = *k;
            }
            if (run_seed) {
                c.seed = *run_seed;
            }
            run_over.apply(c);
            c.validate();
            echo_config(c);

            SimOptions opts;
            opts.check_invariants = run_check;
            const SimResult r = run(c, opts);

            const std::vector<SweepRow> rows{SweepRow{c.scheme.kind, std::nullopt, 0.0, c.seed, r.report}};
            std::ostringstream sessions;
            write_sessions_csv(sessions, r.sessions);
            const fs::path out(run_out);
            write_file(out / "sweep.csv", render(write_sweep_csv, rows));
            write_file(out / "sessions.csv", sessions.str());
            write_file(out / "scenario.yaml", dump_scenario(c));
            std::cout << "time_avg_total_worth=" << format_number(r.report.time_avg_total_worth)
                      << " mean_connection_worth=" << format_number(r.report.mean_connection_worth)
                      << " mean_link_utilization=" << format_number(r.report.mean_link_utilization) << '\n';
            return 0;
        }
        if (*sweep_cmd) {
            SweepSpec spec = load_sweep(sweep_file);
            if (sweep_seed) {
                spec.base.seed = *sweep_seed;
            }
            sweep_over.apply(spec.base);
            spec.validate();
            echo_config(spec.base);

            const SweepResult r = run_sweep(spec, workers);
            std::ostringstream summary;
            write_summary_csv(summary, r.summary);
            const fs::path out(sweep_out);
            write_file(out / "sweep.csv", render(write_sweep_csv, r.rows));
            write_file(out / "summary.csv", summary.str());
            write_file(out / "scenario.yaml", dump_scenario(spec.base));
            std::cout << r.rows.size() << " runs written to " << (out / "sweep.csv").string() << '\n';
            return 0;
        }
        if (*prof_cmd) {
            ScenarioConfig c;
            const std::string text = dump_scenario(c);
            if (prof_out.empty()) {
                std::cout << text;
            } else {
                write_file(prof_out, text);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
