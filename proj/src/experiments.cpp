#include "networth/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace networth {

namespace {

struct Job {
    SchemeKind scheme;
    double value;
    std::uint64_t seed;
};

std::pair<double, double> mean_sd(const std::vector<double>& xs)
{
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, unsigned workers)
{
    spec.validate();

    std::vector<Job> jobs;
    for (SchemeKind k : spec.schemes) {
        for (double v : spec.values) {
            for (std::uint32_t r = 0; r < spec.replications; ++r) {
                jobs.push_back(Job{k, v, replication_seed(spec.base, r)});
            }
        }
    }

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            try {
                ScenarioConfig c = apply_sweep_value(spec.base, spec.parameter, jobs[i].value);
                c.scheme.kind = jobs[i].scheme;
                c.seed = jobs[i].seed;
                SimOptions opts;
                opts.keep_sessions = false;
                rows[i] = SweepRow{jobs[i].scheme, spec.parameter, jobs[i].value, jobs[i].seed,
                                   run(c, opts).report};
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(jobs.size());
                return;
            }
        }
    };

    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    SweepResult result;
    result.rows = std::move(rows);
    result.summary = summarize(result.rows);
    return result;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows)
{
    std::vector<SummaryRow> out;
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        std::vector<double> w, a, u;
        while (j < rows.size() && rows[j].scheme == rows[i].scheme && rows[j].value == rows[i].value) {
            w.push_back(rows[j].report.time_avg_total_worth);
            a.push_back(rows[j].report.mean_connection_worth);
            u.push_back(rows[j].report.mean_link_utilization);
            ++j;
        }
        const auto [wm, ws] = mean_sd(w);
        const auto [am, as] = mean_sd(a);
        const auto [um, us] = mean_sd(u);
        out.push_back(SummaryRow{rows[i].scheme, rows[i].parameter.value_or(SweptParameter::TotalCapacity),
                                 rows[i].value, static_cast<std::uint32_t>(j - i), wm, ws, am, as, um, us});
        i = j;
    }
    return out;
}

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "scheme,swept_param,swept_value,seed,time_avg_total_worth,mean_connection_worth,"
           "mean_link_utilization,offered,accepted,rejected,preempted,completed\n";
    for (const auto& r : rows) {
        const ProfileCounts t = r.report.totals();
        out << to_string(r.scheme) << ',' << (r.parameter ? to_string(*r.parameter) : "none") << ','
            << (r.parameter ? format_number(r.value) : "") << ',' << r.seed << ','
            << format_number(r.report.time_avg_total_worth) << ',' << format_number(r.report.mean_connection_worth)
            << ',' << format_number(r.report.mean_link_utilization) << ',' << t.offered << ',' << t.accepted << ','
            << t.rejected << ',' << t.preempted << ',' << t.completed << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows)
{
    out << "scheme,swept_param,swept_value,replications,time_avg_total_worth_mean,time_avg_total_worth_sd,"
           "mean_connection_worth_mean,mean_connection_worth_sd,mean_link_utilization_mean,"
           "mean_link_utilization_sd\n";
    for (const auto& r : rows) {
        out << to_string(r.scheme) << ',' << to_string(r.parameter) << ',' << format_number(r.value) << ','
            << r.replications << ',' << format_number(r.worth_mean) << ',' << format_number(r.worth_sd) << ','
            << format_number(r.connection_worth_mean) << ',' << format_number(r.connection_worth_sd) << ','
            << format_number(r.utilization_mean) << ',' << format_number(r.utilization_sd) << '\n';
    }
}

void write_sessions_csv(std::ostream& out, const std::vector<SessionRecord>& sessions)
{
    out << "flow_id,profile_id,path_id,arrival_s,end_s,end_reason,volume_mbit,worth_integral,"
           "avg_connection_worth\n";
    for (const auto& s : sessions) {
        out << s.flow_id << ',' << s.profile_id << ',' << (s.path ? std::to_string(*s.path) : "") << ','
            << format_number(s.arrival) << ',' << format_number(s.end) << ',' << to_string(s.reason) << ','
            << format_number(s.volume) << ',' << format_number(s.worth_integral) << ','
            << format_number(average_connection_worth(s)) << '\n';
    }
}

void write_file(const std::filesystem::path& file, const std::string& text)
{
    std::error_code ec;
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path(), ec);
    }
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(file.string() + ": cannot open for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw std::runtime_error(file.string() + ": write failed");
    }
}

}  // namespace networth
