#pragma once

// Sweeps over capacity or arrival rate for several schemes, and the CSV
// files they produce.

#include "networth/scenario.hpp"
#include "networth/simulator.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace networth {

struct SweepRow {
    SchemeKind scheme;
    std::optional<SweptParameter> parameter;  // nullopt for a single run
    double value = 0.0;
    std::uint64_t seed = 0;
    SimReport report;
};

struct SummaryRow {
    SchemeKind scheme;
    SweptParameter parameter;
    double value;
    std::uint32_t replications;
    double worth_mean, worth_sd;
    double connection_worth_mean, connection_worth_sd;
    double utilization_mean, utilization_sd;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (scheme, grid value, seed)
    std::vector<SummaryRow> summary;
};

/// Runs every (scheme, value, replication) combination. Work is spread over
/// `workers` threads (0 = hardware concurrency); row order does not depend
/// on scheduling.
SweepResult run_sweep(const SweepSpec& spec, unsigned workers = 0);

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows);

/// printf("%.6g").
std::string format_number(double v);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_sessions_csv(std::ostream& out, const std::vector<SessionRecord>& sessions);

/// Writes `text` to `file`, creating parent directories. Throws
/// std::runtime_error if the destination is not writable.
void write_file(const std::filesystem::path& file, const std::string& text);

}  // namespace networth
