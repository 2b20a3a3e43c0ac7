#pragma once

// Fluid flow-level simulation. Flows arrive as independent Poisson streams
// per profile, drain their volume at the allocated rate and leave when it is
// exhausted; allocation decisions are delegated to a Scheme. Metrics are
// integrated exactly between events (allocations are piecewise constant).

#include "networth/baselines.hpp"
#include "networth/basmin.hpp"
#include "networth/network.hpp"
#include "networth/scheme.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace networth {

enum class SchemeKind { Basmin, BestEffort, CompletePartitioning, TrunkReservation };

std::string_view to_string(SchemeKind kind);
std::optional<SchemeKind> parse_scheme_kind(std::string_view name);
inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::Basmin, SchemeKind::BestEffort,
                                             SchemeKind::CompletePartitioning, SchemeKind::TrunkReservation};

struct SchemeConfig {
    SchemeKind kind = SchemeKind::Basmin;
    BasminConfig basmin;
    TrunkReservationConfig trunk;
    PartitionShares shares;
};

std::unique_ptr<Scheme> make_scheme(const SchemeConfig& config);

enum class VolumeDistribution {
    /// Exponential with mean at the range midpoint, clamped into the range.
    ClampedExponential,
    Uniform,
};

std::string_view to_string(VolumeDistribution d);
std::optional<VolumeDistribution> parse_volume_distribution(std::string_view name);

/// Default per-profile arrival rates (flows/s) for the built-in profiles.
std::map<int, double> default_arrival_rates();

struct ScenarioConfig {
    std::vector<double> capacities{2.0};  // Mbps, one entry per parallel path
    std::vector<TrafficProfile> profiles;  // built-in table unless overridden
    std::map<int, double> arrival_rates;   // flows/s by profile id; absent = 0
    double rate_multiplier = 1.0;
    double horizon = 20000.0;  // s
    double warmup = 2000.0;    // s, excluded from metrics
    VolumeDistribution volume_distribution = VolumeDistribution::ClampedExponential;
    SchemeConfig scheme;
    std::uint64_t seed = 1;

    ScenarioConfig();

    /// Arrival rate of a profile after the multiplier.
    double rate_of(int profile_id) const;
    double total_capacity() const;
    /// Throws std::invalid_argument describing the first problem found.
    void validate() const;
};

struct WorkloadArrival {
    FlowId id;
    int profile_id;
    double time;    // s
    double volume;  // Mbit
};

/// Arrivals in [0, horizon) ordered by time (ties: profile id), with ids
/// assigned densely in that order. Each profile draws from its own substream
/// of the scenario seed, so the sequence for a horizon is a prefix of the
/// sequence for any longer horizon.
std::vector<WorkloadArrival> sample_workload(const ScenarioConfig& config);

enum class EndReason { Completed, Rejected, Preempted, Unfinished };

std::string_view to_string(EndReason r);

struct SessionRecord {
    FlowId flow_id = 0;
    int profile_id = 0;
    std::optional<PathId> path;
    double arrival = 0.0;
    double end = 0.0;
    EndReason reason = EndReason::Rejected;
    double volume = 0.0;       // Mbit requested
    double transferred = 0.0;  // Mbit delivered
    double worth_integral = 0.0;
    double utility_integral = 0.0;

    double duration() const { return end - arrival; }
};

/// Time-average of a session's worth over its time in the network; 0 when
/// the session never spent time in it.
double average_connection_worth(const SessionRecord& record);

struct ProfileCounts {
    std::uint64_t offered = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t preempted = 0;
    std::uint64_t completed = 0;

    ProfileCounts& operator+=(const ProfileCounts& o);
    bool operator==(const ProfileCounts&) const = default;
};

struct SimReport {
    double time_avg_total_worth = 0.0;
    double mean_connection_worth = 0.0;
    double mean_link_utilization = 0.0;
    std::map<int, ProfileCounts> counts;  // sessions arriving inside the metric window
    std::uint64_t events = 0;
    std::uint64_t sessions_in_mean = 0;
    ScenarioConfig config;

    ProfileCounts totals() const;
};

/// Sessions that count towards mean_connection_worth: arrived inside
/// [warmup, horizon) and were admitted. Rejected arrivals have no time in the
/// network and are left out; preempted ones count with their truncated
/// duration.
inline constexpr std::string_view kConnectionWorthRule =
    "admitted sessions arriving in [warmup, horizon); rejected excluded, preempted truncated";

struct SimOptions {
    /// Validate the state and re-derive every departure time after each event.
    bool check_invariants = false;
    bool keep_sessions = true;
};

struct SimResult {
    SimReport report;
    std::vector<SessionRecord> sessions;  // ordered by end time, then flow id
};

/// Runs one scenario with the scheme it names.
SimResult run(const ScenarioConfig& config, const SimOptions& options = {});
/// Runs one scenario with an explicit scheme instance.
SimResult run(const ScenarioConfig& config, Scheme& scheme, const SimOptions& options = {});
/// Runs a fixed arrival list instead of sampling one. Arrivals must be
/// ordered by time with strictly increasing ids and name known profiles.
SimResult run(const ScenarioConfig& config, Scheme& scheme, const std::vector<WorkloadArrival>& arrivals,
              const SimOptions& options = {});

struct MetricWindow {
    double begin;
    double end;
};

/// Piecewise-constant integration helper: accumulates value * overlap of
/// each interval with the window.
class WindowIntegrator {
public:
    explicit WindowIntegrator(MetricWindow window) : window_(window) {}

    void add(double t0, double t1, double value);
    double integral() const { return integral_; }
    double time_average() const;

private:
    MetricWindow window_;
    double integral_ = 0.0;
};

}  // namespace networth
