#pragma once

// Parallel-path network model: traffic profiles, the session table and the
// capacity/range constraints every allocation scheme has to respect.

#include "networth/utility.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace networth {

using FlowId = std::uint64_t;
using PathId = std::size_t;

/// A caller broke an operation's precondition (e.g. infeasible minima).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Absolute slack used for capacity and range comparisons (Mbps).
inline constexpr double kBandwidthTolerance = 1e-9;

struct VolumeRange {
    double low;   // Mbit
    double high;  // Mbit

    bool operator==(const VolumeRange&) const = default;
};

struct TrafficProfile {
    int id;
    UtilityFunction utility;
    PriorityLevel priority;
    VolumeRange volume;
    std::string label;

    TrafficClass traffic_class() const { return utility.traffic_class(); }

    /// Throws std::invalid_argument if the volume range is empty or non-positive.
    void validate() const;

    bool operator==(const TrafficProfile&) const = default;
};

using ProfilePtr = std::shared_ptr<const TrafficProfile>;

struct Path {
    PathId id;
    double capacity;  // Mbps
};

enum class FlowState { Pending, Active, Completed, Rejected, Preempted, Unfinished };

std::string_view to_string(FlowState s);

struct Flow {
    FlowId id = 0;
    ProfilePtr profile;
    double arrival_time = 0.0;  // s
    double total_volume = 0.0;  // Mbit
    double remaining_volume = 0.0;
    double transferred = 0.0;  // integral of the allocation over the flow's life, Mbit
    std::optional<PathId> path;
    double allocation = 0.0;  // Mbps
    FlowState state = FlowState::Pending;
    double end_time = 0.0;

    double b_min() const { return profile->utility.b_min(); }
    double b_max() const { return profile->utility.b_max(); }
    PriorityLevel priority() const { return profile->priority; }
    TrafficClass traffic_class() const { return profile->traffic_class(); }
    /// Worth at the current allocation; zero unless Active.
    double current_worth() const;
};

/// The edge router's session table plus the per-path index of active flows.
/// Owned and mutated by a single simulation loop.
class NetworkState {
public:
    explicit NetworkState(const std::vector<double>& capacities);

    const std::vector<Path>& paths() const { return paths_; }
    const Path& path(PathId id) const;  // throws std::out_of_range
    double total_capacity() const;

    /// Registers a Pending flow. Ids must be strictly increasing.
    Flow& add_flow(FlowId id, ProfilePtr profile, double arrival_time, double volume);

    Flow& flow(FlowId id);
    const Flow& flow(FlowId id) const;
    bool contains(FlowId id) const { return flows_.contains(id); }
    const std::map<FlowId, Flow>& flows() const { return flows_; }

    const std::set<FlowId>& active_on(PathId id) const;
    std::size_t active_count() const;

    void activate(FlowId id, PathId path, double allocation);
    void set_allocation(FlowId id, double allocation);
    void reject(FlowId id, double time);
    /// Removes an Active flow from its path and moves it to a terminal state.
    void close(FlowId id, FlowState end, double time);
    /// Drops a terminal flow from the table.
    void forget(FlowId id);

private:
    void transition(Flow& f, FlowState next);

    std::vector<Path> paths_;
    std::map<FlowId, Flow> flows_;
    std::vector<std::set<FlowId>> active_;
    std::optional<FlowId> last_id_;
};

/// R_p: sum of allocations of active flows on the path.
double consumed_bandwidth(const NetworkState& state, PathId path);
/// A_p = C_p - R_p, clamped at 0.
double available_bandwidth(const NetworkState& state, PathId path);
/// Sum of worth over active flows on one path.
double path_worth(const NetworkState& state, PathId path);
/// Sum of worth over all active flows.
double total_worth(const NetworkState& state);

/// Which bandwidth range an active flow must lie in.
enum class RangePolicy {
    /// HRT at b_max, RT in [b_min, b_max], elastic in [0, b_max].
    Strict,
    /// Every class in [0, b_max]; schemes without admission control.
    Capped,
    /// Strict, except elastic flows have no upper bound.
    ElasticUncapped,
};

struct Violation {
    enum class Kind { Capacity, Range, Placement };
    Kind kind;
    std::optional<FlowId> flow;
    std::optional<PathId> path;
    std::string message;
};

std::vector<Violation> validate(const NetworkState& state, RangePolicy policy = RangePolicy::Strict);

}  // namespace networth
