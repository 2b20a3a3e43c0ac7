#pragma once

// Comparison schemes: best effort (complete sharing), complete partitioning
// and trunk reservation. All three split bandwidth by bounded max-min
// fairness and differ in admission and in who competes with whom.

#include "networth/basmin.hpp"
#include "networth/network.hpp"
#include "networth/scheme.hpp"

#include <limits>
#include <span>

namespace networth {

struct ShareItem {
    FlowId id;
    double floor = 0.0;
    double cap = std::numeric_limits<double>::infinity();
};

/// Max-min fair split with per-flow bounds: x_j = clamp(level, floor_j,
/// cap_j) for the water level that exhausts `capacity`, or every flow at its
/// cap when the caps do not reach it. Throws ContractViolation when the
/// floors exceed the capacity.
Allocation bounded_max_min(double capacity, std::span<const ShareItem> flows);

struct FlowBounds {
    FlowId id;
    TrafficClass traffic_class;
    double b_min;
    double b_max;
};

FlowBounds flow_bounds(const Flow& flow);

/// Equal share capped at b_max, surplus re-split among uncapped flows.
Allocation best_effort_allocate(double capacity, std::span<const FlowBounds> flows);

struct PartitionShares {
    double hrt = 0.1;
    double rt = 0.4;
    double elastic = 0.5;

    double of(TrafficClass c) const;
    /// Throws std::invalid_argument unless each share >= 0 and they sum to 1.
    void validate() const;

    bool operator==(const PartitionShares&) const = default;
};

/// Each class owns a fixed slice; best effort inside each slice, no borrowing.
Allocation complete_partitioning_allocate(double capacity, std::span<const FlowBounds> flows,
                                          const PartitionShares& shares);

struct TrunkReservationConfig {
    double eta = 0.9;

    /// Throws std::invalid_argument unless 0 <= eta <= 1.
    void validate() const;
};

/// HRT pinned at b_max; RT floored at b_min and capped at b_max; elastic
/// floored at 0 and uncapped.
Allocation trunk_reservation_allocate(double capacity, std::span<const FlowBounds> flows);

/// Mean utility of active real-time flows on a path; nullopt if there are none.
std::optional<double> mean_real_time_utility(const NetworkState& state, PathId path);

/// Whether trunk reservation would take `new_flow` onto `path`.
bool trunk_reservation_admits(const NetworkState& state, PathId path, const Flow& new_flow,
                              const TrunkReservationConfig& config);

/// Capacity left on a path after the minima of active HRT/RT flows.
double reserved_headroom(const NetworkState& state, PathId path);

/// Path a non-admission-controlled arrival joins: most available bandwidth,
/// then fewest active flows, then lowest id.
PathId least_loaded_path(const NetworkState& state);

class BestEffortScheme final : public Scheme {
public:
    std::string_view name() const override { return "best-effort"; }
    RangePolicy range_policy() const override { return RangePolicy::Capped; }
    ArrivalDecision on_arrival(NetworkState& state, FlowId flow, double now) override;
    void on_departure(NetworkState& state, FlowId flow, double now) override;
};

class CompletePartitioningScheme final : public Scheme {
public:
    explicit CompletePartitioningScheme(PartitionShares shares);

    std::string_view name() const override { return "complete-partitioning"; }
    RangePolicy range_policy() const override { return RangePolicy::Capped; }
    ArrivalDecision on_arrival(NetworkState& state, FlowId flow, double now) override;
    void on_departure(NetworkState& state, FlowId flow, double now) override;

private:
    PartitionShares shares_;
};

class TrunkReservationScheme final : public Scheme {
public:
    explicit TrunkReservationScheme(TrunkReservationConfig config);

    std::string_view name() const override { return "trunk-reservation"; }
    RangePolicy range_policy() const override { return RangePolicy::ElasticUncapped; }
    ArrivalDecision on_arrival(NetworkState& state, FlowId flow, double now) override;
    void on_departure(NetworkState& state, FlowId flow, double now) override;

private:
    TrunkReservationConfig config_;
};

}  // namespace networth
