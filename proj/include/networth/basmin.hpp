#pragma once

// Utility-driven allocation with admission control, preemption of
// lower-priority sessions, best-path selection and greedy per-path load
// balancing.
//
// An arrival goes through three stages:
//   1. admission: real-time and hard-real-time requests must fit at their
//      minimum, either directly or after squeezing every flow of lower
//      priority weight out of the way; elastic requests skip this stage;
//   2. path evaluation: every path is tried without mutating the state and
//      scored by the worth increment it would yield;
//   3. commit: the best path's proposal is applied, including preemptions.
//
// Bandwidth on a path is always distributed by `load_balance`: minima first,
// then increments of size delta to whichever flow gains the most worth per
// Mbps from its next increment.

#include "networth/network.hpp"
#include "networth/scheme.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace networth {

/// How the greedy loop ranks candidate increments.
enum class GreedyKey {
    /// 2^i * (U(x + step) - U(x)) / step: exact worth gained per Mbps by the
    /// next increment.
    ForwardDifference,
    /// 2^i * U'(x): the local slope.
    Derivative,
};

struct BasminConfig {
    double delta = 0.01;  // Mbps
    std::size_t max_iterations = 50'000'000;
    GreedyKey greedy_key = GreedyKey::ForwardDifference;

    /// Throws std::invalid_argument if delta <= 0 or max_iterations == 0.
    void validate() const;
};

using Allocation = std::map<FlowId, double>;

struct LoadBalanceItem {
    FlowId id;
    PriorityLevel priority;
    UtilityFunction utility;
    double floor;  // b_max for HRT, b_min for RT, 0 for elastic
    double cap;    // b_max
};

/// Item for an existing or prospective flow with its class-dependent floor.
LoadBalanceItem load_balance_item(const Flow& flow);

/// Greedy worth-maximizing split of `capacity` among `flows`. Every flow
/// starts at its floor; the remainder is handed out in steps of
/// min(delta, room to cap, remaining capacity), each step going to the flow
/// with the largest key (ties: lowest id). A final remainder below delta
/// goes to the best next increment, unless letting some flow give back its
/// last step (its freed share buying full steps elsewhere, the rest staying
/// with it) yields more worth; that search is done for the forward-difference
/// key only. Throws ContractViolation if the floors alone exceed the capacity.
Allocation load_balance(double capacity, std::span<const LoadBalanceItem> flows, const BasminConfig& config);

/// Least bandwidth a flow can be squeezed to: b_max for HRT, b_min for RT,
/// delta for elastic.
double squeezed_minimum(const Flow& flow, double delta);

/// Bandwidth that would be free on `path` if every active flow with lower
/// priority weight than `new_flow` were preempted and the rest squeezed.
double hypothetical_available(const NetworkState& state, PathId path, const Flow& new_flow, double delta);

enum class Admission { Admit, Reject };

Admission admission_check(const NetworkState& state, const Flow& new_flow, const BasminConfig& config);

struct PathCandidate {
    PathId path = 0;
    bool feasible = false;
    /// Final allocation for the survivors and the new flow.
    Allocation proposed;
    std::vector<FlowId> preempted;
    /// Proposed worth minus the path's current worth.
    double worth_increment = 0.0;
};

/// Trial placement of `new_flow` on `path`; never mutates `state`.
PathCandidate evaluate_path(const NetworkState& state, PathId path, const Flow& new_flow, const BasminConfig& config);

/// Feasible candidate with the largest worth increment (ties: lowest path id).
std::optional<PathId> select_path(std::span<const PathCandidate> candidates);

ArrivalDecision handle_arrival(NetworkState& state, FlowId flow, const BasminConfig& config, double now);

/// Completes `flow` and re-balances the remaining flows on its path only.
void handle_departure(NetworkState& state, FlowId flow, const BasminConfig& config, double now);

/// Re-runs load_balance over the active flows of one path and applies it.
void rebalance_path(NetworkState& state, PathId path, const BasminConfig& config);

class BasminScheme final : public Scheme {
public:
    explicit BasminScheme(BasminConfig config);

    std::string_view name() const override { return "basmin"; }
    RangePolicy range_policy() const override { return RangePolicy::Strict; }
    ArrivalDecision on_arrival(NetworkState& state, FlowId flow, double now) override;
    void on_departure(NetworkState& state, FlowId flow, double now) override;

    const BasminConfig& config() const { return config_; }

private:
    BasminConfig config_;
};

}  // namespace networth
