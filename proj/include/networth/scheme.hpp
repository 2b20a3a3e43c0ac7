#pragma once

#include "networth/network.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace networth {

struct ArrivalDecision {
    bool admitted = false;
    std::optional<PathId> path;
    std::vector<FlowId> preempted;
    /// Change in worth on the chosen path caused by the arrival.
    double worth_increment = 0.0;
};

/// Common contract for allocation schemes driven by the simulator. A scheme
/// owns every allocation decision; the simulator only drains volumes and
/// keeps time.
class Scheme {
public:
    virtual ~Scheme() = default;

    virtual std::string_view name() const = 0;
    /// Range constraints this scheme promises to keep.
    virtual RangePolicy range_policy() const = 0;

    /// `flow` is Pending in `state`. On return it is Active or Rejected, and
    /// any preempted flows are closed.
    virtual ArrivalDecision on_arrival(NetworkState& state, FlowId flow, double now) = 0;

    /// `flow` is Active and has drained its volume. On return it is
    /// Completed and the freed bandwidth has been redistributed.
    virtual void on_departure(NetworkState& state, FlowId flow, double now) = 0;
};

}  // namespace networth
