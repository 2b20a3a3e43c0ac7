#include "networth/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace networth {

namespace {

constexpr double kTol = kBandwidthTolerance;

std::vector<FlowBounds> bounds_on(const NetworkState& state, PathId path)
{
    std::vector<FlowBounds> out;
    for (FlowId id : state.active_on(path)) {
        out.push_back(flow_bounds(state.flow(id)));
    }
    return out;
}

void commit_allocation(NetworkState& state, const Allocation& alloc)
{
    for (const auto& [id, x] : alloc) {
        state.set_allocation(id, x);
    }
}

void complete_and_reallocate(NetworkState& state, FlowId id, double now,
                             const std::function<Allocation(double, std::span<const FlowBounds>)>& alloc)
{
    const Flow& f = state.flow(id);
    if (f.state != FlowState::Active || !f.path) {
        throw std::logic_error("departure of inactive flow " + std::to_string(id));
    }
    const PathId path = *f.path;
    state.close(id, FlowState::Completed, now);
    const auto bounds = bounds_on(state, path);
    commit_allocation(state, alloc(state.path(path).capacity, bounds));
}

}  // namespace

Allocation bounded_max_min(double capacity, std::span<const ShareItem> flows)
{
    Allocation out;
    if (flows.empty()) {
        return out;
    }

    double sum_floor = 0.0;
    double sum_cap = 0.0;
    for (const auto& f : flows) {
        if (!(f.floor >= 0.0) || f.cap < f.floor) {
            throw std::invalid_argument("flow " + std::to_string(f.id) + ": need 0 <= floor <= cap");
        }
        sum_floor += f.floor;
        sum_cap += f.cap;
    }
    if (sum_floor > capacity + kTol) {
        throw ContractViolation("bounded_max_min: floors exceed capacity");
    }
    if (sum_cap <= capacity) {
        for (const auto& f : flows) {
            out.emplace(f.id, f.cap);
        }
        return out;
    }

    // S(level) = sum clamp(level, floor, cap) is piecewise linear; its slope
    // rises by one at every floor and falls by one at every finite cap.
    std::vector<std::pair<double, int>> events;
    events.reserve(2 * flows.size());
    for (const auto& f : flows) {
        events.emplace_back(f.floor, +1);
        if (std::isfinite(f.cap)) {
            events.emplace_back(f.cap, -1);
        }
    }
    std::sort(events.begin(), events.end());

    double level = events.front().first;
    double s = sum_floor;
    int slope = 0;
    std::size_t k = 0;
    for (;;) {
        const double at = events[k].first;
        while (k < events.size() && events[k].first == at) {
            slope += events[k].second;
            ++k;
        }
        level = at;
        if (s >= capacity) {
            break;
        }
        const double next = k < events.size() ? events[k].first : std::numeric_limits<double>::infinity();
        if (slope > 0) {
            const double s_next = s + slope * (next - at);
            if (s_next >= capacity) {
                level = at + (capacity - s) / slope;
                break;
            }
            s = s_next;
        }
        if (k == events.size()) {
            break;
        }
    }

    for (const auto& f : flows) {
        out.emplace(f.id, std::clamp(level, f.floor, f.cap));
    }
    return out;
}

FlowBounds flow_bounds(const Flow& flow)
{
    return FlowBounds{flow.id, flow.traffic_class(), flow.b_min(), flow.b_max()};
}

Allocation best_effort_allocate(double capacity, std::span<const FlowBounds> flows)
{
    std::vector<ShareItem> items;
    items.reserve(flows.size());
    for (const auto& f : flows) {
        items.push_back(ShareItem{f.id, 0.0, f.b_max});
    }
    return bounded_max_min(capacity, items);
}

double PartitionShares::of(TrafficClass c) const
{
    switch (c) {
    case TrafficClass::HardRealTime:
        return hrt;
    case TrafficClass::RealTime:
        return rt;
    case TrafficClass::Elastic:
        return elastic;
    }
    return 0.0;
}

void PartitionShares::validate() const
{
    if (!(hrt >= 0.0 && rt >= 0.0 && elastic >= 0.0)) {
        throw std::invalid_argument("shares must be >= 0");
    }
    if (std::abs(hrt + rt + elastic - 1.0) > 1e-9) {
        throw std::invalid_argument("shares must sum to 1");
    }
}

Allocation complete_partitioning_allocate(double capacity, std::span<const FlowBounds> flows,
                                          const PartitionShares& shares)
{
    Allocation out;
    for (TrafficClass c : {TrafficClass::HardRealTime, TrafficClass::RealTime, TrafficClass::Elastic}) {
        std::vector<FlowBounds> members;
        for (const auto& f : flows) {
            if (f.traffic_class == c) {
                members.push_back(f);
            }
        }
        const Allocation part = best_effort_allocate(shares.of(c) * capacity, members);
        out.insert(part.begin(), part.end());
    }
    return out;
}

void TrunkReservationConfig::validate() const
{
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("eta must lie in [0, 1]");
    }
}

Allocation trunk_reservation_allocate(double capacity, std::span<const FlowBounds> flows)
{
    Allocation out;
    double rest = capacity;
    std::vector<ShareItem> shared;
    for (const auto& f : flows) {
        switch (f.traffic_class) {
        case TrafficClass::HardRealTime:
            out.emplace(f.id, f.b_max);
            rest -= f.b_max;
            break;
        case TrafficClass::RealTime:
            shared.push_back(ShareItem{f.id, f.b_min, f.b_max});
            break;
        case TrafficClass::Elastic:
            shared.push_back(ShareItem{f.id, 0.0, std::numeric_limits<double>::infinity()});
            break;
        }
    }
    if (rest < -kTol) {
        throw ContractViolation("trunk reservation: hard-real-time flows exceed capacity");
    }
    const Allocation part = bounded_max_min(std::max(rest, 0.0), shared);
    out.insert(part.begin(), part.end());
    return out;
}

std::optional<double> mean_real_time_utility(const NetworkState& state, PathId path)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (FlowId id : state.active_on(path)) {
        const Flow& f = state.flow(id);
        if (f.traffic_class() == TrafficClass::RealTime) {
            sum += evaluate(f.profile->utility, f.allocation);
            ++n;
        }
    }
    if (n == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(n);
}

double reserved_headroom(const NetworkState& state, PathId path)
{
    double reserved = 0.0;
    for (FlowId id : state.active_on(path)) {
        const Flow& f = state.flow(id);
        if (f.traffic_class() != TrafficClass::Elastic) {
            reserved += f.b_min();
        }
    }
    return state.path(path).capacity - reserved;
}

bool trunk_reservation_admits(const NetworkState& state, PathId path, const Flow& new_flow,
                              const TrunkReservationConfig& config)
{
    if (new_flow.traffic_class() == TrafficClass::Elastic) {
        const auto u = mean_real_time_utility(state, path);
        return !u || *u >= config.eta;
    }
    return reserved_headroom(state, path) >= new_flow.b_min() - kTol;
}

PathId least_loaded_path(const NetworkState& state)
{
    PathId best = 0;
    double best_avail = -1.0;
    std::size_t best_count = 0;
    for (const auto& p : state.paths()) {
        const double a = available_bandwidth(state, p.id);
        const std::size_t n = state.active_on(p.id).size();
        if (a > best_avail || (a == best_avail && n < best_count)) {
            best = p.id;
            best_avail = a;
            best_count = n;
        }
    }
    return best;
}

ArrivalDecision BestEffortScheme::on_arrival(NetworkState& state, FlowId id, double /*now*/)
{
    const PathId path = least_loaded_path(state);
    state.activate(id, path, 0.0);
    commit_allocation(state, best_effort_allocate(state.path(path).capacity, bounds_on(state, path)));
    return ArrivalDecision{true, path, {}, 0.0};
}

void BestEffortScheme::on_departure(NetworkState& state, FlowId id, double now)
{
    complete_and_reallocate(state, id, now, [](double c, std::span<const FlowBounds> b) {
        return best_effort_allocate(c, b);
    });
}

CompletePartitioningScheme::CompletePartitioningScheme(PartitionShares shares) : shares_(shares)
{
    shares_.validate();
}

ArrivalDecision CompletePartitioningScheme::on_arrival(NetworkState& state, FlowId id, double /*now*/)
{
    const PathId path = least_loaded_path(state);
    state.activate(id, path, 0.0);
    commit_allocation(state, complete_partitioning_allocate(state.path(path).capacity, bounds_on(state, path), shares_));
    return ArrivalDecision{true, path, {}, 0.0};
}

void CompletePartitioningScheme::on_departure(NetworkState& state, FlowId id, double now)
{
    complete_and_reallocate(state, id, now, [this](double c, std::span<const FlowBounds> b) {
        return complete_partitioning_allocate(c, b, shares_);
    });
}

TrunkReservationScheme::TrunkReservationScheme(TrunkReservationConfig config) : config_(config)
{
    config_.validate();
}

ArrivalDecision TrunkReservationScheme::on_arrival(NetworkState& state, FlowId id, double now)
{
    const Flow& flow = state.flow(id);
    std::optional<PathId> chosen;
    double best_headroom = 0.0;
    for (const auto& p : state.paths()) {
        if (!trunk_reservation_admits(state, p.id, flow, config_)) {
            continue;
        }
        const double h = reserved_headroom(state, p.id);
        if (!chosen || h > best_headroom) {
            chosen = p.id;
            best_headroom = h;
        }
    }
    if (!chosen) {
        state.reject(id, now);
        return ArrivalDecision{};
    }
    state.activate(id, *chosen, 0.0);
    commit_allocation(state, trunk_reservation_allocate(state.path(*chosen).capacity, bounds_on(state, *chosen)));
    return ArrivalDecision{true, chosen, {}, 0.0};
}

void TrunkReservationScheme::on_departure(NetworkState& state, FlowId id, double now)
{
    complete_and_reallocate(state, id, now, [](double c, std::span<const FlowBounds> b) {
        return trunk_reservation_allocate(c, b);
    });
}

}  // namespace networth
