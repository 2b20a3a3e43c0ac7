#include "networth/network.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace networth {

void TrafficProfile::validate() const
{
    if (!(volume.low > 0.0) || !(volume.low <= volume.high)) {
        throw std::invalid_argument("profile " + std::to_string(id) +
                                    ": volume range must satisfy 0 < low <= high");
    }
}

std::string_view to_string(FlowState s)
{
    switch (s) {
    case FlowState::Pending:
        return "pending";
    case FlowState::Active:
        return "active";
    case FlowState::Completed:
        return "completed";
    case FlowState::Rejected:
        return "rejected";
    case FlowState::Preempted:
        return "preempted";
    case FlowState::Unfinished:
        return "unfinished";
    }
    return "unknown";
}

double Flow::current_worth() const
{
    if (state != FlowState::Active) {
        return 0.0;
    }
    return worth(priority(), evaluate(profile->utility, allocation));
}

NetworkState::NetworkState(const std::vector<double>& capacities)
{
    if (capacities.empty()) {
        throw std::invalid_argument("network needs at least one path");
    }
    for (PathId i = 0; i < capacities.size(); ++i) {
        if (!(capacities[i] > 0.0) || !std::isfinite(capacities[i])) {
            throw std::invalid_argument("path capacity must be finite and > 0");
        }
        paths_.push_back(Path{i, capacities[i]});
    }
    active_.resize(paths_.size());
}

const Path& NetworkState::path(PathId id) const
{
    if (id >= paths_.size()) {
        throw std::out_of_range("unknown path id " + std::to_string(id));
    }
    return paths_[id];
}

double NetworkState::total_capacity() const
{
    double sum = 0.0;
    for (const auto& p : paths_) {
        sum += p.capacity;
    }
    return sum;
}

Flow& NetworkState::add_flow(FlowId id, ProfilePtr profile, double arrival_time, double volume)
{
    if (last_id_ && id <= *last_id_) {
        throw std::invalid_argument("flow ids must be strictly increasing");
    }
    if (!profile) {
        throw std::invalid_argument("flow needs a profile");
    }
    if (!(volume > 0.0)) {
        throw std::invalid_argument("flow volume must be > 0");
    }
    last_id_ = id;
    Flow f;
    f.id = id;
    f.profile = std::move(profile);
    f.arrival_time = arrival_time;
    f.total_volume = volume;
    f.remaining_volume = volume;
    return flows_.emplace(id, std::move(f)).first->second;
}

Flow& NetworkState::flow(FlowId id)
{
    auto it = flows_.find(id);
    if (it == flows_.end()) {
        throw std::out_of_range("unknown flow id " + std::to_string(id));
    }
    return it->second;
}

const Flow& NetworkState::flow(FlowId id) const
{
    auto it = flows_.find(id);
    if (it == flows_.end()) {
        throw std::out_of_range("unknown flow id " + std::to_string(id));
    }
    return it->second;
}

const std::set<FlowId>& NetworkState::active_on(PathId id) const
{
    path(id);
    return active_[id];
}

std::size_t NetworkState::active_count() const
{
    std::size_t n = 0;
    for (const auto& s : active_) {
        n += s.size();
    }
    return n;
}

void NetworkState::transition(Flow& f, FlowState next)
{
    const bool ok = (f.state == FlowState::Pending &&
                     (next == FlowState::Active || next == FlowState::Rejected)) ||
                    (f.state == FlowState::Active &&
                     (next == FlowState::Completed || next == FlowState::Preempted ||
                      next == FlowState::Unfinished));
    if (!ok) {
        std::ostringstream os;
        os << "flow " << f.id << ": illegal transition " << to_string(f.state) << " -> "
           << to_string(next);
        throw std::logic_error(os.str());
    }
    f.state = next;
}

void NetworkState::activate(FlowId id, PathId p, double allocation)
{
    path(p);
    Flow& f = flow(id);
    transition(f, FlowState::Active);
    f.path = p;
    f.allocation = allocation;
    active_[p].insert(id);
}

void NetworkState::set_allocation(FlowId id, double allocation)
{
    Flow& f = flow(id);
    if (f.state != FlowState::Active) {
        throw std::logic_error("allocation change on inactive flow " + std::to_string(id));
    }
    if (!(allocation >= 0.0)) {
        throw std::invalid_argument("allocation must be >= 0");
    }
    f.allocation = allocation;
}

void NetworkState::reject(FlowId id, double time)
{
    Flow& f = flow(id);
    transition(f, FlowState::Rejected);
    f.end_time = time;
}

void NetworkState::close(FlowId id, FlowState end, double time)
{
    Flow& f = flow(id);
    const auto p = f.path;
    transition(f, end);
    if (p) {
        active_[*p].erase(id);
    }
    f.allocation = 0.0;
    f.end_time = time;
    if (end == FlowState::Completed) {
        f.remaining_volume = 0.0;
    }
}

void NetworkState::forget(FlowId id)
{
    const Flow& f = flow(id);
    if (f.state == FlowState::Pending || f.state == FlowState::Active) {
        throw std::logic_error("cannot forget live flow " + std::to_string(id));
    }
    flows_.erase(id);
}

double consumed_bandwidth(const NetworkState& state, PathId path)
{
    double sum = 0.0;
    for (FlowId id : state.active_on(path)) {
        sum += state.flow(id).allocation;
    }
    return sum;
}

double available_bandwidth(const NetworkState& state, PathId path)
{
    const double a = state.path(path).capacity - consumed_bandwidth(state, path);
    return a > 0.0 ? a : 0.0;
}

double path_worth(const NetworkState& state, PathId path)
{
    double sum = 0.0;
    for (FlowId id : state.active_on(path)) {
        sum += state.flow(id).current_worth();
    }
    return sum;
}

double total_worth(const NetworkState& state)
{
    double sum = 0.0;
    for (const auto& p : state.paths()) {
        sum += path_worth(state, p.id);
    }
    return sum;
}

std::vector<Violation> validate(const NetworkState& state, RangePolicy policy)
{
    std::vector<Violation> out;
    constexpr double tol = kBandwidthTolerance;

    for (const auto& p : state.paths()) {
        const double used = consumed_bandwidth(state, p.id);
        if (used > p.capacity + tol) {
            std::ostringstream os;
            os << "path " << p.id << " carries " << used << " Mbps over capacity " << p.capacity;
            out.push_back({Violation::Kind::Capacity, std::nullopt, p.id, os.str()});
        }
        for (FlowId id : state.active_on(p.id)) {
            const Flow& f = state.flow(id);
            if (f.state != FlowState::Active || f.path != p.id) {
                out.push_back({Violation::Kind::Placement, id, p.id,
                               "flow " + std::to_string(id) + " indexed on path " +
                                   std::to_string(p.id) + " but not active there"});
            }
        }
    }

    for (const auto& [id, f] : state.flows()) {
        if (f.state != FlowState::Active) {
            continue;
        }
        if (!f.path || !state.active_on(*f.path).contains(id)) {
            out.push_back({Violation::Kind::Placement, id, f.path,
                           "active flow " + std::to_string(id) + " is not placed on a path"});
            continue;
        }
        double lo = 0.0;
        double hi = f.b_max();
        if (policy != RangePolicy::Capped) {
            lo = f.b_min();
            if (policy == RangePolicy::ElasticUncapped && f.traffic_class() == TrafficClass::Elastic) {
                hi = std::numeric_limits<double>::infinity();
            }
        }
        if (f.allocation < lo - tol || f.allocation > hi + tol) {
            std::ostringstream os;
            os << "flow " << id << " (" << to_string(f.traffic_class()) << ") allocated "
               << f.allocation << " Mbps outside [" << lo << ", " << hi << "]";
            out.push_back({Violation::Kind::Range, id, f.path, os.str()});
        }
        if (f.remaining_volume < -tol || f.remaining_volume > f.total_volume + tol) {
            out.push_back({Violation::Kind::Range, id, f.path,
                           "flow " + std::to_string(id) + " remaining volume out of range"});
        }
    }
    return out;
}

}  // namespace networth
