#include "networth/simulator.hpp"

#include "networth/profiles.hpp"
#include "networth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace networth {

std::string_view to_string(SchemeKind kind)
{
    switch (kind) {
    case SchemeKind::Basmin:
        return "basmin";
    case SchemeKind::BestEffort:
        return "best-effort";
    case SchemeKind::CompletePartitioning:
        return "complete-partitioning";
    case SchemeKind::TrunkReservation:
        return "trunk-reservation";
    }
    return "unknown";
}

std::optional<SchemeKind> parse_scheme_kind(std::string_view name)
{
    for (SchemeKind k : kAllSchemes) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::unique_ptr<Scheme> make_scheme(const SchemeConfig& config)
{
    switch (config.kind) {
    case SchemeKind::Basmin:
        return std::make_unique<BasminScheme>(config.basmin);
    case SchemeKind::BestEffort:
        return std::make_unique<BestEffortScheme>();
    case SchemeKind::CompletePartitioning:
        return std::make_unique<CompletePartitioningScheme>(config.shares);
    case SchemeKind::TrunkReservation:
        return std::make_unique<TrunkReservationScheme>(config.trunk);
    }
    throw std::invalid_argument("unknown scheme");
}

std::string_view to_string(VolumeDistribution d)
{
    switch (d) {
    case VolumeDistribution::ClampedExponential:
        return "clamped-exponential";
    case VolumeDistribution::Uniform:
        return "uniform";
    }
    return "unknown";
}

std::optional<VolumeDistribution> parse_volume_distribution(std::string_view name)
{
    for (auto d : {VolumeDistribution::ClampedExponential, VolumeDistribution::Uniform}) {
        if (to_string(d) == name) {
            return d;
        }
    }
    return std::nullopt;
}

std::map<int, double> default_arrival_rates()
{
    // 2.0 Mbps of offered load at multiplier 1, so a 2 Mbps line is overloaded
    // for any multiplier above 1. Real-time sessions carry close to two thirds.
    return {{1, 0.0124}, {2, 0.000877}, {3, 0.00341}, {4, 0.0646}, {5, 1.92e-05}, {6, 8.62e-05}};
}

ScenarioConfig::ScenarioConfig() : profiles(builtin_profiles()), arrival_rates(default_arrival_rates()) {}

double ScenarioConfig::rate_of(int profile_id) const
{
    auto it = arrival_rates.find(profile_id);
    return it == arrival_rates.end() ? 0.0 : it->second * rate_multiplier;
}

double ScenarioConfig::total_capacity() const
{
    double sum = 0.0;
    for (double c : capacities) {
        sum += c;
    }
    return sum;
}

void ScenarioConfig::validate() const
{
    if (capacities.empty()) {
        throw std::invalid_argument("network: at least one path capacity is required");
    }
    for (double c : capacities) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw std::invalid_argument("network: capacities must be finite and > 0");
        }
    }
    std::set<int> ids;
    for (const auto& p : profiles) {
        p.validate();
        if (!ids.insert(p.id).second) {
            throw std::invalid_argument("profiles: duplicate id " + std::to_string(p.id));
        }
    }
    for (const auto& [id, rate] : arrival_rates) {
        if (!ids.contains(id)) {
            throw std::invalid_argument("arrival_rates: no profile with id " + std::to_string(id));
        }
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("arrival_rates: rates must be finite and >= 0");
        }
    }
    if (!(rate_multiplier >= 0.0) || !std::isfinite(rate_multiplier)) {
        throw std::invalid_argument("rate_multiplier must be finite and >= 0");
    }
    if (!(warmup >= 0.0) || !(horizon > warmup) || !std::isfinite(horizon)) {
        throw std::invalid_argument("need horizon > warmup >= 0");
    }
    scheme.basmin.validate();
    scheme.trunk.validate();
    scheme.shares.validate();
}

std::vector<WorkloadArrival> sample_workload(const ScenarioConfig& config)
{
    struct Draw {
        double time;
        int profile_id;
        double volume;
    };
    std::vector<Draw> draws;
    for (const auto& p : config.profiles) {
        const double rate = config.rate_of(p.id);
        if (rate <= 0.0) {
            continue;
        }
        Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(p.id));
        const double lo = p.volume.low;
        const double hi = p.volume.high;
        double t = 0.0;
        for (;;) {
            t += rng.exponential(rate);
            if (t >= config.horizon) {
                break;
            }
            double v = 0.0;
            if (config.volume_distribution == VolumeDistribution::Uniform) {
                v = rng.uniform(lo, hi);
            } else {
                v = std::clamp(rng.exponential(2.0 / (lo + hi)), lo, hi);
            }
            draws.push_back(Draw{t, p.id, v});
        }
    }
    std::stable_sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
        if (a.time != b.time) {
            return a.time < b.time;
        }
        return a.profile_id < b.profile_id;
    });
    std::vector<WorkloadArrival> out;
    out.reserve(draws.size());
    FlowId next = 1;
    for (const auto& d : draws) {
        out.push_back(WorkloadArrival{next++, d.profile_id, d.time, d.volume});
    }
    return out;
}

std::string_view to_string(EndReason r)
{
    switch (r) {
    case EndReason::Completed:
        return "completed";
    case EndReason::Rejected:
        return "rejected";
    case EndReason::Preempted:
        return "preempted";
    case EndReason::Unfinished:
        return "unfinished";
    }
    return "unknown";
}

double average_connection_worth(const SessionRecord& record)
{
    const double d = record.duration();
    return d > 0.0 ? record.worth_integral / d : 0.0;
}

ProfileCounts& ProfileCounts::operator+=(const ProfileCounts& o)
{
    offered += o.offered;
    accepted += o.accepted;
    rejected += o.rejected;
    preempted += o.preempted;
    completed += o.completed;
    return *this;
}

ProfileCounts SimReport::totals() const
{
    ProfileCounts t;
    for (const auto& [id, c] : counts) {
        t += c;
    }
    return t;
}

void WindowIntegrator::add(double t0, double t1, double value)
{
    const double lo = std::max(t0, window_.begin);
    const double hi = std::min(t1, window_.end);
    if (hi > lo) {
        integral_ += value * (hi - lo);
    }
}

double WindowIntegrator::time_average() const
{
    const double span = window_.end - window_.begin;
    return span > 0.0 ? integral_ / span : 0.0;
}

namespace {

struct LiveFlow {
    double worth_integral = 0.0;
    double utility_integral = 0.0;
    double scheduled_rate = 0.0;
    std::optional<double> departure;
};

class EventLoop {
public:
    EventLoop(const ScenarioConfig& config, Scheme& scheme, const SimOptions& options)
        : config_(config),
          scheme_(scheme),
          options_(options),
          state_(config.capacities),
          worth_(MetricWindow{config.warmup, config.horizon}),
          utilization_(MetricWindow{config.warmup, config.horizon})
    {
        for (const auto& p : config.profiles) {
            profiles_.emplace(p.id, std::make_shared<const TrafficProfile>(p));
            result_.report.counts[p.id];
        }
    }

    SimResult run(const std::vector<WorkloadArrival>& arrivals)
    {
        std::size_t next_arrival = 0;

        for (;;) {
            const bool have_dep = !departures_.empty();
            const bool have_arr = next_arrival < arrivals.size();
            if (!have_dep && !have_arr) {
                break;
            }
            // Departures win ties so that freed capacity is visible to a
            // simultaneous arrival.
            const bool take_departure =
                have_dep && (!have_arr || departures_.begin()->first <= arrivals[next_arrival].time);
            const double t = take_departure ? departures_.begin()->first : arrivals[next_arrival].time;
            if (t > config_.horizon) {
                break;
            }
            advance_to(t);
            if (take_departure) {
                const FlowId id = departures_.begin()->second;
                departures_.erase(departures_.begin());
                live_.at(id).departure.reset();
                depart(id);
            } else {
                arrive(arrivals[next_arrival++]);
            }
            ++result_.report.events;
            reschedule();
            if (options_.check_invariants) {
                check();
            }
        }

        advance_to(config_.horizon);
        std::vector<FlowId> leftover;
        for (const auto& p : state_.paths()) {
            leftover.insert(leftover.end(), state_.active_on(p.id).begin(), state_.active_on(p.id).end());
        }
        std::sort(leftover.begin(), leftover.end());
        for (FlowId id : leftover) {
            state_.close(id, FlowState::Unfinished, config_.horizon);
            finish(id, EndReason::Unfinished);
        }
        summarize();
        return std::move(result_);
    }

private:
    bool in_window(double arrival) const { return arrival >= config_.warmup && arrival < config_.horizon; }

    void advance_to(double t)
    {
        const double dt = t - now_;
        if (dt > 0.0) {
            double total_worth = 0.0;
            double used = 0.0;
            for (const auto& p : state_.paths()) {
                for (FlowId id : state_.active_on(p.id)) {
                    Flow& f = state_.flow(id);
                    LiveFlow& lf = live_.at(id);
                    const double b = f.allocation;
                    const double u = evaluate(f.profile->utility, b);
                    const double w = worth(f.priority(), u);
                    const double moved = b * dt;
                    f.remaining_volume -= moved;
                    f.transferred += moved;
                    lf.worth_integral += w * dt;
                    lf.utility_integral += u * dt;
                    total_worth += w;
                    used += b;
                }
            }
            worth_.add(now_, t, total_worth);
            utilization_.add(now_, t, used / state_.total_capacity());
        }
        now_ = std::max(now_, t);
    }

    void arrive(const WorkloadArrival& a)
    {
        state_.add_flow(a.id, profiles_.at(a.profile_id), a.time, a.volume);
        live_.emplace(a.id, LiveFlow{});
        if (in_window(a.time)) {
            ++result_.report.counts[a.profile_id].offered;
        }

        const ArrivalDecision d = scheme_.on_arrival(state_, a.id, now_);
        for (FlowId victim : d.preempted) {
            finish(victim, EndReason::Preempted);
        }
        if (!d.admitted) {
            finish(a.id, EndReason::Rejected);
        } else if (in_window(a.time)) {
            ++result_.report.counts[a.profile_id].accepted;
        }
    }

    void depart(FlowId id)
    {
        Flow& f = state_.flow(id);
        if (std::abs(f.remaining_volume) > 1e-6 * f.total_volume) {
            std::ostringstream os;
            os << "flow " << id << " departs with " << f.remaining_volume << " Mbit left";
            throw std::logic_error(os.str());
        }
        f.remaining_volume = 0.0;
        scheme_.on_departure(state_, id, now_);
        finish(id, EndReason::Completed);
    }

    void finish(FlowId id, EndReason reason)
    {
        const Flow& f = state_.flow(id);
        LiveFlow& lf = live_.at(id);
        if (lf.departure) {
            departures_.erase({*lf.departure, id});
        }
        SessionRecord r;
        r.flow_id = id;
        r.profile_id = f.profile->id;
        r.path = f.path;
        r.arrival = f.arrival_time;
        r.end = reason == EndReason::Rejected ? f.arrival_time : f.end_time;
        r.reason = reason;
        r.volume = f.total_volume;
        r.transferred = f.transferred;
        r.worth_integral = lf.worth_integral;
        r.utility_integral = lf.utility_integral;

        if (in_window(r.arrival)) {
            ProfileCounts& c = result_.report.counts[r.profile_id];
            if (reason == EndReason::Rejected) {
                ++c.rejected;
            } else {
                if (reason == EndReason::Preempted) {
                    ++c.preempted;
                } else if (reason == EndReason::Completed) {
                    ++c.completed;
                }
                if (r.duration() > 0.0) {
                    connection_worth_sum_ += average_connection_worth(r);
                    ++connection_worth_n_;
                }
            }
        }
        if (options_.keep_sessions) {
            result_.sessions.push_back(r);
        }
        live_.erase(id);
        state_.forget(id);
    }

    void reschedule()
    {
        for (const auto& p : state_.paths()) {
            for (FlowId id : state_.active_on(p.id)) {
                const Flow& f = state_.flow(id);
                LiveFlow& lf = live_.at(id);
                if (lf.scheduled_rate == f.allocation && (lf.departure.has_value() == (f.allocation > 0.0))) {
                    continue;
                }
                if (lf.departure) {
                    departures_.erase({*lf.departure, id});
                    lf.departure.reset();
                }
                lf.scheduled_rate = f.allocation;
                if (f.allocation > 0.0) {
                    const double t = now_ + std::max(f.remaining_volume, 0.0) / f.allocation;
                    lf.departure = t;
                    departures_.emplace(t, id);
                }
            }
        }
    }

    void check() const
    {
        const auto violations = validate(state_, scheme_.range_policy());
        if (!violations.empty()) {
            std::ostringstream os;
            os << scheme_.name() << " at t=" << now_ << ":";
            for (const auto& v : violations) {
                os << ' ' << v.message << ';';
            }
            throw std::logic_error(os.str());
        }
        std::size_t scheduled = 0;
        for (const auto& p : state_.paths()) {
            for (FlowId id : state_.active_on(p.id)) {
                const Flow& f = state_.flow(id);
                const LiveFlow& lf = live_.at(id);
                if (f.allocation > 0.0) {
                    const double expected = now_ + std::max(f.remaining_volume, 0.0) / f.allocation;
                    if (!lf.departure ||
                        std::abs(*lf.departure - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
                        throw std::logic_error("stale departure time for flow " + std::to_string(id));
                    }
                    ++scheduled;
                } else if (lf.departure) {
                    throw std::logic_error("departure scheduled for idle flow " + std::to_string(id));
                }
            }
        }
        if (scheduled != departures_.size()) {
            throw std::logic_error("departure queue holds events of inactive flows");
        }
    }

    void summarize()
    {
        SimReport& r = result_.report;
        r.time_avg_total_worth = worth_.time_average();
        r.mean_link_utilization = utilization_.time_average();
        r.mean_connection_worth =
            connection_worth_n_ > 0 ? connection_worth_sum_ / static_cast<double>(connection_worth_n_) : 0.0;
        r.sessions_in_mean = connection_worth_n_;
        r.config = config_;
        std::stable_sort(result_.sessions.begin(), result_.sessions.end(),
                         [](const SessionRecord& a, const SessionRecord& b) {
                             if (a.end != b.end) {
                                 return a.end < b.end;
                             }
                             return a.flow_id < b.flow_id;
                         });
    }

    const ScenarioConfig& config_;
    Scheme& scheme_;
    SimOptions options_;
    NetworkState state_;
    std::map<int, ProfilePtr> profiles_;
    std::unordered_map<FlowId, LiveFlow> live_;
    std::set<std::pair<double, FlowId>> departures_;
    double now_ = 0.0;
    WindowIntegrator worth_;
    WindowIntegrator utilization_;
    double connection_worth_sum_ = 0.0;
    std::uint64_t connection_worth_n_ = 0;
    SimResult result_;
};

}  // namespace

SimResult run(const ScenarioConfig& config, const SimOptions& options)
{
    config.validate();
    auto scheme = make_scheme(config.scheme);
    return run(config, *scheme, options);
}

SimResult run(const ScenarioConfig& config, Scheme& scheme, const SimOptions& options)
{
    config.validate();
    EventLoop loop(config, scheme, options);
    return loop.run(sample_workload(config));
}

SimResult run(const ScenarioConfig& config, Scheme& scheme, const std::vector<WorkloadArrival>& arrivals,
              const SimOptions& options)
{
    config.validate();
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        const auto& a = arrivals[i];
        const bool known = std::any_of(config.profiles.begin(), config.profiles.end(),
                                       [&](const TrafficProfile& p) { return p.id == a.profile_id; });
        if (!known || !(a.volume > 0.0) || !(a.time >= 0.0)) {
            throw std::invalid_argument("workload entry " + std::to_string(i) + " is malformed");
        }
        if (i > 0 && (a.time < arrivals[i - 1].time || a.id <= arrivals[i - 1].id)) {
            throw std::invalid_argument("workload must be ordered by time with increasing ids");
        }
    }
    EventLoop loop(config, scheme, options);
    return loop.run(arrivals);
}

}  // namespace networth
