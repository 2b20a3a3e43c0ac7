#pragma once

// Small builders shared by the test files.

#include "networth/network.hpp"
#include "networth/profiles.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fixture {

using namespace networth;

inline ProfilePtr profile(int id, UtilityFunction u, int priority, std::string label = "test")
{
    return std::make_shared<const TrafficProfile>(
        TrafficProfile{id, std::move(u), PriorityLevel(priority), VolumeRange{1.0, 10.0}, std::move(label)});
}

/// The built-in table keyed by profile id.
inline const std::map<int, ProfilePtr>& builtin()
{
    static const std::map<int, ProfilePtr> table = [] {
        std::map<int, ProfilePtr> out;
        for (const auto& p : builtin_profiles()) {
            out.emplace(p.id, std::make_shared<const TrafficProfile>(p));
        }
        return out;
    }();
    return table;
}

inline ProfilePtr hrt(double b_max, int priority) { return profile(100, UtilityFunction::hard_real_time(b_max), priority); }
inline ProfilePtr rt(int priority) { return profile(101, UtilityFunction::real_time(1.045, 2.166, 1.0, 4.0), priority); }
inline ProfilePtr elastic(double b_max, int priority) { return profile(102, UtilityFunction::elastic(4.6, b_max), priority); }

/// Builds a state incrementally; ids count up from 1.
class StateBuilder {
public:
    explicit StateBuilder(std::vector<double> capacities) : state_(capacities) {}

    /// Adds an Active flow with the given allocation.
    FlowId active(ProfilePtr p, PathId path, double allocation, double volume = 100.0)
    {
        const FlowId id = next_++;
        state_.add_flow(id, std::move(p), 0.0, volume);
        state_.activate(id, path, allocation);
        return id;
    }

    /// Adds a Pending flow.
    FlowId pending(ProfilePtr p, double volume = 100.0, double time = 0.0)
    {
        const FlowId id = next_++;
        state_.add_flow(id, std::move(p), time, volume);
        return id;
    }

    NetworkState& state() { return state_; }

private:
    NetworkState state_;
    FlowId next_ = 1;
};

}  // namespace fixture
