#pragma once

// Scenario and sweep files. The format is YAML; docs/scenario-format.md
// lists every key. Unknown keys are rejected.

#include "networth/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace networth {

/// Parse or validation failure; `what()` names the line and field.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Full YAML rendering of a scenario, defaults included. parse_scenario of
/// the result yields an equal configuration.
std::string dump_scenario(const ScenarioConfig& config);

enum class SweptParameter { TotalCapacity, ArrivalRateMultiplier };

std::string_view to_string(SweptParameter p);

struct SweepSpec {
    SweptParameter parameter = SweptParameter::ArrivalRateMultiplier;
    std::vector<double> values;
    std::uint32_t replications = 5;
    std::vector<SchemeKind> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    ScenarioConfig base;

    /// Throws ScenarioError.
    void validate() const;
};

SweepSpec parse_sweep(std::string_view text);
SweepSpec load_sweep(const std::filesystem::path& file);

/// Base scenario with one grid value applied. A capacity value is the total
/// over all paths; per-path capacities keep their proportions.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweptParameter p, double value);

/// Seed of replication r (0-based).
inline std::uint64_t replication_seed(const ScenarioConfig& base, std::uint32_t r) { return base.seed + r; }

}  // namespace networth
