#pragma once

// Utility curves for the three traffic families and the priority-weighted
// worth metric built on top of them. Bandwidth is always in Mbps.

#include <compare>
#include <string_view>
#include <variant>

namespace networth {

enum class TrafficClass { Elastic, HardRealTime, RealTime };

std::string_view to_string(TrafficClass c);

/// U(b) = 1 - exp(-k * b / scale). `scale` is normally b_max; it is kept
/// separate because some published profiles decouple the two.
struct ElasticUtility {
    double k;
    double b_max;
    double scale;

    bool operator==(const ElasticUtility&) const = default;
};

/// Step function: 1 at or above b_max, 0 below. b_min is b_max.
struct HardRealTimeUtility {
    double b_max;

    bool operator==(const HardRealTimeUtility&) const = default;
};

/// U(b) = 1 - exp(-k1 * b^2 / (k2 + b)), admitted only within [b_min, b_max].
struct RealTimeUtility {
    double k1;
    double k2;
    double b_min;
    double b_max;

    bool operator==(const RealTimeUtility&) const = default;
};

class UtilityFunction {
public:
    using Variant = std::variant<ElasticUtility, HardRealTimeUtility, RealTimeUtility>;

    // Factories validate parameters and throw std::invalid_argument.
    static UtilityFunction elastic(double k, double b_max);
    static UtilityFunction elastic(double k, double b_max, double scale);
    static UtilityFunction hard_real_time(double b_max);
    static UtilityFunction real_time(double k1, double k2, double b_min, double b_max);

    TrafficClass traffic_class() const;
    double b_min() const;
    double b_max() const;
    const Variant& params() const { return v_; }

    bool operator==(const UtilityFunction&) const = default;

private:
    explicit UtilityFunction(Variant v) : v_(v) {}
    Variant v_;
};

/// Utility in [0, 1] at bandwidth b >= 0. Defined above b_max too; callers
/// enforce caps. Throws std::domain_error for negative b.
double evaluate(const UtilityFunction& u, double b);

/// dU/db. The hard-real-time step has derivative 0 everywhere, including
/// at the jump, so greedy allocators never grow such flows incrementally.
double derivative(const UtilityFunction& u, double b);

class PriorityLevel {
public:
    static constexpr int kMin = 1;
    static constexpr int kMax = 4;

    /// Throws std::invalid_argument outside [1, 4].
    explicit PriorityLevel(int level);

    int level() const { return level_; }
    /// 2^level.
    double weight() const { return static_cast<double>(1 << level_); }

    auto operator<=>(const PriorityLevel&) const = default;

private:
    int level_;
};

/// 2^i * u. Throws std::domain_error unless 0 <= u <= 1.
double worth(PriorityLevel i, double utility);

/// 2^i * U'(b).
double marginal_worth(PriorityLevel i, const UtilityFunction& u, double b);

}  // namespace networth
