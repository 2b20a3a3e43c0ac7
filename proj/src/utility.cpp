#include "networth/utility.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace networth {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
    }
}

void require_bandwidth(double b)
{
    if (!(b >= 0.0)) {
        throw std::domain_error("bandwidth must be >= 0, got " + std::to_string(b));
    }
}

}  // namespace

std::string_view to_string(TrafficClass c)
{
    switch (c) {
    case TrafficClass::Elastic:
        return "elastic";
    case TrafficClass::HardRealTime:
        return "hard-real-time";
    case TrafficClass::RealTime:
        return "real-time";
    }
    return "unknown";
}

UtilityFunction UtilityFunction::elastic(double k, double b_max)
{
    return elastic(k, b_max, b_max);
}

UtilityFunction UtilityFunction::elastic(double k, double b_max, double scale)
{
    require_positive(k, "elastic k");
    require_positive(b_max, "elastic b_max");
    require_positive(scale, "elastic scale");
    return UtilityFunction(ElasticUtility{k, b_max, scale});
}

UtilityFunction UtilityFunction::hard_real_time(double b_max)
{
    require_positive(b_max, "hard-real-time b_max");
    return UtilityFunction(HardRealTimeUtility{b_max});
}

UtilityFunction UtilityFunction::real_time(double k1, double k2, double b_min, double b_max)
{
    require_positive(k1, "real-time k1");
    require_positive(k2, "real-time k2");
    require_positive(b_min, "real-time b_min");
    require_positive(b_max, "real-time b_max");
    if (b_min > b_max) {
        throw std::invalid_argument("real-time b_min must not exceed b_max");
    }
    return UtilityFunction(RealTimeUtility{k1, k2, b_min, b_max});
}

TrafficClass UtilityFunction::traffic_class() const
{
    return std::visit(overloaded{
                          [](const ElasticUtility&) { return TrafficClass::Elastic; },
                          [](const HardRealTimeUtility&) { return TrafficClass::HardRealTime; },
                          [](const RealTimeUtility&) { return TrafficClass::RealTime; },
                      },
                      v_);
}

double UtilityFunction::b_min() const
{
    return std::visit(overloaded{
                          [](const ElasticUtility&) { return 0.0; },
                          [](const HardRealTimeUtility& h) { return h.b_max; },
                          [](const RealTimeUtility& r) { return r.b_min; },
                      },
                      v_);
}

double UtilityFunction::b_max() const
{
    return std::visit([](const auto& p) { return p.b_max; }, v_);
}

double evaluate(const UtilityFunction& u, double b)
{
    require_bandwidth(b);
    return std::visit(overloaded{
                          [b](const ElasticUtility& e) { return -std::expm1(-e.k * b / e.scale); },
                          [b](const HardRealTimeUtility& h) { return b >= h.b_max ? 1.0 : 0.0; },
                          [b](const RealTimeUtility& r) {
                              return -std::expm1(-r.k1 * b * b / (r.k2 + b));
                          },
                      },
                      u.params());
}

double derivative(const UtilityFunction& u, double b)
{
    require_bandwidth(b);
    return std::visit(overloaded{
                          [b](const ElasticUtility& e) {
                              return (e.k / e.scale) * std::exp(-e.k * b / e.scale);
                          },
                          [](const HardRealTimeUtility&) { return 0.0; },
                          [b](const RealTimeUtility& r) {
                              const double denom = r.k2 + b;
                              return std::exp(-r.k1 * b * b / denom) * r.k1 * (b * b + 2.0 * r.k2 * b) /
                                     (denom * denom);
                          },
                      },
                      u.params());
}

PriorityLevel::PriorityLevel(int level) : level_(level)
{
    if (level < kMin || level > kMax) {
        throw std::invalid_argument("priority level must be in [1, 4], got " + std::to_string(level));
    }
}

double worth(PriorityLevel i, double utility)
{
    if (!(utility >= 0.0 && utility <= 1.0)) {
        throw std::domain_error("utility must lie in [0, 1], got " + std::to_string(utility));
    }
    return i.weight() * utility;
}

double marginal_worth(PriorityLevel i, const UtilityFunction& u, double b)
{
    return i.weight() * derivative(u, b);
}

}  // namespace networth
