#pragma once

// Reference computations used only by tests. None of them call into the
// allocation code they are compared against.

#include "networth/utility.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Central difference with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Closed forms written out independently of the library.
inline double elastic_value(double k, double scale, double b) { return 1.0 - std::exp(-k * b / scale); }
inline double real_time_value(double k1, double k2, double b) { return 1.0 - std::exp(-k1 * b * b / (k2 + b)); }

struct DpFlow {
    int priority;                       // 1..4
    networth::UtilityFunction utility;  // evaluated with networth::evaluate
    double floor;
    double cap;
};

/// Best total worth over allocations where each flow sits on its grid
/// floor + k*delta (or exactly at its cap), except that one flow may also
/// absorb whatever capacity the grid leaves unused, up to its cap. This is
/// the set of allocations a delta-step greedy can produce, searched
/// exhaustively by dynamic programming.
///
/// Grid positions are counted in units of delta. A cap that is not on the
/// grid adds a fractional "tail" of cap - (floor + k_max*delta); the DP
/// state tracks which flows sit at such a tail so the fractional parts are
/// summed exactly.
class GridDp {
public:
    GridDp(double capacity, std::vector<DpFlow> flows, double delta)
        : capacity_(capacity), flows_(std::move(flows)), delta_(delta)
    {
    }

    double solve() const
    {
        double fixed = 0.0;
        for (const auto& f : flows_) {
            fixed += f.floor;
        }
        if (fixed > capacity_ + 1e-12) {
            return -std::numeric_limits<double>::infinity();
        }
        if (flows_.empty()) {
            return 0.0;
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < flows_.size(); ++r) {
            best = std::max(best, solve_with_receiver(r, fixed));
        }
        return best;
    }

private:
    struct Choice {
        long units;  // full delta steps above the floor
        double tail;  // extra fraction when the choice is a cap off the grid
        double worth;
    };

    std::vector<Choice> choices(const DpFlow& f) const
    {
        std::vector<Choice> out;
        const double w = std::ldexp(1.0, f.priority);
        long k = 0;
        for (;; ++k) {
            const double x = f.floor + static_cast<double>(k) * delta_;
            if (x > f.cap + 1e-12) {
                break;
            }
            if (std::abs(x - f.cap) <= 1e-12) {
                out.push_back({k, 0.0, w * networth::evaluate(f.utility, f.cap)});
                return out;
            }
            out.push_back({k, 0.0, w * networth::evaluate(f.utility, x)});
        }
        // cap lies strictly between two grid points
        const long below = k - 1;
        const double tail = f.cap - (f.floor + static_cast<double>(below) * delta_);
        out.push_back({below, tail, w * networth::evaluate(f.utility, f.cap)});
        return out;
    }

    double solve_with_receiver(std::size_t r, double fixed) const
    {
        const double spare = capacity_ - fixed;
        const long max_units = static_cast<long>(std::floor(spare / delta_ + 1e-9));
        const std::size_t n = flows_.size();

        // dp[units][mask] over non-receiver flows; mask marks flows at an
        // off-grid cap so their tails can be added exactly. Only flows that
        // have such a tail get a bit.
        std::vector<double> tails(n, 0.0);
        std::vector<int> bit(n, -1);
        int bits = 0;
        for (std::size_t j = 0; j < n; ++j) {
            tails[j] = choices(flows_[j]).back().tail;
            if (j != r && tails[j] > 0.0) {
                bit[j] = bits++;
            }
        }
        const std::size_t masks = std::size_t{1} << bits;
        const double none = -std::numeric_limits<double>::infinity();
        std::vector<double> dp((max_units + 1) * masks, none);
        dp[0] = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == r) {
                continue;
            }
            const auto opts = choices(flows_[j]);
            std::vector<double> next((max_units + 1) * masks, none);
            for (long u = 0; u <= max_units; ++u) {
                for (std::size_t m = 0; m < masks; ++m) {
                    const double cur = dp[u * masks + m];
                    if (cur == none) {
                        continue;
                    }
                    for (const auto& c : opts) {
                        const long nu = u + c.units;
                        if (nu > max_units) {
                            break;
                        }
                        const std::size_t nm = c.tail > 0.0 ? (m | (std::size_t{1} << bit[j])) : m;
                        double& slot = next[nu * masks + nm];
                        slot = std::max(slot, cur + c.worth);
                    }
                }
            }
            dp = std::move(next);
        }

        const DpFlow& rf = flows_[r];
        const double rw = std::ldexp(1.0, rf.priority);
        double best = none;
        for (long u = 0; u <= max_units; ++u) {
            for (std::size_t m = 0; m < masks; ++m) {
                const double cur = dp[u * masks + m];
                if (cur == none) {
                    continue;
                }
                double used = static_cast<double>(u) * delta_;
                for (std::size_t j = 0; j < n; ++j) {
                    if (bit[j] >= 0 && (m & (std::size_t{1} << bit[j]))) {
                        used += tails[j];
                    }
                }
                const double left = spare - used;
                if (left < -1e-12) {
                    continue;
                }
                // receiver takes everything left, bounded by its cap
                const double x = std::min(rf.cap, rf.floor + std::max(0.0, left));
                best = std::max(best, cur + rw * networth::evaluate(rf.utility, x));
            }
        }
        return best;
    }

    double capacity_;
    std::vector<DpFlow> flows_;
    double delta_;
};

/// Capped/floored max-min share by bisection on the water level; slow but
/// obviously correct.
struct ShareBounds {
    double floor;
    double cap;
};

inline std::vector<double> water_fill(double capacity, const std::vector<ShareBounds>& flows)
{
    auto at = [&](double level) {
        double s = 0.0;
        for (const auto& f : flows) {
            s += std::clamp(level, f.floor, f.cap);
        }
        return s;
    };
    double lo = 0.0;
    double hi = capacity;
    for (const auto& f : flows) {
        hi = std::max(hi, std::isfinite(f.cap) ? f.cap : f.floor);
    }
    if (at(hi) <= capacity) {
        lo = hi;
    } else {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (at(mid) <= capacity ? lo : hi) = mid;
        }
    }
    std::vector<double> out;
    for (const auto& f : flows) {
        out.push_back(std::clamp(lo, f.floor, f.cap));
    }
    return out;
}

}  // namespace oracle
