#include "networth/basmin.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>

namespace networth {

namespace {

constexpr double kTol = kBandwidthTolerance;

struct Slot {
    const LoadBalanceItem* item;
    std::size_t steps;
    double x;

    double room() const { return item->cap - x; }
};

double increment_key(const Slot& s, double step, GreedyKey key)
{
    const LoadBalanceItem& it = *s.item;
    if (key == GreedyKey::Derivative) {
        return marginal_worth(it.priority, it.utility, s.x);
    }
    const double gain = evaluate(it.utility, s.x + step) - evaluate(it.utility, s.x);
    return it.priority.weight() * gain / step;
}

/// Moves a slot forward by `step`. Full delta steps are tracked as a count so
/// the allocation stays on the floor + k * delta grid without drift.
void advance(Slot& s, double step, double delta)
{
    if (step >= s.room() - kTol) {
        s.x = s.item->cap;
    } else if (step == delta) {
        ++s.steps;
        s.x = s.item->floor + static_cast<double>(s.steps) * delta;
    } else {
        s.x += step;
    }
}

double slot_worth(const Slot& s, double x)
{
    return s.item->priority.weight() * evaluate(s.item->utility, x);
}

/// Allocation overrides used while scoring a candidate without touching the
/// slots; a handful of entries at most.
using Overrides = std::vector<std::pair<std::size_t, double>>;

double current_x(const std::vector<Slot>& slots, const Overrides& o, std::size_t i)
{
    for (const auto& [j, x] : o) {
        if (j == i) {
            return x;
        }
    }
    return slots[i].x;
}

void set_x(Overrides& o, std::size_t i, double x)
{
    for (auto& [j, v] : o) {
        if (j == i) {
            v = x;
            return;
        }
    }
    o.emplace_back(i, x);
}

/// Hands out a sub-delta remainder: repeatedly the best key gets
/// min(delta, room, remaining). Works on `o` over the slots and returns the
/// worth gained; `o` ends up holding every changed allocation.
template <class Guard>
double place_residual(const std::vector<Slot>& slots, double remaining, double delta, GreedyKey key,
                      Overrides o, Overrides* out, Guard& guard)
{
    double gain = 0.0;
    while (remaining > kTol) {
        guard();
        std::optional<std::size_t> best;
        double best_key = 0.0;
        double best_step = 0.0;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            Slot s = slots[i];
            s.x = current_x(slots, o, i);
            if (s.room() <= kTol) {
                continue;
            }
            const double step = std::min({delta, s.room(), remaining});
            const double k = increment_key(s, step, key);
            if (!best || k > best_key || (k == best_key && s.item->id < slots[*best].item->id)) {
                best = i;
                best_key = k;
                best_step = step;
            }
        }
        if (!best) {
            break;
        }
        const double x = current_x(slots, o, *best);
        const double nx = best_step >= slots[*best].item->cap - x - kTol ? slots[*best].item->cap : x + best_step;
        gain += slot_worth(slots[*best], nx) - slot_worth(slots[*best], x);
        set_x(o, *best, nx);
        remaining -= best_step;
    }
    if (out != nullptr) {
        *out = std::move(o);
    }
    return gain;
}

/// Final placement of a remainder smaller than delta. Besides handing it to
/// the best next increment, every flow j is tried as the one that ends off
/// the grid: j gives back its last step, the freed amount first buys full
/// steps for the other flows in key order and whatever is left returns to j.
/// The best of these candidates is applied.
template <class Guard>
void place_residual_exactly(std::vector<Slot>& slots, double remaining, double delta, Guard& guard)
{
    const GreedyKey key = GreedyKey::ForwardDifference;
    Overrides best_changes;
    double best_gain = place_residual(slots, remaining, delta, key, {}, &best_changes, guard);

    // Full-step candidates in key order (ties: lowest id).
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].room() > kTol) {
            order.emplace_back(increment_key(slots[i], std::min(delta, slots[i].room()), key), i);
        }
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return slots[a.second].item->id < slots[b.second].item->id;
    });

    for (std::size_t j = 0; j < slots.size(); ++j) {
        const Slot& sj = slots[j];
        const double grid = sj.item->floor + static_cast<double>(sj.steps) * delta;
        double back = 0.0;
        if (sj.x - grid > kTol) {
            back = grid;  // a step onto the cap
        } else if (sj.steps > 0) {
            back = grid - delta;
        } else {
            continue;
        }
        guard();
        Overrides o{{j, back}};
        double gain = slot_worth(sj, back) - slot_worth(sj, sj.x);
        double r = remaining + (sj.x - back);
        for (const auto& [k, i] : order) {
            if (r < delta) {
                break;
            }
            if (i == j) {
                continue;
            }
            const double step = std::min(delta, slots[i].room());
            const double nx = step >= slots[i].room() - kTol ? slots[i].item->cap : slots[i].x + step;
            gain += slot_worth(slots[i], nx) - slot_worth(slots[i], slots[i].x);
            set_x(o, i, nx);
            r -= step;
        }
        const double give = std::min(r, sj.item->cap - back);
        const double nj = give >= sj.item->cap - back - kTol ? sj.item->cap : back + give;
        gain += slot_worth(sj, nj) - slot_worth(sj, back);
        set_x(o, j, nj);
        r -= give;
        Overrides changes;
        gain += place_residual(slots, r, delta, key, std::move(o), &changes, guard);
        if (gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
            best_gain = gain;
            best_changes = std::move(changes);
        }
    }
    for (const auto& [i, x] : best_changes) {
        slots[i].x = x;
    }
}

double readmission_density(const Flow& f, double delta)
{
    const double need = squeezed_minimum(f, delta);
    return worth(f.priority(), evaluate(f.profile->utility, need)) / need;
}

}  // namespace

void BasminConfig::validate() const
{
    if (!(delta > 0.0)) {
        throw std::invalid_argument("delta must be > 0");
    }
    if (max_iterations == 0) {
        throw std::invalid_argument("max_iterations must be > 0");
    }
}

LoadBalanceItem load_balance_item(const Flow& flow)
{
    const UtilityFunction& u = flow.profile->utility;
    // Elastic b_min is 0, HRT b_min is b_max, RT b_min is its own.
    return LoadBalanceItem{flow.id, flow.priority(), u, u.b_min(), u.b_max()};
}

Allocation load_balance(double capacity, std::span<const LoadBalanceItem> flows, const BasminConfig& config)
{
    config.validate();
    const double delta = config.delta;

    std::vector<Slot> slots;
    slots.reserve(flows.size());
    double floors = 0.0;
    for (const auto& it : flows) {
        if (!(it.floor >= 0.0) || it.floor > it.cap + kTol) {
            throw std::invalid_argument("flow " + std::to_string(it.id) + ": need 0 <= floor <= cap");
        }
        slots.push_back(Slot{&it, 0, it.floor});
        floors += it.floor;
    }
    if (floors > capacity + kTol) {
        throw ContractViolation("load_balance: minima " + std::to_string(floors) +
                                " exceed capacity " + std::to_string(capacity));
    }
    double remaining = capacity - floors;

    struct Entry {
        double key;
        FlowId id;
        std::size_t slot;
    };
    auto lower_priority = [](const Entry& a, const Entry& b) {
        if (a.key != b.key) {
            return a.key < b.key;
        }
        return a.id > b.id;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);
    auto push = [&](std::size_t i) {
        const Slot& s = slots[i];
        if (s.room() > kTol) {
            const double step = std::min(delta, s.room());
            heap.push(Entry{increment_key(s, step, config.greedy_key), s.item->id, i});
        }
    };
    for (std::size_t i = 0; i < slots.size(); ++i) {
        push(i);
    }

    std::size_t iterations = 0;
    auto guard = [&] {
        if (++iterations > config.max_iterations) {
            throw std::runtime_error("load_balance: iteration guard exceeded");
        }
    };

    // Full-size phase: the step of every candidate is independent of the
    // remaining capacity, so cached keys stay valid.
    while (!heap.empty() && remaining >= delta) {
        guard();
        const Entry top = heap.top();
        heap.pop();
        Slot& s = slots[top.slot];
        const double step = std::min(delta, s.room());
        advance(s, step, delta);
        remaining -= step;
        push(top.slot);
    }

    if (remaining > kTol) {
        if (config.greedy_key == GreedyKey::ForwardDifference) {
            place_residual_exactly(slots, remaining, delta, guard);
        } else {
            place_residual(slots, remaining, delta, config.greedy_key, {}, nullptr, guard);
        }
    }

    Allocation out;
    for (const auto& s : slots) {
        out.emplace(s.item->id, s.x);
    }
    return out;
}

double squeezed_minimum(const Flow& flow, double delta)
{
    if (flow.traffic_class() == TrafficClass::Elastic) {
        return delta;
    }
    return flow.b_min();
}

double hypothetical_available(const NetworkState& state, PathId path, const Flow& new_flow, double delta)
{
    const double new_weight = new_flow.priority().weight();
    double reserved = 0.0;
    for (FlowId id : state.active_on(path)) {
        const Flow& f = state.flow(id);
        if (f.priority().weight() >= new_weight) {
            reserved += squeezed_minimum(f, delta);
        }
    }
    return state.path(path).capacity - reserved;
}

Admission admission_check(const NetworkState& state, const Flow& new_flow, const BasminConfig& config)
{
    if (new_flow.traffic_class() == TrafficClass::Elastic) {
        return Admission::Admit;
    }
    const double need = new_flow.b_min();
    for (const auto& p : state.paths()) {
        if (available_bandwidth(state, p.id) >= need - kTol) {
            return Admission::Admit;
        }
    }
    for (const auto& p : state.paths()) {
        if (hypothetical_available(state, p.id, new_flow, config.delta) >= need - kTol) {
            return Admission::Admit;
        }
    }
    return Admission::Reject;
}

PathCandidate evaluate_path(const NetworkState& state, PathId path, const Flow& new_flow, const BasminConfig& config)
{
    const double capacity = state.path(path).capacity;
    const double delta = config.delta;
    const double need = squeezed_minimum(new_flow, delta);

    PathCandidate cand;
    cand.path = path;

    std::vector<const Flow*> active;
    double squeezed_all = 0.0;
    for (FlowId id : state.active_on(path)) {
        const Flow& f = state.flow(id);
        active.push_back(&f);
        squeezed_all += squeezed_minimum(f, delta);
    }

    std::vector<const Flow*> survivors;
    if (squeezed_all + need <= capacity + kTol) {
        survivors = active;
    } else {
        // Drop everything of strictly lower weight, then take back as many
        // of those flows as still fit at their squeezed minimum, densest
        // worth per Mbps first.
        const double new_weight = new_flow.priority().weight();
        std::vector<const Flow*> lower;
        double room = capacity - need;
        for (const Flow* f : active) {
            if (f->priority().weight() >= new_weight) {
                survivors.push_back(f);
                room -= squeezed_minimum(*f, delta);
            } else {
                lower.push_back(f);
            }
        }
        if (room < -kTol) {
            return cand;
        }
        std::stable_sort(lower.begin(), lower.end(), [delta](const Flow* a, const Flow* b) {
            const double da = readmission_density(*a, delta);
            const double db = readmission_density(*b, delta);
            if (da != db) {
                return da > db;
            }
            return a->id < b->id;
        });
        for (const Flow* f : lower) {
            const double m = squeezed_minimum(*f, delta);
            if (m <= room + kTol) {
                survivors.push_back(f);
                room -= m;
            } else {
                cand.preempted.push_back(f->id);
            }
        }
        std::sort(cand.preempted.begin(), cand.preempted.end());
    }

    std::vector<LoadBalanceItem> items;
    items.reserve(survivors.size() + 1);
    for (const Flow* f : survivors) {
        items.push_back(load_balance_item(*f));
    }
    items.push_back(load_balance_item(new_flow));

    cand.proposed = load_balance(capacity, items, config);
    double proposed_worth = 0.0;
    for (const auto& it : items) {
        proposed_worth += worth(it.priority, evaluate(it.utility, cand.proposed.at(it.id)));
    }
    cand.worth_increment = proposed_worth - path_worth(state, path);
    cand.feasible = true;
    return cand;
}

std::optional<PathId> select_path(std::span<const PathCandidate> candidates)
{
    const PathCandidate* best = nullptr;
    for (const auto& c : candidates) {
        if (!c.feasible) {
            continue;
        }
        if (!best || c.worth_increment > best->worth_increment ||
            (c.worth_increment == best->worth_increment && c.path < best->path)) {
            best = &c;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return best->path;
}

ArrivalDecision handle_arrival(NetworkState& state, FlowId id, const BasminConfig& config, double now)
{
    const Flow& flow = state.flow(id);
    if (flow.state != FlowState::Pending) {
        throw std::logic_error("handle_arrival: flow " + std::to_string(id) + " is not pending");
    }

    ArrivalDecision decision;
    if (admission_check(state, flow, config) == Admission::Reject) {
        state.reject(id, now);
        return decision;
    }

    std::vector<PathCandidate> candidates;
    candidates.reserve(state.paths().size());
    for (const auto& p : state.paths()) {
        candidates.push_back(evaluate_path(state, p.id, flow, config));
    }
    const auto chosen = select_path(candidates);
    if (!chosen) {
        state.reject(id, now);
        return decision;
    }

    PathCandidate& win = candidates[*chosen];
    for (FlowId victim : win.preempted) {
        state.close(victim, FlowState::Preempted, now);
    }
    state.activate(id, win.path, win.proposed.at(id));
    for (const auto& [fid, x] : win.proposed) {
        if (fid != id) {
            state.set_allocation(fid, x);
        }
    }

    decision.admitted = true;
    decision.path = win.path;
    decision.preempted = std::move(win.preempted);
    decision.worth_increment = win.worth_increment;
    return decision;
}

void rebalance_path(NetworkState& state, PathId path, const BasminConfig& config)
{
    std::vector<LoadBalanceItem> items;
    for (FlowId id : state.active_on(path)) {
        items.push_back(load_balance_item(state.flow(id)));
    }
    const Allocation alloc = load_balance(state.path(path).capacity, items, config);
    for (const auto& [fid, x] : alloc) {
        state.set_allocation(fid, x);
    }
}

void handle_departure(NetworkState& state, FlowId id, const BasminConfig& config, double now)
{
    const Flow& f = state.flow(id);
    if (f.state != FlowState::Active || !f.path) {
        throw std::logic_error("handle_departure: flow " + std::to_string(id) + " is not active");
    }
    const PathId path = *f.path;
    state.close(id, FlowState::Completed, now);
    rebalance_path(state, path, config);
}

BasminScheme::BasminScheme(BasminConfig config) : config_(config)
{
    config_.validate();
}

ArrivalDecision BasminScheme::on_arrival(NetworkState& state, FlowId flow, double now)
{
    return handle_arrival(state, flow, config_, now);
}

void BasminScheme::on_departure(NetworkState& state, FlowId flow, double now)
{
    handle_departure(state, flow, config_, now);
}

}  // namespace networth
