#include "networth/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <span>
#include <sstream>

namespace networth {

namespace {

std::string where(const YAML::Node& n)
{
    const auto m = n.Mark();
    if (m.is_null()) {
        return "";
    }
    return "line " + std::to_string(m.line + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& n, std::string_view field, std::string_view msg)
{
    throw ScenarioError(where(n) + std::string(field) + ": " + std::string(msg));
}

void require_map(const YAML::Node& n, std::string_view field)
{
    if (!n.IsMap()) {
        fail(n, field, "expected a mapping");
    }
}

void check_keys(const YAML::Node& map, std::span<const std::string_view> allowed, std::string_view field)
{
    require_map(map, field);
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(kv.first, field.empty() ? key : std::string(field) + "." + key, "unknown key");
        }
    }
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, std::string_view field)
{
    check_keys(map, std::span<const std::string_view>(allowed.begin(), allowed.size()), field);
}

template <class T>
T get(const YAML::Node& n, std::string_view field)
{
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, field, "malformed value '" + (n.IsScalar() ? n.Scalar() : std::string("<non-scalar>")) + "'");
    }
}

std::vector<double> get_doubles(const YAML::Node& n, std::string_view field)
{
    if (n.IsScalar()) {
        return {get<double>(n, field)};
    }
    if (!n.IsSequence()) {
        fail(n, field, "expected a number or a list of numbers");
    }
    std::vector<double> out;
    for (const auto& e : n) {
        out.push_back(get<double>(e, field));
    }
    return out;
}

TrafficProfile parse_profile(const YAML::Node& n)
{
    require_map(n, "profiles[]");
    if (!n["class"]) {
        fail(n, "profiles[].class", "missing");
    }
    const auto cls = get<std::string>(n["class"], "profiles[].class");
    const std::string f = "profiles[" + (n["id"] ? n["id"].Scalar() : std::string("?")) + "]";

    auto need = [&](const char* key) -> YAML::Node {
        if (!n[key]) {
            fail(n, f + "." + key, "missing");
        }
        return n[key];
    };

    UtilityFunction u = UtilityFunction::hard_real_time(1.0);
    try {
        if (cls == "hard-real-time") {
            check_keys(n, {"id", "label", "class", "priority", "volume_mbit", "b_max_mbps"}, f);
            u = UtilityFunction::hard_real_time(get<double>(need("b_max_mbps"), f + ".b_max_mbps"));
        } else if (cls == "real-time") {
            check_keys(n, {"id", "label", "class", "priority", "volume_mbit", "k1", "k2", "b_min_mbps", "b_max_mbps"},
                       f);
            u = UtilityFunction::real_time(get<double>(need("k1"), f + ".k1"), get<double>(need("k2"), f + ".k2"),
                                           get<double>(need("b_min_mbps"), f + ".b_min_mbps"),
                                           get<double>(need("b_max_mbps"), f + ".b_max_mbps"));
        } else if (cls == "elastic") {
            check_keys(n, {"id", "label", "class", "priority", "volume_mbit", "k", "b_max_mbps", "scale_mbps"}, f);
            const double b_max = get<double>(need("b_max_mbps"), f + ".b_max_mbps");
            const double scale = n["scale_mbps"] ? get<double>(n["scale_mbps"], f + ".scale_mbps") : b_max;
            u = UtilityFunction::elastic(get<double>(need("k"), f + ".k"), b_max, scale);
        } else {
            fail(n["class"], f + ".class", "expected elastic, hard-real-time or real-time");
        }
    } catch (const std::invalid_argument& e) {
        fail(n, f, e.what());
    }

    const auto vol = get_doubles(need("volume_mbit"), f + ".volume_mbit");
    if (vol.size() != 2) {
        fail(n["volume_mbit"], f + ".volume_mbit", "expected [low, high]");
    }
    const int level = get<int>(need("priority"), f + ".priority");
    if (level < PriorityLevel::kMin || level > PriorityLevel::kMax) {
        fail(n["priority"], f + ".priority", "must be in [1, 4]");
    }
    TrafficProfile p{get<int>(need("id"), f + ".id"), u, PriorityLevel(level), VolumeRange{vol[0], vol[1]},
                     n["label"] ? get<std::string>(n["label"], f + ".label") : std::string()};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(n, f, e.what());
    }
    return p;
}

void parse_scenario_keys(const YAML::Node& root, ScenarioConfig& c)
{
    if (auto n = root["seed"]) {
        c.seed = get<std::uint64_t>(n, "seed");
    }
    if (auto n = root["horizon_s"]) {
        c.horizon = get<double>(n, "horizon_s");
    }
    if (auto n = root["warmup_s"]) {
        c.warmup = get<double>(n, "warmup_s");
    } else {
        c.warmup = 0.1 * c.horizon;
    }
    if (auto n = root["rate_multiplier"]) {
        c.rate_multiplier = get<double>(n, "rate_multiplier");
    }
    if (auto n = root["volume_distribution"]) {
        const auto d = parse_volume_distribution(get<std::string>(n, "volume_distribution"));
        if (!d) {
            fail(n, "volume_distribution", "expected clamped-exponential or uniform");
        }
        c.volume_distribution = *d;
    }
    if (auto net = root["network"]) {
        check_keys(net, {"capacities_mbps"}, "network");
        if (!net["capacities_mbps"]) {
            fail(net, "network.capacities_mbps", "missing");
        }
        c.capacities = get_doubles(net["capacities_mbps"], "network.capacities_mbps");
    }
    if (auto s = root["scheme"]) {
        check_keys(s, {"name", "delta_mbps", "greedy_key", "max_iterations", "eta", "shares"}, "scheme");
        if (auto n = s["name"]) {
            const auto k = parse_scheme_kind(get<std::string>(n, "scheme.name"));
            if (!k) {
                fail(n, "scheme.name", "expected basmin, best-effort, complete-partitioning or trunk-reservation");
            }
            c.scheme.kind = *k;
        }
        if (auto n = s["delta_mbps"]) {
            c.scheme.basmin.delta = get<double>(n, "scheme.delta_mbps");
        }
        if (auto n = s["greedy_key"]) {
            const auto key = get<std::string>(n, "scheme.greedy_key");
            if (key == "forward-difference") {
                c.scheme.basmin.greedy_key = GreedyKey::ForwardDifference;
            } else if (key == "derivative") {
                c.scheme.basmin.greedy_key = GreedyKey::Derivative;
            } else {
                fail(n, "scheme.greedy_key", "expected forward-difference or derivative");
            }
        }
        if (auto n = s["max_iterations"]) {
            c.scheme.basmin.max_iterations = get<std::size_t>(n, "scheme.max_iterations");
        }
        if (auto n = s["eta"]) {
            c.scheme.trunk.eta = get<double>(n, "scheme.eta");
        }
        if (auto sh = s["shares"]) {
            check_keys(sh, {"hrt", "rt", "elastic"}, "scheme.shares");
            for (const char* key : {"hrt", "rt", "elastic"}) {
                if (!sh[key]) {
                    fail(sh, std::string("scheme.shares.") + key, "missing");
                }
            }
            c.scheme.shares = PartitionShares{get<double>(sh["hrt"], "scheme.shares.hrt"),
                                              get<double>(sh["rt"], "scheme.shares.rt"),
                                              get<double>(sh["elastic"], "scheme.shares.elastic")};
        }
    }
    if (auto ps = root["profiles"]) {
        if (!ps.IsSequence()) {
            fail(ps, "profiles", "expected a list");
        }
        c.profiles.clear();
        for (const auto& p : ps) {
            c.profiles.push_back(parse_profile(p));
        }
        std::erase_if(c.arrival_rates, [&](const auto& kv) {
            return std::none_of(c.profiles.begin(), c.profiles.end(),
                                [&](const TrafficProfile& p) { return p.id == kv.first; });
        });
    }
    if (auto rs = root["arrival_rates"]) {
        require_map(rs, "arrival_rates");
        c.arrival_rates.clear();
        for (const auto& kv : rs) {
            const int id = get<int>(kv.first, "arrival_rates");
            c.arrival_rates[id] = get<double>(kv.second, "arrival_rates." + std::to_string(id));
        }
    }
}

void validate_or_throw(const YAML::Node& root, const ScenarioConfig& c)
{
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(where(root) + "invalid scenario: " + e.what());
    }
}

YAML::Node parse_root(std::string_view text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ScenarioError("line " + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
    }
    if (root.IsNull()) {
        return YAML::Node(YAML::NodeType::Map);
    }
    require_map(root, "document");
    return root;
}

constexpr std::array<std::string_view, 9> kScenarioKeys = {
    "seed", "horizon_s", "warmup_s", "rate_multiplier", "volume_distribution",
    "network", "scheme", "arrival_rates", "profiles"};

std::string read_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw ScenarioError(file.string() + ": cannot open");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string num(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text)
{
    const YAML::Node root = parse_root(text);
    check_keys(root, kScenarioKeys, "");
    ScenarioConfig c;
    parse_scenario_keys(root, c);
    validate_or_throw(root, c);
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& file)
{
    try {
        return parse_scenario(read_file(file));
    } catch (const ScenarioError& e) {
        throw ScenarioError(file.string() + ": " + e.what());
    }
}

std::string dump_scenario(const ScenarioConfig& c)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "horizon_s" << YAML::Value << num(c.horizon);
    out << YAML::Key << "warmup_s" << YAML::Value << num(c.warmup);
    out << YAML::Key << "rate_multiplier" << YAML::Value << num(c.rate_multiplier);
    out << YAML::Key << "volume_distribution" << YAML::Value << std::string(to_string(c.volume_distribution));

    out << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "capacities_mbps" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double cap : c.capacities) {
        out << num(cap);
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "scheme" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << std::string(to_string(c.scheme.kind));
    out << YAML::Key << "delta_mbps" << YAML::Value << num(c.scheme.basmin.delta);
    out << YAML::Key << "greedy_key" << YAML::Value
        << (c.scheme.basmin.greedy_key == GreedyKey::Derivative ? "derivative" : "forward-difference");
    out << YAML::Key << "max_iterations" << YAML::Value << c.scheme.basmin.max_iterations;
    out << YAML::Key << "eta" << YAML::Value << num(c.scheme.trunk.eta);
    out << YAML::Key << "shares" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "hrt" << YAML::Value << num(c.scheme.shares.hrt);
    out << YAML::Key << "rt" << YAML::Value << num(c.scheme.shares.rt);
    out << YAML::Key << "elastic" << YAML::Value << num(c.scheme.shares.elastic);
    out << YAML::EndMap << YAML::EndMap;

    out << YAML::Key << "arrival_rates" << YAML::Value << YAML::BeginMap;
    for (const auto& [id, rate] : c.arrival_rates) {
        out << YAML::Key << id << YAML::Value << num(rate);
    }
    out << YAML::EndMap;

    out << YAML::Key << "profiles" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : c.profiles) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << p.id;
        out << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << p.label;
        out << YAML::Key << "class" << YAML::Value << std::string(to_string(p.traffic_class()));
        out << YAML::Key << "priority" << YAML::Value << p.priority.level();
        out << YAML::Key << "volume_mbit" << YAML::Value << YAML::Flow << YAML::BeginSeq << num(p.volume.low)
            << num(p.volume.high) << YAML::EndSeq;
        std::visit(
            [&](const auto& u) {
                using T = std::decay_t<decltype(u)>;
                if constexpr (std::is_same_v<T, ElasticUtility>) {
                    out << YAML::Key << "k" << YAML::Value << num(u.k);
                    out << YAML::Key << "b_max_mbps" << YAML::Value << num(u.b_max);
                    out << YAML::Key << "scale_mbps" << YAML::Value << num(u.scale);
                } else if constexpr (std::is_same_v<T, HardRealTimeUtility>) {
                    out << YAML::Key << "b_max_mbps" << YAML::Value << num(u.b_max);
                } else {
                    out << YAML::Key << "k1" << YAML::Value << num(u.k1);
                    out << YAML::Key << "k2" << YAML::Value << num(u.k2);
                    out << YAML::Key << "b_min_mbps" << YAML::Value << num(u.b_min);
                    out << YAML::Key << "b_max_mbps" << YAML::Value << num(u.b_max);
                }
            },
            p.utility.params());
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string_view to_string(SweptParameter p)
{
    return p == SweptParameter::TotalCapacity ? "total_capacity" : "arrival_rate_multiplier";
}

void SweepSpec::validate() const
{
    if (values.empty()) {
        throw ScenarioError("sweep.values: grid must not be empty");
    }
    if (replications < 1) {
        throw ScenarioError("sweep.replications: must be >= 1");
    }
    if (schemes.empty()) {
        throw ScenarioError("sweep.schemes: at least one scheme is required");
    }
    for (double v : values) {
        try {
            apply_sweep_value(base, parameter, v).validate();
        } catch (const std::invalid_argument& e) {
            throw ScenarioError("sweep.values: " + num(v) + ": " + e.what());
        }
    }
}

SweepSpec parse_sweep(std::string_view text)
{
    const YAML::Node root = parse_root(text);
    std::vector<std::string_view> keys(kScenarioKeys.begin(), kScenarioKeys.end());
    keys.push_back("sweep");
    require_map(root, "document");
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            fail(kv.first, key, "unknown key");
        }
    }

    SweepSpec spec;
    parse_scenario_keys(root, spec.base);
    validate_or_throw(root, spec.base);

    const YAML::Node s = root["sweep"];
    if (!s) {
        fail(root, "sweep", "missing");
    }
    check_keys(s, {"parameter", "values", "replications", "schemes"}, "sweep");
    if (!s["parameter"]) {
        fail(s, "sweep.parameter", "missing");
    }
    const auto param = get<std::string>(s["parameter"], "sweep.parameter");
    if (param == "total_capacity") {
        spec.parameter = SweptParameter::TotalCapacity;
    } else if (param == "arrival_rate_multiplier") {
        spec.parameter = SweptParameter::ArrivalRateMultiplier;
    } else {
        fail(s["parameter"], "sweep.parameter", "expected total_capacity or arrival_rate_multiplier");
    }
    if (!s["values"]) {
        fail(s, "sweep.values", "missing");
    }
    spec.values = get_doubles(s["values"], "sweep.values");
    if (auto n = s["replications"]) {
        const int r = get<int>(n, "sweep.replications");
        if (r < 1) {
            fail(n, "sweep.replications", "must be >= 1");
        }
        spec.replications = static_cast<std::uint32_t>(r);
    }
    if (auto n = s["schemes"]) {
        if (!n.IsSequence()) {
            fail(n, "sweep.schemes", "expected a list");
        }
        spec.schemes.clear();
        for (const auto& e : n) {
            const auto k = parse_scheme_kind(get<std::string>(e, "sweep.schemes"));
            if (!k) {
                fail(e, "sweep.schemes", "unknown scheme '" + e.Scalar() + "'");
            }
            spec.schemes.push_back(*k);
        }
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep(const std::filesystem::path& file)
{
    try {
        return parse_sweep(read_file(file));
    } catch (const ScenarioError& e) {
        throw ScenarioError(file.string() + ": " + e.what());
    }
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweptParameter p, double value)
{
    ScenarioConfig c = base;
    if (p == SweptParameter::TotalCapacity) {
        const double total = base.total_capacity();
        for (double& cap : c.capacities) {
            cap = cap / total * value;
        }
    } else {
        c.rate_multiplier = value;
    }
    return c;
}

}  // namespace networth
