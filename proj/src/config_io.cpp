#include "bmw/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "bmw/capacity.hpp"

namespace bmw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigParseError((where.empty() ? std::string("/") : where) + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(where + "/" + key, "unknown key");
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) fail(where, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

const json& require(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) fail(where + "/" + key, "missing required field");
    return j.at(key);
}

std::vector<Schedule> schedules_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of schedules");
    std::vector<Schedule> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string at = where + "/" + std::to_string(k);
        if (!j[k].is_array()) fail(at, "expected an array of 1-based queue numbers");
        std::vector<std::size_t> numbers;
        for (std::size_t m = 0; m < j[k].size(); ++m) {
            const auto v = get_unsigned(j[k][m], at + "/" + std::to_string(m));
            if (v == 0) fail(at + "/" + std::to_string(m), "queue numbers are 1-based");
            numbers.push_back(v);
        }
        out.push_back(Schedule::from_one_based(numbers));
    }
    return out;
}

json schedules_to_json(const std::vector<Schedule>& schedules) {
    json a = json::array();
    for (const auto& s : schedules) a.push_back(s.one_based());
    return a;
}

SystemConfig inline_system_from_json(const json& j, const std::string& where) {
    SystemConfig cfg;
    const auto n = get_unsigned(require(j, where, "n_queues"), where + "/n_queues");
    if (n == 0) fail(where + "/n_queues", "must be positive");
    cfg.n_queues = n;
    if (j.contains("switch_overhead"))
        cfg.switch_overhead = static_cast<int>(get_integer(j["switch_overhead"], where + "/switch_overhead"));

    if (j.contains("schedules") == j.contains("conflicts"))
        fail(where, "give exactly one of 'schedules' or 'conflicts'");
    if (j.contains("schedules")) {
        cfg.schedules = schedules_from_json(j["schedules"], where + "/schedules");
    } else {
        const std::string at = where + "/conflicts";
        const json& c = j["conflicts"];
        only_keys(c, at, {"max_concurrency", "pairs"});
        ConflictSpec spec;
        spec.n_queues = n;
        spec.max_concurrency = get_unsigned(require(c, at, "max_concurrency"), at + "/max_concurrency");
        if (c.contains("pairs")) {
            const json& pairs = c["pairs"];
            if (!pairs.is_array()) fail(at + "/pairs", "expected an array of pairs");
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const std::string pk = at + "/pairs/" + std::to_string(k);
                if (!pairs[k].is_array() || pairs[k].size() != 2) fail(pk, "expected a pair [a, b]");
                const auto a = get_unsigned(pairs[k][0], pk + "/0");
                const auto b = get_unsigned(pairs[k][1], pk + "/1");
                if (a == 0 || b == 0) fail(pk, "queue numbers are 1-based");
                spec.conflicts.emplace_back(a - 1, b - 1);
            }
        }
        try {
            cfg.schedules = enumerate_maximal_schedules(spec);
        } catch (const CapacityError& e) {
            fail(at, e.what());
        }
    }

    const json& traffic = require(j, where, "traffic");
    const std::string tw = where + "/traffic";
    if (!traffic.is_array() || traffic.size() != n) fail(tw, "expected one entry per queue");
    for (std::size_t q = 0; q < n; ++q) {
        const std::string at = tw + "/" + std::to_string(q);
        only_keys(traffic[q], at, {"arrival", "service", "interarrival_bound"});
        TrafficSpec t;
        t.arrival = distribution_from_json(require(traffic[q], at, "arrival"), at + "/arrival");
        t.service = distribution_from_json(require(traffic[q], at, "service"), at + "/service");
        if (traffic[q].contains("interarrival_bound"))
            t.declared_interarrival_bound =
                static_cast<std::uint32_t>(get_unsigned(traffic[q]["interarrival_bound"], at + "/interarrival_bound"));
        cfg.traffic.push_back(std::move(t));
    }
    return cfg;
}

SystemSource system_from_json(const json& j, const std::string& where) {
    SystemSource s;
    if (!j.is_object()) fail(where, "expected an object");
    if (j.contains("scenario")) {
        only_keys(j, where, {"scenario", "beta_star", "switch_overhead", "schedules"});
        s.scenario = get_string(j["scenario"], where + "/scenario");
        if (j.contains("schedules")) s.schedules = schedules_from_json(j["schedules"], where + "/schedules");
    } else {
        only_keys(j, where, {"n_queues", "switch_overhead", "schedules", "conflicts", "traffic", "beta_star"});
        s.inline_config = inline_system_from_json(j, where);
    }
    if (j.contains("beta_star")) s.beta_star = get_number(j["beta_star"], where + "/beta_star");
    if (j.contains("switch_overhead"))
        s.switch_overhead = static_cast<int>(get_integer(j["switch_overhead"], where + "/switch_overhead"));
    return s;
}

PolicySpec policy_from_json(const json& j, const std::string& where) {
    only_keys(j, where, {"variant", "alpha"});
    PolicySpec p;
    try {
        p.variant = parse_policy_variant(get_string(require(j, where, "variant"), where + "/variant"));
    } catch (const std::invalid_argument& e) {
        fail(where + "/variant", e.what());
    }
    if (j.contains("alpha")) p.alpha = get_number(j["alpha"], where + "/alpha");
    const auto problems = validate_policy(p);
    if (!problems.empty()) fail(where, problems.front());
    return p;
}

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

std::vector<std::uint64_t> SeedSpec::seeds() const { return list.empty() ? seed_range(base, count) : list; }

json to_json(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>)
                return {{"type", "bernoulli"}, {"p", v.p}};
            else if constexpr (std::is_same_v<T, Deterministic>)
                return {{"type", "deterministic"}, {"value", v.value}};
            else
                return {{"type", "discrete"}, {"values", v.values}, {"probs", v.probs}};
        },
        d);
}

Distribution distribution_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a distribution object");
    const std::string type = get_string(require(j, where, "type"), where + "/type");
    Distribution d;
    if (type == "bernoulli") {
        only_keys(j, where, {"type", "p"});
        d = Bernoulli{get_number(require(j, where, "p"), where + "/p")};
    } else if (type == "deterministic") {
        only_keys(j, where, {"type", "value"});
        d = Deterministic{static_cast<std::uint32_t>(get_unsigned(require(j, where, "value"), where + "/value"))};
    } else if (type == "discrete") {
        only_keys(j, where, {"type", "values", "probs"});
        FiniteDiscrete f;
        const json& values = require(j, where, "values");
        const json& probs = require(j, where, "probs");
        if (!values.is_array() || !probs.is_array()) fail(where, "values and probs must be arrays");
        for (std::size_t k = 0; k < values.size(); ++k)
            f.values.push_back(static_cast<std::uint32_t>(get_unsigned(values[k], where + "/values/" + std::to_string(k))));
        for (std::size_t k = 0; k < probs.size(); ++k)
            f.probs.push_back(get_number(probs[k], where + "/probs/" + std::to_string(k)));
        d = std::move(f);
    } else {
        fail(where + "/type", "unknown distribution '" + type + "' (bernoulli, deterministic, discrete)");
    }
    const auto problems = validate_distribution(d);
    if (!problems.empty()) fail(where, problems.front());
    return d;
}

json to_json(const SystemConfig& cfg) {
    json j;
    j["n_queues"] = cfg.n_queues;
    j["switch_overhead"] = cfg.switch_overhead;
    j["schedules"] = schedules_to_json(cfg.schedules);
    json traffic = json::array();
    for (const auto& t : cfg.traffic) {
        json e{{"arrival", to_json(t.arrival)}, {"service", to_json(t.service)}};
        if (t.declared_interarrival_bound) e["interarrival_bound"] = *t.declared_interarrival_bound;
        traffic.push_back(std::move(e));
    }
    j["traffic"] = std::move(traffic);
    return j;
}

json to_json(const PolicySpec& p) { return {{"variant", std::string(to_string(p.variant))}, {"alpha", p.alpha}}; }

PolicySpec parse_policy_token(std::string_view token, double default_alpha) {
    PolicySpec p;
    p.alpha = default_alpha;
    const auto colon = token.find(':');
    p.variant = parse_policy_variant(token.substr(0, colon));
    if (colon != std::string_view::npos) {
        const auto text = token.substr(colon + 1);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p.alpha);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw std::invalid_argument("bad alpha in policy '" + std::string(token) + "'");
    }
    return p;
}

json to_json(const RunConfig& cfg) {
    json j;
    json sys;
    if (cfg.system.inline_config) {
        sys = to_json(*cfg.system.inline_config);
    } else {
        if (cfg.system.scenario) sys["scenario"] = *cfg.system.scenario;
        sys["switch_overhead"] = cfg.system.switch_overhead;
        if (cfg.system.schedules) sys["schedules"] = schedules_to_json(*cfg.system.schedules);
    }
    if (cfg.system.beta_star) sys["beta_star"] = *cfg.system.beta_star;
    j["system"] = std::move(sys);
    if (cfg.policies.size() == 1) {
        j["policy"] = to_json(cfg.policies.front());
    } else {
        json a = json::array();
        for (const auto& p : cfg.policies) a.push_back(to_json(p));
        j["policies"] = std::move(a);
    }
    j["horizon"] = cfg.horizon;
    j["warmup"] = cfg.warmup;
    if (cfg.seeds.list.empty())
        j["seeds"] = {{"base", cfg.seeds.base}, {"count", cfg.seeds.count}};
    else
        j["seeds"] = cfg.seeds.list;
    if (cfg.sweep) j["sweep"] = {{"axis", std::string(to_string(cfg.sweep->axis))}, {"values", cfg.sweep->values}};
    j["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
    return j;
}

RunConfig run_config_from_json(const json& j) {
    only_keys(j, "", {"system", "policy", "policies", "horizon", "warmup", "seeds", "sweep", "output"});
    RunConfig cfg;
    cfg.system = system_from_json(require(j, "", "system"), "/system");

    if (j.contains("policy") && j.contains("policies")) fail("/policies", "give either 'policy' or 'policies'");
    if (j.contains("policy")) {
        cfg.policies = {policy_from_json(j["policy"], "/policy")};
    } else if (j.contains("policies")) {
        const json& a = j["policies"];
        if (!a.is_array() || a.empty()) fail("/policies", "expected a nonempty array");
        cfg.policies.clear();
        for (std::size_t k = 0; k < a.size(); ++k) cfg.policies.push_back(policy_from_json(a[k], "/policies/" + std::to_string(k)));
    }

    if (j.contains("horizon")) cfg.horizon = get_integer(j["horizon"], "/horizon");
    if (j.contains("warmup")) cfg.warmup = get_integer(j["warmup"], "/warmup");
    if (cfg.horizon <= 0) fail("/horizon", "must be positive");
    if (cfg.warmup < 0) fail("/warmup", "must be nonnegative");
    if (cfg.warmup >= cfg.horizon) fail("/warmup", "warmup exceeds horizon");

    if (j.contains("seeds")) {
        const json& s = j["seeds"];
        if (s.is_array()) {
            if (s.empty()) fail("/seeds", "expected at least one seed");
            for (std::size_t k = 0; k < s.size(); ++k) cfg.seeds.list.push_back(get_unsigned(s[k], "/seeds/" + std::to_string(k)));
        } else {
            only_keys(s, "/seeds", {"base", "count"});
            if (s.contains("base")) cfg.seeds.base = get_unsigned(s["base"], "/seeds/base");
            if (s.contains("count")) cfg.seeds.count = get_unsigned(s["count"], "/seeds/count");
            if (cfg.seeds.count == 0) fail("/seeds/count", "must be positive");
        }
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        only_keys(s, "/sweep", {"axis", "values"});
        SweepSpec sweep;
        try {
            sweep.axis = parse_sweep_axis(get_string(require(s, "/sweep", "axis"), "/sweep/axis"));
        } catch (const std::invalid_argument& e) {
            fail("/sweep/axis", e.what());
        }
        const json& values = require(s, "/sweep", "values");
        if (!values.is_array() || values.empty()) fail("/sweep/values", "expected a nonempty array");
        for (std::size_t k = 0; k < values.size(); ++k)
            sweep.values.push_back(get_number(values[k], "/sweep/values/" + std::to_string(k)));
        cfg.sweep = std::move(sweep);
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        only_keys(o, "/output", {"path", "format"});
        if (o.contains("path")) cfg.output.path = get_string(o["path"], "/output/path");
        if (o.contains("format")) cfg.output.format = get_string(o["format"], "/output/format");
        if (cfg.output.format != "csv" && cfg.output.format != "json") fail("/output/format", "expected csv or json");
    }

    try {
        const SystemConfig resolved = cfg.system.resolve();
        const auto problems = validate_config(resolved);
        if (!problems.empty()) fail("/system", problems.front());
    } catch (const std::invalid_argument& e) {
        fail("/system", e.what());
    }
    return cfg;
}

std::string emit_run_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

RunConfig parse_run_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigParseError(line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
    return run_config_from_json(j);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_run_config(buf.str());
    } catch (const ConfigParseError& e) {
        throw ConfigParseError(path + ":" + e.what());
    }
}

}  // namespace bmw
