#include "bmw/config_io.hpp"
#include "doctest.h"

using namespace bmw;

namespace {

std::string error_of(std::string_view text) {
    try {
        parse_run_config(text);
    } catch (const ConfigParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults") {
    const RunConfig c = parse_run_config(R"({"system": {"scenario": "S1"}})");
    CHECK(c.horizon == 2'000'000);
    CHECK(c.warmup == 200'000);
    CHECK(c.seeds.seeds().size() == 10);
    CHECK(c.seeds.seeds().front() == 1);
    REQUIRE(c.policies.size() == 1);
    CHECK(c.policies[0].variant == PolicyVariant::qbmw);
    CHECK_FALSE(c.sweep);
    CHECK(c.output.format == "csv");
}

TEST_CASE("preset config round-trips") {
    RunConfig c;
    c.system.scenario = "S7";
    c.system.beta_star = 0.93;
    c.system.switch_overhead = 3;
    c.system.schedules = std::vector<Schedule>{{0, 1}, {2, 3}, {4, 5}, {6, 7}};
    c.policies = {{PolicyVariant::wbmw, 0.25}, {PolicyVariant::vfmw, 0.8}};
    c.horizon = 12345;
    c.warmup = 100;
    c.seeds.list = {4, 9, 16};
    c.sweep = SweepSpec{SweepAxis::beta_star, {0.5, 0.75}};
    c.output = {"out.json", "json"};
    const std::string text = emit_run_config(c);
    CHECK(parse_run_config(text) == c);
    CHECK(emit_run_config(parse_run_config(text)) == text);
}

TEST_CASE("inline config round-trips") {
    const char* text = R"({
      "system": {
        "n_queues": 3, "switch_overhead": 2,
        "schedules": [[1], [2], [3]],
        "traffic": [
          {"arrival": {"type": "bernoulli", "p": 0.1}, "service": {"type": "bernoulli", "p": 0.5}},
          {"arrival": {"type": "deterministic", "value": 0}, "service": {"type": "deterministic", "value": 1}},
          {"arrival": {"type": "discrete", "values": [0, 2], "probs": [0.75, 0.25]},
           "service": {"type": "discrete", "values": [3, 5], "probs": [0.5, 0.5]}, "interarrival_bound": 4}
        ]
      },
      "policies": [{"variant": "qbmw", "alpha": 0.5}],
      "seeds": {"base": 7, "count": 2},
      "horizon": 1000, "warmup": 10
    })";
    const RunConfig c = parse_run_config(text);
    REQUIRE(c.system.inline_config);
    const SystemConfig& s = *c.system.inline_config;
    CHECK(s.n_queues == 3);
    CHECK(s.switch_overhead == 2);
    CHECK(s.traffic[2].declared_interarrival_bound == 4u);
    CHECK(mean(s.traffic[2].arrival) == doctest::Approx(0.5));
    CHECK(c.seeds.seeds() == std::vector<std::uint64_t>{7, 8});
    CHECK(c.system.label() == "custom");
    CHECK(parse_run_config(emit_run_config(c)) == c);
}

TEST_CASE("conflict form enumerates schedules") {
    const RunConfig c = parse_run_config(R"({"system": {
        "n_queues": 3, "conflicts": {"max_concurrency": 2, "pairs": [[1, 2]]},
        "traffic": [
          {"arrival": {"type": "bernoulli", "p": 0.1}, "service": {"type": "bernoulli", "p": 0.5}},
          {"arrival": {"type": "bernoulli", "p": 0.1}, "service": {"type": "bernoulli", "p": 0.5}},
          {"arrival": {"type": "bernoulli", "p": 0.1}, "service": {"type": "bernoulli", "p": 0.5}}]}})");
    const auto& s = c.system.inline_config->schedules;
    CHECK(s.size() == 2);
    CHECK(validate_config(*c.system.inline_config).empty());
}

TEST_CASE("errors name the offending field") {
    CHECK(error_of(R"({"system": {"scenario": "S1"}, "horizen": 5})").find("horizen") != std::string::npos);
    CHECK(error_of(R"({"system": {"scenario": "S1", "bogus": 1}})").find("/system") == 0);
    CHECK(error_of(R"({"system": {"scenario": "S1"},
  "horizon": })").rfind("2:", 0) == 0);
    CHECK(error_of(R"({"system": {"scenario": "S1"}, "horizon": 10, "warmup": 20})").find("warmup exceeds horizon") !=
          std::string::npos);
    CHECK(error_of(R"({"system": {"scenario": "S3"}})") != "");
    CHECK(error_of(R"({"system": {"scenario": "S1"}, "policy": {"variant": "qbmw", "alpha": 1.5}})") != "");
    CHECK(error_of(R"({"system": {"scenario": "S1"}, "policy": {"variant": "fifo"}})").find("/policy") == 0);
    CHECK(error_of(R"({"system": {"n_queues": 2, "schedules": [[1]], "traffic": [
        {"arrival": {"type": "bernoulli", "p": 0.1}, "service": {"type": "bernoulli", "p": 0.5}},
        {"arrival": {"type": "bernoulli", "p": 0.1}, "service": {"type": "bernoulli", "p": 0.5}}]}})") != "");
    CHECK(error_of(R"({"system": {"scenario": "S1"}, "sweep": {"axis": "gamma", "values": [1]}})") != "");
    CHECK_THROWS_AS(load_run_config("/nonexistent/file.json"), ConfigParseError);
}

TEST_CASE("policy tokens") {
    CHECK(parse_policy_token("qbmw", 0.3) == PolicySpec{PolicyVariant::qbmw, 0.3});
    CHECK(parse_policy_token("vfmw:0.5", 0.3) == PolicySpec{PolicyVariant::vfmw, 0.5});
    CHECK(parse_policy_token("MaxWeight", 0.3).variant == PolicyVariant::max_weight);
    CHECK_THROWS(parse_policy_token("vfmw:abc", 0.3));
    CHECK_THROWS(parse_policy_token("lqf", 0.3));
}

TEST_CASE("distribution JSON") {
    for (const Distribution& d : {Distribution{Bernoulli{0.25}}, Distribution{Deterministic{3}},
                                  Distribution{FiniteDiscrete{{0, 1, 4}, {0.5, 0.25, 0.25}}}})
        CHECK(distribution_from_json(to_json(d)) == d);
    CHECK_THROWS(distribution_from_json(nlohmann::json{{"type", "bernoulli"}, {"p", 2.0}}));
}
