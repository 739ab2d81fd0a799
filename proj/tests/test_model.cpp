#include <algorithm>

#include "bmw/capacity.hpp"
#include "bmw/model.hpp"
#include "doctest.h"

using namespace bmw;

namespace {

SystemConfig polling(std::size_t n) {
    SystemConfig c;
    c.n_queues = n;
    for (QueueIndex q = 0; q < n; ++q) {
        c.schedules.push_back(Schedule{q});
        c.traffic.push_back({Bernoulli{0.1}, Bernoulli{0.5}, std::nullopt});
    }
    return c;
}

bool mentions(const std::vector<std::string>& v, std::string_view text) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("schedule basics") {
    const auto s = Schedule::from_one_based({5, 1, 3, 3});
    CHECK(s.to_string() == "{1,3,5}");
    CHECK(s.size() == 3);
    CHECK(s.contains(0));
    CHECK_FALSE(s.contains(1));
    CHECK(s.is_strict_subset_of(Schedule::from_one_based({1, 3, 5, 6})));
    CHECK_FALSE(s.is_strict_subset_of(s));
    CHECK(s.one_based() == std::vector<std::size_t>{1, 3, 5});
}

TEST_CASE("schedule weight") {
    const std::vector<double> q{2, 9, 1, 0, 4, 3};
    CHECK(schedule_weight(Schedule::from_one_based({1, 3, 5, 6}), q) == 10);
    CHECK(schedule_weight(Schedule::from_one_based({2}), std::vector<double>{5, 7, 1, 1}) == 7);
    CHECK(schedule_weight(Schedule::from_one_based({1, 2}), std::vector<double>(4, 0.0)) == 0);
}

TEST_CASE("schedule weight is linear") {
    const auto s = Schedule::from_one_based({1, 4, 5});
    const std::vector<double> a{1.5, 2, 0, 3, 7};
    const std::vector<double> b{0, 4, 9, 0.5, 1};
    for (double x : {0.0, 0.5, 3.0}) {
        for (double y : {0.0, 1.0, 2.5}) {
            std::vector<double> m(a.size());
            for (std::size_t k = 0; k < a.size(); ++k) m[k] = x * a[k] + y * b[k];
            CHECK(schedule_weight(s, m) == doctest::Approx(x * schedule_weight(s, a) + y * schedule_weight(s, b)));
        }
    }
}

TEST_CASE("validate_config accepts a polling system") {
    CHECK(validate_config(polling(4)).empty());
    const auto c = polling(4);
    CHECK(c.max_concurrency() == 1);
    CHECK(c.normalized_loads()[0] == doctest::Approx(0.2));
}

TEST_CASE("validate_config reports violations as data") {
    SystemConfig c = polling(4);
    c.schedules.pop_back();
    CHECK(mentions(validate_config(c), "queue 4 uncovered"));

    SystemConfig six;
    six.n_queues = 6;
    six.schedules = {Schedule::from_one_based({1, 3, 5, 6}), Schedule::from_one_based({1, 3, 5}),
                     Schedule::from_one_based({2, 4, 5, 6})};
    six.traffic.assign(6, {Bernoulli{0.1}, Bernoulli{0.5}, std::nullopt});
    CHECK(mentions(validate_config(six), "non-maximal schedule {1,3,5}"));

    SystemConfig z = polling(2);
    z.switch_overhead = 0;
    CHECK_FALSE(validate_config(z).empty());

    SystemConfig r = polling(2);
    r.traffic[1].arrival = Bernoulli{1.5};
    CHECK_FALSE(validate_config(r).empty());

    SystemConfig d = polling(2);
    d.schedules.push_back(Schedule{0});
    CHECK_FALSE(validate_config(d).empty());

    SystemConfig e = polling(2);
    e.schedules.push_back(Schedule{});
    CHECK_FALSE(validate_config(e).empty());

    SystemConfig o = polling(2);
    o.schedules.push_back(Schedule{5});
    CHECK_FALSE(validate_config(o).empty());
}

TEST_CASE("beam topology accepts the four schedules and rejects conflicting extras") {
    ConflictSpec spec{6, 4, {{0, 1}, {2, 3}}};
    SystemConfig c;
    c.n_queues = 6;
    c.schedules = enumerate_maximal_schedules(spec);
    c.traffic.assign(6, {Bernoulli{0.1}, Bernoulli{0.5}, std::nullopt});
    CHECK(validate_config(c).empty());
    CHECK(c.schedules.size() == 4);
    // A fifth candidate holding both 1 and 2 is not conflict-free, so it cannot be in the enumeration.
    const auto bad = Schedule::from_one_based({1, 2, 5, 6});
    CHECK(std::find(c.schedules.begin(), c.schedules.end(), bad) == c.schedules.end());
}

TEST_CASE("policy variants parse") {
    CHECK(parse_policy_variant("QBMW") == PolicyVariant::qbmw);
    CHECK(parse_policy_variant("w-bmw") == PolicyVariant::wbmw);
    CHECK(parse_policy_variant("vfmw") == PolicyVariant::vfmw);
    CHECK(parse_policy_variant("maxweight") == PolicyVariant::max_weight);
    CHECK_THROWS(parse_policy_variant("fifo"));
    CHECK(validate_policy({PolicyVariant::qbmw, 0.001}).empty());
    CHECK_FALSE(validate_policy({PolicyVariant::qbmw, 1.0}).empty());
    CHECK_FALSE(validate_policy({PolicyVariant::vfmw, 0.0}).empty());
}
