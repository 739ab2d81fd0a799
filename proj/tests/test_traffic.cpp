#include <cmath>

#include "bmw/traffic.hpp"
#include "doctest.h"

using namespace bmw;

TEST_CASE("samples stay inside the support and repeat for the same slot") {
    const StreamHandle s(7, 2, StreamRole::arrival);
    const Distribution d = FiniteDiscrete{{0, 3, 5}, {0.2, 0.5, 0.3}};
    for (Slot t = 0; t < 2000; ++t) {
        const auto v = sample(s, d, t);
        CHECK((v == 0 || v == 3 || v == 5));
        CHECK(sample(s, d, t) == v);
    }
}

TEST_CASE("degenerate distributions") {
    const StreamHandle s(1, 0, StreamRole::service);
    for (Slot t = 0; t < 100; ++t) {
        CHECK(sample(s, Bernoulli{0.0}, t) == 0);
        CHECK(sample(s, Bernoulli{1.0}, t) == 1);
        CHECK(sample(s, Deterministic{1}, t) == 1);
    }
}

TEST_CASE("Bernoulli(0.5) empirical mean over a million slots") {
    const StreamHandle s(12345, 0, StreamRole::arrival);
    std::uint64_t sum = 0;
    const Slot n = 1'000'000;
    for (Slot t = 0; t < n; ++t) sum += sample(s, Bernoulli{0.5}, t);
    CHECK(std::abs(static_cast<double>(sum) / n - 0.5) <= 0.002);
}

TEST_CASE("empirical means stay within four standard errors for almost every seed") {
    const Distribution d = FiniteDiscrete{{0, 1, 4}, {0.5, 0.3, 0.2}};
    const double m = mean(d);
    const double sd = std::sqrt(variance(d));
    const Slot n = 20'000;
    int outside = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const StreamHandle s(seed, 3, StreamRole::arrival);
        double sum = 0;
        for (Slot t = 0; t < n; ++t) sum += sample(s, d, t);
        if (std::abs(sum / n - m) > 4 * sd / std::sqrt(static_cast<double>(n))) ++outside;
    }
    CHECK(outside <= 1);
}

TEST_CASE("different streams are not copies of each other") {
    const StreamHandle a(5, 0, StreamRole::arrival);
    const StreamHandle b(5, 0, StreamRole::service);
    const StreamHandle c(5, 1, StreamRole::arrival);
    const StreamHandle d(6, 0, StreamRole::arrival);
    int ab = 0, ac = 0, ad = 0;
    for (Slot t = 0; t < 10'000; ++t) {
        const auto x = sample(a, Bernoulli{0.5}, t);
        ab += x == sample(b, Bernoulli{0.5}, t);
        ac += x == sample(c, Bernoulli{0.5}, t);
        ad += x == sample(d, Bernoulli{0.5}, t);
    }
    for (int agree : {ab, ac, ad}) {
        CHECK(agree > 4700);
        CHECK(agree < 5300);
    }
}

TEST_CASE("mean rates") {
    const auto r = mean_rates({Bernoulli{0.119}, Bernoulli{0.5}, std::nullopt});
    CHECK(r.lambda == doctest::Approx(0.119));
    CHECK(r.mu == doctest::Approx(0.5));
    CHECK(mean_rates({Bernoulli{0.1}, Deterministic{1}, std::nullopt}).mu == 1.0);
    CHECK(mean(FiniteDiscrete{{0, 2}, {0.5, 0.5}}) == doctest::Approx(1.0));
}

TEST_CASE("inter-arrival bound") {
    CHECK(interarrival_bound({Deterministic{1}, Bernoulli{1.0}, std::nullopt}) == 1u);
    CHECK_FALSE(interarrival_bound({Bernoulli{0.5}, Bernoulli{1.0}, std::nullopt}).has_value());
    CHECK(interarrival_bound({FiniteDiscrete{{1, 2}, {0.5, 0.5}}, Bernoulli{1.0}, std::nullopt}) == 1u);
    CHECK(interarrival_bound({Bernoulli{0.5}, Bernoulli{1.0}, 6u}) == 6u);
}

TEST_CASE("distribution validation") {
    CHECK(validate_distribution(Bernoulli{0.3}).empty());
    CHECK_FALSE(validate_distribution(Bernoulli{1.2}).empty());
    CHECK_FALSE(validate_distribution(Bernoulli{-0.1}).empty());
    CHECK_FALSE(validate_distribution(FiniteDiscrete{{0, 1}, {0.5, 0.4}}).empty());
    CHECK_FALSE(validate_distribution(FiniteDiscrete{{0, 1}, {1.0}}).empty());
    CHECK(validate_distribution(FiniteDiscrete{{0, 1}, {0.25, 0.75}}).empty());
    CHECK_FALSE(validate_traffic({Bernoulli{0.1}, Bernoulli{0.0}, std::nullopt}).empty());
}

TEST_CASE("support bounds") {
    CHECK(support_max(Bernoulli{0.3}) == 1);
    CHECK(support_max(Deterministic{4}) == 4);
    CHECK(support_max(FiniteDiscrete{{0, 7, 2}, {0.2, 0.3, 0.5}}) == 7);
    const TrafficSpec t{Bernoulli{0.0}, Deterministic{0}, std::nullopt};
    CHECK(t.arrival_bound() >= 1);
}
