#include "bmw/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bmw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double mean(const Distribution& dist) {
    return std::visit(
        overloaded{
            [](const Bernoulli& b) { return b.p; },
            [](const Deterministic& d) { return static_cast<double>(d.value); },
            [](const FiniteDiscrete& f) {
                double m = 0.0;
                for (std::size_t k = 0; k < f.values.size(); ++k) m += f.probs[k] * f.values[k];
                return m;
            },
        },
        dist);
}

double variance(const Distribution& dist) {
    return std::visit(
        overloaded{
            [](const Bernoulli& b) { return b.p * (1.0 - b.p); },
            [](const Deterministic&) { return 0.0; },
            [](const FiniteDiscrete& f) {
                const double m = mean(Distribution{f});
                double v = 0.0;
                for (std::size_t k = 0; k < f.values.size(); ++k) {
                    const double d = f.values[k] - m;
                    v += f.probs[k] * d * d;
                }
                return v;
            },
        },
        dist);
}

std::uint32_t support_max(const Distribution& dist) {
    return std::visit(
        overloaded{
            [](const Bernoulli& b) -> std::uint32_t { return b.p > 0.0 ? 1u : 0u; },
            [](const Deterministic& d) { return d.value; },
            [](const FiniteDiscrete& f) {
                std::uint32_t m = 0;
                for (std::size_t k = 0; k < f.values.size(); ++k)
                    if (f.probs[k] > 0.0) m = std::max(m, f.values[k]);
                return m;
            },
        },
        dist);
}

double zero_probability(const Distribution& dist) {
    return std::visit(
        overloaded{
            [](const Bernoulli& b) { return 1.0 - b.p; },
            [](const Deterministic& d) { return d.value == 0 ? 1.0 : 0.0; },
            [](const FiniteDiscrete& f) {
                double z = 0.0;
                for (std::size_t k = 0; k < f.values.size(); ++k)
                    if (f.values[k] == 0) z += f.probs[k];
                return z;
            },
        },
        dist);
}

std::string describe(const Distribution& dist) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Bernoulli& b) { os << "Bernoulli(" << b.p << ")"; },
                   [&](const Deterministic& d) { os << "Deterministic(" << d.value << ")"; },
                   [&](const FiniteDiscrete& f) {
                       os << "FiniteDiscrete(";
                       for (std::size_t k = 0; k < f.values.size(); ++k)
                           os << (k ? "," : "") << f.values[k] << ":" << (k < f.probs.size() ? f.probs[k] : 0.0);
                       os << ")";
                   },
               },
               dist);
    return os.str();
}

std::vector<std::string> validate_distribution(const Distribution& dist) {
    std::vector<std::string> out;
    std::visit(overloaded{
                   [&](const Bernoulli& b) {
                       if (!(b.p >= 0.0 && b.p <= 1.0))
                           out.push_back("Bernoulli rate " + std::to_string(b.p) + " outside [0,1]");
                   },
                   [](const Deterministic&) {},
                   [&](const FiniteDiscrete& f) {
                       if (f.values.empty()) {
                           out.emplace_back("FiniteDiscrete has empty support");
                           return;
                       }
                       if (f.values.size() != f.probs.size()) {
                           out.emplace_back("FiniteDiscrete values/probs length mismatch");
                           return;
                       }
                       for (double p : f.probs)
                           if (!(p >= 0.0 && p <= 1.0)) out.emplace_back("FiniteDiscrete probability outside [0,1]");
                       const double total = std::accumulate(f.probs.begin(), f.probs.end(), 0.0);
                       if (std::abs(total - 1.0) > 1e-12)
                           out.push_back("FiniteDiscrete probabilities sum to " + std::to_string(total));
                   },
               },
               dist);
    return out;
}

std::uint32_t TrafficSpec::arrival_bound() const { return std::max<std::uint32_t>(1, support_max(arrival)); }
std::uint32_t TrafficSpec::service_bound() const { return std::max<std::uint32_t>(1, support_max(service)); }

std::vector<std::string> validate_traffic(const TrafficSpec& spec) {
    std::vector<std::string> out;
    for (auto& v : validate_distribution(spec.arrival)) out.push_back("arrival: " + v);
    for (auto& v : validate_distribution(spec.service)) out.push_back("service: " + v);
    if (out.empty() && !(mean(spec.service) > 0.0)) out.emplace_back("service: mean service rate must be positive");
    if (spec.declared_interarrival_bound && *spec.declared_interarrival_bound == 0)
        out.emplace_back("declared inter-arrival bound must be positive");
    return out;
}

MeanRates mean_rates(const TrafficSpec& spec) { return {mean(spec.arrival), mean(spec.service)}; }

std::optional<std::uint32_t> interarrival_bound(const TrafficSpec& spec) {
    if (spec.declared_interarrival_bound) return spec.declared_interarrival_bound;
    // At least one arrival every slot means consecutive jobs are at most one
    // slot apart; any mass at zero gives geometric gaps.
    if (zero_probability(spec.arrival) == 0.0) return 1u;
    return std::nullopt;
}

StreamHandle::StreamHandle(std::uint64_t master_seed, std::size_t queue, StreamRole role)
    : seed_(master_seed), queue_(queue), role_(role) {
    const std::uint64_t id = (static_cast<std::uint64_t>(queue) << 1) | static_cast<std::uint64_t>(role);
    key_ = mix(mix(master_seed ^ 0x243f6a8885a308d3ULL) + id * 0x9e3779b97f4a7c15ULL);
    // Distinct odd increments per stream keep the Weyl sequences apart.
    gamma_ = mix(key_ ^ 0x13198a2e03707344ULL) | 1ULL;
}

std::uint32_t sample(const StreamHandle& stream, const Distribution& dist, Slot t) {
    return std::visit(overloaded{
                          [&](const Bernoulli& b) -> std::uint32_t { return stream.uniform(t) < b.p ? 1u : 0u; },
                          [](const Deterministic& d) { return d.value; },
                          [&](const FiniteDiscrete& f) {
                              const double u = stream.uniform(t);
                              double acc = 0.0;
                              for (std::size_t k = 0; k < f.values.size(); ++k) {
                                  acc += f.probs[k];
                                  if (u < acc) return f.values[k];
                              }
                              // Rounding slack in the cumulative sum lands on the last positive-mass value.
                              for (std::size_t k = f.values.size(); k-- > 0;)
                                  if (f.probs[k] > 0.0) return f.values[k];
                              return f.values.back();
                          },
                      },
                      dist);
}

}  // namespace bmw
