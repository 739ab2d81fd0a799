#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bmw {

/// Discrete slot index. Slot 0 is the first slot of every run.
using Slot = std::int64_t;

struct Bernoulli {
    double p = 0.0;
    bool operator==(const Bernoulli&) const = default;
};

struct Deterministic {
    std::uint32_t value = 0;
    bool operator==(const Deterministic&) const = default;
};

/// Finite support distribution; probs must sum to one.
struct FiniteDiscrete {
    std::vector<std::uint32_t> values;
    std::vector<double> probs;
    bool operator==(const FiniteDiscrete&) const = default;
};

/// Per-slot count distribution used for both arrivals and services.
using Distribution = std::variant<Bernoulli, Deterministic, FiniteDiscrete>;

double mean(const Distribution& dist);
double variance(const Distribution& dist);
/// Largest value in the support (0 for an all-zero distribution).
std::uint32_t support_max(const Distribution& dist);
/// P(X = 0).
double zero_probability(const Distribution& dist);
std::string describe(const Distribution& dist);
std::vector<std::string> validate_distribution(const Distribution& dist);

/// Arrival and service processes of one queue.
///
/// Both processes are i.i.d. across slots with bounded support. The bounds
/// A_max and S_max are derived from the support and clamped to at least 1.
struct TrafficSpec {
    Distribution arrival = Bernoulli{0.0};
    Distribution service = Bernoulli{1.0};
    /// Optional declared bound on inter-arrival gaps (e.g. for a truncated
    /// process). Overrides the support-based derivation.
    std::optional<std::uint32_t> declared_interarrival_bound;

    std::uint32_t arrival_bound() const;
    std::uint32_t service_bound() const;

    bool operator==(const TrafficSpec&) const = default;
};

std::vector<std::string> validate_traffic(const TrafficSpec& spec);

struct MeanRates {
    double lambda = 0.0;
    double mu = 0.0;
};

MeanRates mean_rates(const TrafficSpec& spec);

/// Bound V_max on inter-arrival times, or nullopt when the gap between two
/// arrivals has unbounded support. Only then do the waiting-time policy's
/// analytic interval bounds apply; simulation runs either way.
std::optional<std::uint32_t> interarrival_bound(const TrafficSpec& spec);

enum class StreamRole : std::uint8_t { arrival = 0, service = 1 };

/// Counter-based random stream.
///
/// The value drawn at slot t is a pure function of (seed, queue, role, t), so
/// two simulations with the same seed see identical samples no matter which
/// slots or queues they consult.
class StreamHandle {
public:
    StreamHandle() = default;
    StreamHandle(std::uint64_t master_seed, std::size_t queue, StreamRole role);

    std::uint64_t bits(Slot t) const noexcept {
        return mix(key_ + static_cast<std::uint64_t>(t + 1) * gamma_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(Slot t) const noexcept {
        return static_cast<double>(bits(t) >> 11) * 0x1.0p-53;
    }

    std::uint64_t master_seed() const noexcept { return seed_; }
    std::size_t queue() const noexcept { return queue_; }
    StreamRole role() const noexcept { return role_; }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_ = 0;
    std::size_t queue_ = 0;
    StreamRole role_ = StreamRole::arrival;
    std::uint64_t key_ = 0;
    std::uint64_t gamma_ = 0x9e3779b97f4a7c15ULL;
};

/// Draws from dist at slot t of the given stream.
std::uint32_t sample(const StreamHandle& stream, const Distribution& dist, Slot t);

}  // namespace bmw
