#pragma once

// Two-receiver rate regions, the equal-rate point of their convex hull, and the
// n-receiver aggregation of hierarchical-modulation vs classical time sharing.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hmts/modcod.hpp"

namespace hmts {

/// Where a rate pair comes from.
struct PairOrigin {
    enum class Kind { Idle, WeakOnly, StrongOnly, Hierarchical };
    Kind kind = Kind::Idle;
    /// Modcod serving the weak / strong receiver (absent when it gets nothing).
    std::optional<ModcodChoice> weak;
    std::optional<ModcodChoice> strong;
};

/// Spectral efficiencies (bit/s/Hz) of the weak (r1) and strong (r2) receiver.
struct RatePair {
    double r1 = 0.0;
    double r2 = 0.0;
    PairOrigin origin{};
};

/// tau of the time on point_a, the rest on point_b.
struct TimeShare {
    double tau = 1.0;
    RatePair point_a;
    RatePair point_b;
};

struct EqualRate {
    double r_hm = 0.0;
    TimeShare schedule;
};

struct PairSolution {
    double r_hm = 0.0;
    double r_ts = 0.0;
    std::vector<TimeShare> schedule;
};

/// Precomputed columns of a threshold table, for repeated pair evaluations.
class PairEvaluator {
public:
    explicit PairEvaluator(const ThresholdTable& table);

    /// Best single-stream modcod for one receiver.
    std::optional<ModcodChoice> best_single(double snr_db) const;

    /// Achievable pairs with dominated hierarchical code-rate combinations pruned: per scheme and
    /// stream assignment only the best HE rate and best LE rate are kept (the two conditions are
    /// independent). Always contains (0,0).
    std::vector<RatePair> achievable_pairs(double snr_weak, double snr_strong) const;

    PairSolution solve(double snr_weak, double snr_strong) const;

private:
    struct Scheme {
        SchemeId id;
        std::vector<Modcod> he;
        std::vector<Modcod> le;
    };
    std::vector<Modcod> singles_;
    std::vector<Scheme> hierarchical_;
};

/// Convenience wrapper over PairEvaluator. Requires snr_weak <= snr_strong.
std::vector<RatePair> achievable_pairs(double snr_weak, double snr_strong, const ThresholdTable& table);

/// Upper-right boundary of the hull: Pareto-optimal vertices, r1 ascending, r2 descending.
std::vector<RatePair> hull_vertices(std::span<const RatePair> pairs);

/// Largest R such that some point of the convex hull of `pairs` offers at least R to both
/// receivers (rate can always be left unused). Pareto staircase + upper hull, O(n log n).
/// When the diagonal hits a hull vertex the schedule is that vertex with tau = 1.
EqualRate equal_rate_point(std::span<const RatePair> pairs);

/// (1/r_weak + 1/r_strong)^-1, 0 if either is 0.
double classical_pair_rate(double r_weak, double r_strong) noexcept;

struct Grouping {
    /// Index pairs (weak, strong) into the input.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    /// Median receiver left alone when the count is odd.
    std::optional<std::size_t> unpaired;
};

/// Sort by SNR (ties by index), then repeatedly pair the current minimum with the current maximum.
Grouping group_receivers(std::span<const double> snrs);

/// Harmonic combination (sum 1/r)^-1; 0 if any element is 0. Throws on an empty list.
double aggregate_hm(std::span<const double> pair_rates);
double aggregate_ts(std::span<const double> rates);

/// How receivers that cannot decode any single-stream modcod enter the aggregate.
enum class OutagePolicy {
    /// Dropped from both schemes before grouping (they can be served by neither).
    Exclude,
    /// Kept with rate 0, which zeroes both harmonic sums.
    ZeroRate,
};

struct SystemGain {
    double r_hm = 0.0;
    double r_ts = 0.0;
    /// (r_hm - r_ts) / r_ts; 0 when r_ts is 0.
    double gain = 0.0;
    std::size_t outage_receivers = 0;
};

SystemGain system_gain(std::span<const double> snrs, const PairEvaluator& evaluator,
                       OutagePolicy policy = OutagePolicy::Exclude);
SystemGain system_gain(std::span<const double> snrs, const ThresholdTable& table,
                       OutagePolicy policy = OutagePolicy::Exclude);

} // namespace hmts
