#pragma once

// Monte Carlo campaign: sweep SNR_max, draw receiver populations, and average the gain of
// hierarchical-modulation time sharing over classical time sharing, per scheme family.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmts/beam_channel.hpp"
#include "hmts/modcod.hpp"
#include "hmts/rate_optimizer.hpp"

namespace hmts {

/// One gain curve: the baseline plus `families` (empty = baseline only).
struct CurveSpec {
    std::string label;
    std::vector<Family> families;
};

/// One curve per hierarchical family in `table`, plus a "combined" curve with all of them.
std::vector<CurveSpec> family_curves(const ThresholdTable& table, bool include_combined);

std::string curve_label(Family f);

struct CampaignConfig {
    std::vector<double> snr_max_grid;
    std::size_t receivers = 500;
    std::size_t repetitions = 100;
    std::vector<CurveSpec> curves;
    std::uint64_t master_seed = 1;
    /// 0 = one worker per hardware thread.
    unsigned workers = 0;
    OutagePolicy outage = OutagePolicy::Exclude;
    bool keep_raw = false;

    /// a, a + step, ... up to b (inclusive, with 1e-9 slack).
    static std::vector<double> make_grid(double first, double last, double step);
};

struct CurveStats {
    double mean_gain = 0.0;
    double std_gain = 0.0; // sample standard deviation, 0 with fewer than two runs
    double median_gain = 0.0;
    std::size_t included_runs = 0;
    /// Runs with R_ts = 0, left out of the statistics.
    std::size_t excluded_runs = 0;
    double mean_outage_receivers = 0.0;
    std::size_t max_outage_receivers = 0;
    /// Per-repetition gains when CampaignConfig::keep_raw; nullopt for excluded runs.
    std::vector<std::optional<double>> raw;
};

struct SimulationReport {
    std::vector<double> snr_max_grid;
    std::vector<std::string> curves;
    /// stats[grid index][curve index]
    std::vector<std::vector<CurveStats>> stats;

    const CurveStats& at(std::size_t grid_index, const std::string& curve) const;
};

/// Throws ValidationError when the config is invalid, the table lacks single-stream
/// (baseline) modcods, or a requested family has no thresholds.
SimulationReport run_campaign(const CampaignConfig& cfg, const ThresholdTable& table, const AntennaConfig& beam,
                              const WeatherCdf& weather);

/// Grid-ordered (snr_max, mean gain). Throws ValidationError for an unknown curve.
std::vector<std::pair<double, double>> gain_curve(const SimulationReport& report, const std::string& curve);

/// Seed of the population drawn at (grid index, repetition).
std::uint64_t population_seed(std::uint64_t master_seed, std::size_t grid_index, std::size_t repetition) noexcept;

} // namespace hmts
