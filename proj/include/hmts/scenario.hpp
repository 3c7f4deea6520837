#pragma once

// Scenario files: INI-style sections of key = value pairs. Relative paths are resolved
// against the directory holding the scenario file.
//
//   [tables]     baseline = PATH[, PATH...]   hierarchical = PATH[, PATH...]   anomalies = PATH
//   [weather]    cdf = PATH
//   [antenna]    diameter_m, frequency_hz, edge_level_db
//   [campaign]   grid = a:b:step, receivers, repetitions, families, seed, workers, outage
//   [output]     dir = PATH

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmts/beam_channel.hpp"
#include "hmts/modcod.hpp"
#include "hmts/rate_optimizer.hpp"
#include "hmts/simulation.hpp"

namespace hmts {

struct Scenario {
    std::vector<std::filesystem::path> baseline_tables;
    std::vector<std::filesystem::path> hierarchical_tables;
    std::optional<std::filesystem::path> anomalies;
    std::filesystem::path weather_cdf;

    double diameter_m = 1.5;
    double frequency_hz = 20e9;
    double edge_level_db = 4.0;

    std::string grid = "1:16:0.5";
    std::size_t receivers = 500;
    std::size_t repetitions = 100;
    std::string families = "all";
    std::uint64_t seed = 1;
    unsigned workers = 0;
    OutagePolicy outage = OutagePolicy::Exclude;

    std::filesystem::path out_dir = "hmts_out";
};

/// Parses a scenario file. Throws ParseError / ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

/// Built-in defaults pointing at the shipped data directory.
Scenario default_scenario();

/// Parses "a:b:step".
std::vector<double> parse_grid(const std::string& text);

OutagePolicy parse_outage_policy(const std::string& text);

/// "all" = one curve per loaded hierarchical family; "combined" = those plus a combined curve;
/// otherwise a comma list of family names, "combined" and "baseline".
std::vector<CurveSpec> parse_curves(const std::string& text, const ThresholdTable& table);

/// Threshold table, weather CDF and antenna of a scenario, validated.
struct LoadedScenario {
    ThresholdTable table;
    WeatherCdf weather;
    AntennaConfig antenna;
    std::vector<Diagnostic> warnings;
};

/// Throws ValidationError on any hard failure, including a missing baseline table.
LoadedScenario load_inputs(const Scenario& scenario);

} // namespace hmts
