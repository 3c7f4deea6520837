#pragma once

// Spot-beam receiver SNR model: SNR = SNR_max - location attenuation - weather attenuation.
//
// Location attenuation comes from the parabolic-antenna pattern (2 J1(x) / x)^2 with
// x = sin(theta) * pi * D / lambda, for receivers spread uniformly over the coverage disk of a
// nadir-pointing geostationary beam. Weather attenuation is drawn from a tabulated CDF.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hmts {

/// First-order Bessel function of the first kind. Absolute error below 1e-10 on [0, 10].
double bessel_j1(double x) noexcept;

/// 2 J1(x) / x, continuous at 0.
double airy_amplitude(double x) noexcept;

/// Below this argument airy_amplitude uses its Taylor series instead of J1(x)/x.
inline constexpr double kAirySeriesCutoff = 1e-3;

inline constexpr double kSpeedOfLight = 299'792'458.0;         // m/s
inline constexpr double kGeostationaryAltitude = 35'786'000.0; // m

/// edge_level_db is the positive depth (dB) of the beam edge below boresight.
class AntennaConfig {
public:
    /// Throws ValidationError unless diameter, frequency > 0, the edge depth is strictly
    /// positive and finite, and the first null of the pattern lies inside the visible hemisphere.
    AntennaConfig(double diameter_m, double frequency_hz, double edge_level_db);

    double diameter_m() const noexcept { return diameter_m_; }
    double frequency_hz() const noexcept { return frequency_hz_; }
    double edge_level_db() const noexcept { return edge_level_db_; }
    double wavelength_m() const noexcept { return kSpeedOfLight / frequency_hz_; }

    /// 1.5 m, 20 GHz, 4 dB edge.
    static AntennaConfig reference();

private:
    double diameter_m_;
    double frequency_hz_;
    double edge_level_db_;
};

/// G(theta) / G_max for off-axis angle theta_off (radians), 0 <= theta_off < pi/2.
double antenna_gain_rel(double theta_off, const AntennaConfig& cfg) noexcept;

/// Smallest theta > 0 with relative gain 10^(-edge/10), by bisection over (0, first null).
double beam_edge_angle(const AntennaConfig& cfg) noexcept;

/// -10 log10(antenna_gain_rel).
double location_attenuation_db(double theta_off, const AntennaConfig& cfg) noexcept;

/// Ground radius (m) of the coverage disk under a nadir-pointing geostationary beam.
double coverage_radius_m(const AntennaConfig& cfg) noexcept;

/// Random stream handed to the samplers. Substreams are derived from a master seed and a key
/// path (e.g. grid index, repetition, receiver index), independent of evaluation order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Seed for a substream: SplitMix64 folding of `keys` into `seed`.
    static std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;
    static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
        return RandomStream(derive_seed(seed, keys));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Location attenuation of a receiver placed uniformly at random over the coverage disk.
double sample_location_attenuation(RandomStream& rng, const AntennaConfig& cfg) noexcept;

/// Tabulated CDF of weather attenuation: (attenuation dB, cumulative probability) points.
class WeatherCdf {
public:
    /// Throws ValidationError unless probabilities run nondecreasing from exactly 0 to exactly 1,
    /// attenuations are nondecreasing, the first attenuation is >= 0 and there are >= 2 points.
    explicit WeatherCdf(std::vector<std::pair<double, double>> points);

    /// CSV with header `attenuation_db,cum_prob`.
    static WeatherCdf load_csv(const std::filesystem::path& path);
    static WeatherCdf parse_csv(std::string_view text, const std::string& source = "<memory>");
    /// All mass at one attenuation value.
    static WeatherCdf point_mass(double attenuation_db);

    const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

    /// Linear interpolation of the CDF at `attenuation_db`.
    double cdf(double attenuation_db) const noexcept;
    /// Generalized inverse with linear interpolation inside each tabulated segment.
    double quantile(double u) const noexcept;

private:
    std::vector<std::pair<double, double>> points_;
};

double sample_weather_attenuation(RandomStream& rng, const WeatherCdf& cdf) noexcept;

struct BeamDraw {
    double location_att_db = 0.0;
    double weather_att_db = 0.0;
    double snr_db = 0.0;
};

/// n independent receivers; receiver i uses substream derive(seed, {i}).
std::vector<BeamDraw> draw_population(std::size_t n, double snr_max_db, const AntennaConfig& cfg,
                                      const WeatherCdf& cdf, std::uint64_t seed);

} // namespace hmts
