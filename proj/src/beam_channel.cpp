#include "hmts/beam_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmts/csv.hpp"
#include "hmts/errors.hpp"
#include "hmts/modcod.hpp"

namespace hmts {

namespace {

// First positive zero of J1.
constexpr double kJ1FirstZero = 3.8317059702075123156;

// Above this the Taylor series loses too many digits to cancellation.
constexpr double kJ1AsymptoticFrom = 12.0;

double j1_series(double x) {
    const double h = 0.5 * x;
    const double h2 = h * h;
    double term = h; // k = 0
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -h2 / (static_cast<double>(k) * static_cast<double>(k + 1));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel expansion: J1(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - 3 pi / 4.
double j1_asymptotic(double x) {
    constexpr double mu = 4.0; // 4 nu^2
    double p = 1.0;
    double q = 0.0;
    double term = 1.0; // a_k / x^k
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) >= prev) break;
        prev = std::abs(term);
        // k odd -> Q, k even -> P, signs alternate in pairs.
        const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
        if (k % 2 == 1)
            q += sign * term;
        else
            p += sign * term;
        if (prev < 1e-17) break;
    }
    const double chi = x - 0.75 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double theta_of_x(double x, const AntennaConfig& cfg) {
    return std::asin(x * cfg.wavelength_m() / (std::numbers::pi * cfg.diameter_m()));
}

} // namespace

double bessel_j1(double x) noexcept {
    if (x < 0.0) return -bessel_j1(-x);
    return x < kJ1AsymptoticFrom ? j1_series(x) : j1_asymptotic(x);
}

double airy_amplitude(double x) noexcept {
    if (std::abs(x) < kAirySeriesCutoff) {
        const double x2 = x * x;
        return 1.0 - x2 / 8.0 + x2 * x2 / 192.0;
    }
    return 2.0 * bessel_j1(x) / x;
}

// --- antenna ----------------------------------------------------------------

AntennaConfig::AntennaConfig(double diameter_m, double frequency_hz, double edge_level_db)
    : diameter_m_(diameter_m), frequency_hz_(frequency_hz), edge_level_db_(edge_level_db) {
    if (!(diameter_m > 0.0 && std::isfinite(diameter_m))) throw ValidationError("antenna diameter must be > 0");
    if (!(frequency_hz > 0.0 && std::isfinite(frequency_hz))) throw ValidationError("frequency must be > 0");
    if (!(edge_level_db > 0.0 && std::isfinite(edge_level_db)))
        throw ValidationError("beam edge level must be a strictly positive, finite depth in dB (got " +
                              format_number(edge_level_db) + ")");
    if (std::numbers::pi * diameter_m / wavelength_m() <= kJ1FirstZero)
        throw ValidationError("antenna too small: the first null of its pattern is beyond 90 degrees off axis");
}

AntennaConfig AntennaConfig::reference() { return AntennaConfig(1.5, 20e9, 4.0); }

double antenna_gain_rel(double theta_off, const AntennaConfig& cfg) noexcept {
    const double x = std::sin(theta_off) * std::numbers::pi * cfg.diameter_m() / cfg.wavelength_m();
    const double a = airy_amplitude(x);
    return a * a;
}

double location_attenuation_db(double theta_off, const AntennaConfig& cfg) noexcept {
    return -10.0 * std::log10(antenna_gain_rel(theta_off, cfg));
}

double beam_edge_angle(const AntennaConfig& cfg) noexcept {
    const double target = std::pow(10.0, -cfg.edge_level_db() / 10.0);
    double lo = 0.0;                           // gain 1 > target
    double hi = theta_of_x(kJ1FirstZero, cfg); // gain 0 < target
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (antenna_gain_rel(mid, cfg) > target)
            lo = mid;
        else
            hi = mid;
    }
    // Return whichever bracket end is closer in gain.
    return std::abs(antenna_gain_rel(lo, cfg) - target) <= std::abs(antenna_gain_rel(hi, cfg) - target) ? lo : hi;
}

double coverage_radius_m(const AntennaConfig& cfg) noexcept {
    return kGeostationaryAltitude * std::tan(beam_edge_angle(cfg));
}

// --- random streams -----------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double sample_location_attenuation(RandomStream& rng, const AntennaConfig& cfg, double radius_m) noexcept {
    const double r = radius_m * std::sqrt(rng.uniform());
    const double att = location_attenuation_db(std::atan(r / kGeostationaryAltitude), cfg);
    return std::clamp(att, 0.0, cfg.edge_level_db());
}

} // namespace

std::uint64_t RandomStream::derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(seed);
    for (const auto k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

double sample_location_attenuation(RandomStream& rng, const AntennaConfig& cfg) noexcept {
    return sample_location_attenuation(rng, cfg, coverage_radius_m(cfg));
}

// --- weather ----------------------------------------------------------------

WeatherCdf::WeatherCdf(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw ValidationError("weather CDF needs at least two points");
    if (points_.front().second != 0.0) throw ValidationError("weather CDF must start at probability 0");
    if (points_.back().second != 1.0) throw ValidationError("weather CDF must end at probability 1");
    if (!(points_.front().first >= 0.0)) throw ValidationError("weather attenuation must be >= 0 dB");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto [a, p] = points_[i];
        if (!std::isfinite(a) || !std::isfinite(p)) throw ValidationError("weather CDF values must be finite");
        if (i == 0) continue;
        if (a < points_[i - 1].first)
            throw ValidationError("weather CDF attenuations must be nondecreasing (point " + std::to_string(i + 1) + ")");
        if (p < points_[i - 1].second)
            throw ValidationError("weather CDF probabilities must be nondecreasing (point " + std::to_string(i + 1) + ")");
    }
}

WeatherCdf WeatherCdf::load_csv(const std::filesystem::path& path) {
    return parse_csv(csv::slurp(path), path.string());
}

WeatherCdf WeatherCdf::parse_csv(std::string_view text, const std::string& source) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : csv::read(text, "attenuation_db,cum_prob", source))
        pts.emplace_back(csv::parse_double(row.fields[0], row.line, source),
                         csv::parse_double(row.fields[1], row.line, source));
    try {
        return WeatherCdf(std::move(pts));
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

WeatherCdf WeatherCdf::point_mass(double attenuation_db) {
    return WeatherCdf({{attenuation_db, 0.0}, {attenuation_db, 1.0}});
}

double WeatherCdf::cdf(double attenuation_db) const noexcept {
    if (attenuation_db < points_.front().first) return 0.0;
    if (attenuation_db >= points_.back().first) return 1.0;
    const auto it = std::upper_bound(points_.begin(), points_.end(), attenuation_db,
                                     [](double a, const auto& pt) { return a < pt.first; });
    const auto& [a1, p1] = *it;
    const auto& [a0, p0] = *(it - 1);
    return p0 + (attenuation_db - a0) / (a1 - a0) * (p1 - p0);
}

double WeatherCdf::quantile(double u) const noexcept {
    const auto it = std::lower_bound(points_.begin(), points_.end(), u,
                                     [](const auto& pt, double v) { return pt.second < v; });
    if (it == points_.begin()) return points_.front().first;
    if (it == points_.end()) return points_.back().first;
    const auto& [a1, p1] = *it;
    const auto& [a0, p0] = *(it - 1);
    return a0 + (u - p0) / (p1 - p0) * (a1 - a0);
}

double sample_weather_attenuation(RandomStream& rng, const WeatherCdf& cdf) noexcept {
    return cdf.quantile(rng.uniform());
}

std::vector<BeamDraw> draw_population(std::size_t n, double snr_max_db, const AntennaConfig& cfg,
                                      const WeatherCdf& cdf, std::uint64_t seed) {
    if (n == 0) throw ValidationError("population needs at least one receiver");
    const double radius = coverage_radius_m(cfg);
    std::vector<BeamDraw> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = RandomStream::derive(seed, {i});
        auto& d = out[i];
        d.location_att_db = sample_location_attenuation(rng, cfg, radius);
        d.weather_att_db = sample_weather_attenuation(rng, cdf);
        d.snr_db = snr_max_db - d.location_att_db - d.weather_att_db;
    }
    return out;
}

} // namespace hmts
