#include "hmts/constellation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hmts/errors.hpp"

namespace hmts {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double rad(double deg) { return deg * kDegToRad; }

[[noreturn]] void reject(const std::string& what, double value) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    throw ValidationError(os.str());
}

// Replicates the upper-right quadrant into the other three by 90 degree rotations.
std::vector<Point> replicate_quadrants(const std::vector<Point>& quadrant) {
    std::vector<Point> out;
    out.reserve(quadrant.size() * 4);
    Point rot{1.0, 0.0};
    for (int q = 0; q < 4; ++q) {
        for (const auto& p : quadrant) out.push_back(p * rot);
        rot *= Point{0.0, 1.0};
    }
    return out;
}

void normalize(std::vector<Point>& points) {
    const double g = 1.0 / std::sqrt(mean_energy(points));
    for (auto& p : points) p *= g;
}

} // namespace

QpskParams::QpskParams(double theta_deg) : theta_deg_(theta_deg) {
    if (!(theta_deg > 0.0 && theta_deg <= 45.0))
        reject("hierarchical QPSK theta must satisfy 0 < theta <= 45 degrees", theta_deg);
}

Apsk32Params::Apsk32Params(double gamma1, double gamma2, double theta_deg)
    : gamma1_(gamma1), gamma2_(gamma2), theta_deg_(theta_deg) {
    if (!(gamma1 > 1.0)) reject("32-APSK gamma1 must be > 1", gamma1);
    if (!(gamma2 > gamma1)) reject("32-APSK gamma2 must be > gamma1", gamma2);
    if (!(theta_deg > 0.0 && theta_deg < 45.0))
        reject("32-APSK theta must satisfy 0 < theta < 45 degrees", theta_deg);
}

Qam16Params::Qam16Params(double alpha) : alpha_(alpha) {
    if (!(alpha >= 1.0)) reject("16-QAM alpha must be >= 1", alpha);
}

Psk8Params::Psk8Params(double theta_deg) : theta_deg_(theta_deg) {
    if (!(theta_deg > 0.0 && theta_deg < 45.0))
        reject("hierarchical 8-PSK theta must satisfy 0 < theta < 45 degrees", theta_deg);
}

double qpsk_rho_he(const QpskParams& params) noexcept {
    const double c = std::cos(rad(params.theta_deg()));
    return c * c;
}

double apsk32_barycenter_distance(const Apsk32Params& params) noexcept {
    const double t = rad(params.theta_deg());
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const double num = 1.0 + g1 * (1.0 + 2.0 * std::cos(t)) + 2.0 * g2 * (std::cos(t) + std::cos(t / 3.0));
    return num / std::sqrt(8.0 * (1.0 + 3.0 * g1 * g1 + 4.0 * g2 * g2));
}

double apsk32_rho_he(const Apsk32Params& params) noexcept {
    const double t = rad(params.theta_deg());
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const double num = 1.0 + g1 * (1.0 + 2.0 * std::cos(t)) + 2.0 * g2 * (std::cos(t) + std::cos(t / 3.0));
    return num * num / (8.0 * (1.0 + 3.0 * g1 * g1 + 4.0 * g2 * g2));
}

double qam16_energy_ratio(const Qam16Params& params) noexcept {
    const double s = 1.0 + params.alpha();
    return s * s;
}

double psk8_rho_he(const Psk8Params& params) noexcept {
    const double c = std::cos(rad(params.theta_deg()));
    return c * c;
}

double mean_energy(const std::vector<Point>& points) noexcept {
    if (points.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : points) s += std::norm(p);
    return s / static_cast<double>(points.size());
}

ConstellationPoints build_qpsk_points(const QpskParams& params) {
    const double t = rad(params.theta_deg());
    ConstellationPoints c;
    c.points = {std::polar(1.0, t), std::polar(1.0, -t), std::polar(1.0, std::numbers::pi - t),
                std::polar(1.0, std::numbers::pi + t)};
    c.he_bits = 1;
    c.le_bits = 1;
    return c;
}

ConstellationPoints build_apsk32_points(const Apsk32Params& params) {
    const double t = rad(params.theta_deg());
    const double diag = std::numbers::pi / 4.0;
    const double r1 = 1.0;
    const double r2 = params.gamma1();
    const double r3 = params.gamma2();

    const std::vector<Point> quadrant = {
        std::polar(r1, diag),
        std::polar(r2, diag),
        std::polar(r2, diag + t),
        std::polar(r2, diag - t),
        std::polar(r3, diag + t / 3.0),
        std::polar(r3, diag - t / 3.0),
        std::polar(r3, diag + t),
        std::polar(r3, diag - t),
    };

    ConstellationPoints c;
    c.points = replicate_quadrants(quadrant);
    normalize(c.points);
    c.he_bits = 2;
    c.le_bits = 3;
    return c;
}

ConstellationPoints build_psk8_points(const Psk8Params& params) {
    const double t = rad(params.theta_deg());
    const double diag = std::numbers::pi / 4.0;
    ConstellationPoints c;
    c.points = replicate_quadrants({std::polar(1.0, diag + t), std::polar(1.0, diag - t)});
    c.he_bits = 2;
    c.le_bits = 1;
    return c;
}

const std::vector<QpskTableRow>& adopted_qpsk_parameters() {
    static const std::vector<QpskTableRow> rows = {
        {0.5, 45}, {0.55, 42}, {0.6, 39}, {0.65, 36}, {0.7, 33},
        {0.75, 30}, {0.8, 27}, {0.85, 24}, {0.9, 18},
    };
    return rows;
}

const std::vector<Apsk32TableRow>& adopted_apsk32_parameters() {
    static const std::vector<Apsk32TableRow> rows = {
        {0.7, 2.4, 5.0, 32.3},
        {0.75, 1.8, 3.4, 30.2},
        {0.8, 1.6, 2.6, 28.4},
        {0.85, 1.6, 2.2, 25.6},
        {0.9, 1.8, 2.4, 17.4},
    };
    return rows;
}

} // namespace hmts
