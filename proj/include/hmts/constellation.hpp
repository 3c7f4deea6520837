#pragma once

// Hierarchical constellation geometry: energy splits between the high-energy (HE)
// and low-energy (LE) streams, and unit-energy symbol point sets.
//
// All angles in the public API are degrees; trig is done internally in radians.

#include <complex>
#include <vector>

namespace hmts {

using Point = std::complex<double>;

/// Hierarchical QPSK: symbols at +-theta off the I axis (mirrored into the left half-plane).
/// The HE bit selects the half-plane, the LE bit the sign of Q.
class QpskParams {
public:
    /// Throws ValidationError unless 0 < theta_deg <= 45.
    explicit QpskParams(double theta_deg);
    double theta_deg() const noexcept { return theta_deg_; }

private:
    double theta_deg_;
};

/// Hierarchical 32-APSK (4+12+16 rings). gamma1 = R2/R1, gamma2 = R3/R1, theta is the
/// half angle between the outer-ring points of a quadrant.
class Apsk32Params {
public:
    /// Throws ValidationError unless 1 < gamma1 < gamma2 and 0 < theta_deg < 45.
    Apsk32Params(double gamma1, double gamma2, double theta_deg);
    double gamma1() const noexcept { return gamma1_; }
    double gamma2() const noexcept { return gamma2_; }
    double theta_deg() const noexcept { return theta_deg_; }

private:
    double gamma1_;
    double gamma2_;
    double theta_deg_;
};

/// Non-uniform 16-QAM, alpha = d_h / d_l.
class Qam16Params {
public:
    explicit Qam16Params(double alpha);
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// Hierarchical 8-PSK: two points per quadrant at 45 deg +- theta. HE = quadrant (2 bits), LE = 1 bit.
class Psk8Params {
public:
    /// Throws ValidationError unless 0 < theta_deg < 45.
    explicit Psk8Params(double theta_deg);
    double theta_deg() const noexcept { return theta_deg_; }

private:
    double theta_deg_;
};

struct ConstellationPoints {
    std::vector<Point> points; // mean |p|^2 == 1
    int he_bits = 0;
    int le_bits = 0;
};

double qpsk_rho_he(const QpskParams& params) noexcept;

/// Barycenter distance of one quadrant's 8 points, in units of sqrt(Es).
double apsk32_barycenter_distance(const Apsk32Params& params) noexcept;
double apsk32_rho_he(const Apsk32Params& params) noexcept;

/// E_he / E_le = (1 + alpha)^2.
double qam16_energy_ratio(const Qam16Params& params) noexcept;

double psk8_rho_he(const Psk8Params& params) noexcept;

ConstellationPoints build_qpsk_points(const QpskParams& params);

/// Points are grouped per quadrant: indices [8q, 8q + 8) belong to quadrant q
/// (q = 0 is the upper-right quadrant). Within a quadrant: 1 inner, 3 middle, 4 outer.
ConstellationPoints build_apsk32_points(const Apsk32Params& params);

ConstellationPoints build_psk8_points(const Psk8Params& params);

double mean_energy(const std::vector<Point>& points) noexcept;

/// Adopted hierarchical QPSK and 32-APSK parameters, as (nominal rho_he, params).
struct QpskTableRow {
    double rho_he;
    double theta_deg;
};
struct Apsk32TableRow {
    double rho_he;
    double gamma1;
    double gamma2;
    double theta_deg;
};

const std::vector<QpskTableRow>& adopted_qpsk_parameters();
const std::vector<Apsk32TableRow>& adopted_apsk32_parameters();

} // namespace hmts
