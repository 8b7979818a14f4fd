// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#include "chromacal/colorimetry.hpp"

#include <cmath>

namespace chromacal {

namespace {

// CIE 1976 constants: epsilon = (6/29)^3 is the linear/cube-root breakpoint
// of the lightness scale, kappa = (29/3)^3 its linear-segment slope.
constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

// Piecewise cube-root companding applied per channel for L*a*b*.
double lab_f(double t) {
    if (t > kEpsilon) return std::cbrt(t);
    return (kKappa * t + 16.0) / 116.0;
}

// L* from the luminance ratio Y/Yn. The linear branch gives exactly 0 at
// Y = 0, which the u*/v* definitions below rely on.
double lightness(double y_ratio) {
    if (y_ratio > kEpsilon) return 116.0 * std::cbrt(y_ratio) - 16.0;
    return kKappa * y_ratio;
}

}  // namespace

void WhitePoint::validate() const {
    const bool ok = std::isfinite(Xn) && std::isfinite(Yn) && std::isfinite(Zn) &&
                    Xn > 0.0 && Yn > 0.0 && Zn > 0.0;
    if (!ok) throw InvalidWhitePoint("white point components must be finite and > 0");
}

Mat3 rgi_matrix() {
    Mat3 c;
    c << 1.0, 0.0, 1.0,
         0.0, 1.0, 1.0,
         0.0, 0.0, 1.0;
    return c;
}

Chromaticity to_chromaticity(const ColorTriple& c) {
    const double sum = c.sum();
    if (!std::isfinite(sum) || sum <= 0.0)
        throw DegenerateSample("chromaticity undefined: component sum must be finite and > 0");
    return {c[0] / sum, c[1] / sum};
}

LabColor xyz_to_lab(const ColorTriple& xyz, const WhitePoint& white) {
    white.validate();
    const ColorTriple c = xyz.cwiseMax(0.0);
    const double fx = lab_f(c[0] / white.Xn);
    const double fy = lab_f(c[1] / white.Yn);
    const double fz = lab_f(c[2] / white.Zn);
    return {lightness(c[1] / white.Yn), 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LuvColor xyz_to_luv(const ColorTriple& xyz, const WhitePoint& white) {
    white.validate();
    const ColorTriple c = xyz.cwiseMax(0.0);
    const double lstar = lightness(c[1] / white.Yn);
    const double denom = c[0] + 15.0 * c[1] + 3.0 * c[2];
    if (lstar <= 0.0 || denom <= 0.0) return {lstar, 0.0, 0.0};
    const double denom_n = white.Xn + 15.0 * white.Yn + 3.0 * white.Zn;
    const double du = 4.0 * c[0] / denom - 4.0 * white.Xn / denom_n;
    const double dv = 9.0 * c[1] / denom - 9.0 * white.Yn / denom_n;
    return {lstar, 13.0 * lstar * du, 13.0 * lstar * dv};
}

double delta_e(const LabColor& lhs, const LabColor& rhs) {
    const double dl = lhs.L - rhs.L;
    const double da = lhs.a - rhs.a;
    const double db = lhs.b - rhs.b;
    return std::sqrt(dl * dl + da * da + db * db);
}

double delta_e(const LuvColor& lhs, const LuvColor& rhs) {
    const double dl = lhs.L - rhs.L;
    const double du = lhs.u - rhs.u;
    const double dv = lhs.v - rhs.v;
    return std::sqrt(dl * dl + du * du + dv * dv);
}

ColorTriple luminance_align(const ColorTriple& candidate,
                            const ColorTriple& reference) {
    if (!std::isfinite(candidate[1]) || candidate[1] <= 0.0)
        throw DegenerateSample("luminance_align requires candidate Y > 0");
    return candidate * (reference[1] / candidate[1]);
}

}  // namespace chromacal
