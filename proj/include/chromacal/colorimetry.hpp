// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.
//
// Core color types and CIE conversions. Everything here follows a row-vector
// convention: a color is a 1x3 row, and linear maps act on the right
// (mapped = color * M).

#pragma once

#include <Eigen/Dense>

#include "chromacal/errors.hpp"

namespace chromacal {

/// A linear-light color sample (camera RGB or CIE XYZ), as a row vector.
using ColorTriple = Eigen::RowVector3d;

using Mat3 = Eigen::Matrix3d;

/// A 2-D chromaticity: p = first component / sum, q = second / sum.
/// For RGB input this is (r, g); for XYZ input it is (x, y).
struct Chromaticity {
    double p = 0.0;
    double q = 0.0;

    /// The homogeneous ray [p, q, 1] this chromaticity represents.
    Eigen::RowVector3d homogeneous() const { return {p, q, 1.0}; }
};

/// Reference white tristimulus values (scaled so Yn is typically 100).
struct WhitePoint {
    double Xn = 0.0;
    double Yn = 0.0;
    double Zn = 0.0;

    /// CIE standard illuminant D65, 2-degree observer.
    static WhitePoint d65() { return {95.047, 100.0, 108.883}; }

    /// Throws InvalidWhitePoint unless all components are finite and > 0.
    void validate() const;
};

struct LabColor {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct LuvColor {
    double L = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/// Change of basis from a color triple [R, G, B] to the homogeneous
/// chromaticity ray [R, G, R+G+B] (row convention: ray = rgb * C).
/// Returned at its exact integer scale; it is not a normalized homography.
Mat3 rgi_matrix();

/// Projects a triple to its chromaticity. Throws DegenerateSample when the
/// component sum is not finite and strictly positive.
Chromaticity to_chromaticity(const ColorTriple& c);

/// CIE 1976 L*a*b*. Negative tristimulus values are clamped to zero before
/// conversion; the formulas are undefined below zero.
LabColor xyz_to_lab(const ColorTriple& xyz, const WhitePoint& white);

/// CIE 1976 L*u*v*. Black (Y = 0) maps to (0, 0, 0): u* and v* are defined
/// as 0 where L* vanishes or the u'v' denominator X + 15Y + 3Z is not
/// positive.
LuvColor xyz_to_luv(const ColorTriple& xyz, const WhitePoint& white);

/// Euclidean color difference in L*a*b* (CIE 1976 delta E).
double delta_e(const LabColor& lhs, const LabColor& rhs);

/// Euclidean color difference in L*u*v* (CIE 1976 delta E).
double delta_e(const LuvColor& lhs, const LuvColor& rhs);

/// Rescales `candidate` so its Y equals `reference`'s Y. Used to compare
/// colors produced by maps that are only determined up to scale.
/// Throws DegenerateSample when candidate Y is not finite and positive.
ColorTriple luminance_align(const ColorTriple& candidate,
                            const ColorTriple& reference);

}  // namespace chromacal
