// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.
//
// Plane homographies over chromaticity rays, their estimation from point
// correspondences, and the change of basis that connects 3x3 RGB->XYZ maps
// to chromaticity homographies.

#pragma once

#include <span>

#include "chromacal/colorimetry.hpp"

namespace chromacal {

/// An invertible 3x3 matrix considered up to scale, stored as the unique
/// representative with Frobenius norm 1 whose largest-magnitude entry
/// (first in row-major order on ties) is positive. Acts on homogeneous
/// rows: ray_out = ray_in * H.
class Homography3 {
  public:
    /// Normalizes `m` to the canonical representative. Throws SingularMatrix
    /// when m is not finite or |det| < 1e-12 after unit-norm scaling.
    explicit Homography3(const Mat3& m);

    static Homography3 identity();

    const Mat3& matrix() const { return m_; }

    /// The normalized representative of the matrix inverse.
    Homography3 inverse() const;

  private:
    Mat3 m_;
};

/// One chromaticity correspondence across a capture-condition change.
struct ChromaPair {
    Chromaticity src;
    Chromaticity dst;
};

/// Maps a chromaticity through a homography and dehomogenizes. Throws
/// PointAtInfinity when the image ray's third component is below 1e-12 in
/// magnitude.
Chromaticity apply_homography(const Homography3& h, const Chromaticity& c);

/// Estimates the homography taking each src chromaticity to its dst. Direct
/// linear transform on normalized coordinates (both point sets translated to
/// centroid zero and scaled to mean radius sqrt(2)); the solution is the
/// singular vector of the 2n x 9 design matrix with smallest singular value.
/// Exact (up to roundoff) for 4 points in general position; algebraic
/// least squares for n > 4.
///
/// Throws InsufficientPoints for n < 4 and DegenerateConfiguration when the
/// points do not determine a unique invertible homography (coincident or
/// collinear configurations).
Homography3 solve_dlt(std::span<const ChromaPair> pairs);

/// The chromaticity homography induced by an RGB-space linear map. With
/// C = rgi_matrix(), a map rgb -> rgb * M sends the chromaticity ray r to
/// r * (C^-1 M C): conjugation through the RGI change of basis. Inverse of
/// chroma_homography_to_rgb_map up to normalization.
Homography3 rgb_map_to_chroma_homography(const Homography3& rgb_map);

/// The RGB-space linear map (up to scale) inducing a given chromaticity
/// homography: C H C^-1.
Homography3 chroma_homography_to_rgb_map(const Homography3& chroma_h);

}  // namespace chromacal
