// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#pragma once

#include <stdexcept>
#include <string>

namespace chromacal {

/// Base class for all chromacal errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A color sample is unusable: non-finite entries, or a brightness
/// (component sum) that is zero or negative where a positive one is required.
struct DegenerateSample : Error {
    using Error::Error;
};

/// A white point must have finite, strictly positive tristimulus values.
struct InvalidWhitePoint : Error {
    using Error::Error;
};

/// A homography maps the given chromaticity ray to the plane at infinity
/// (third homogeneous component vanishes).
struct PointAtInfinity : Error {
    using Error::Error;
};

/// A correspondence configuration does not determine a unique homography
/// (coincident or collinear points, or a rank-deficient design matrix).
struct DegenerateConfiguration : Error {
    using Error::Error;
};

/// Fewer correspondences than the estimator requires.
struct InsufficientPoints : Error {
    using Error::Error;
};

/// A matrix required to be invertible is singular within tolerance.
struct SingularMatrix : Error {
    using Error::Error;
};

/// A source matrix has column rank below 3, so no full linear map is
/// determined by the data.
struct RankDeficient : Error {
    using Error::Error;
};

/// Random sampling failed to produce any usable minimal sample within the
/// trial budget.
struct NoValidSample : Error {
    using Error::Error;
};

/// A required column is absent from a chart file.
struct MissingColumn : Error {
    explicit MissingColumn(const std::string& column)
        : Error("missing required column: " + column), column_name(column) {}
    std::string column_name;
};

/// Shading removal was requested but one or more records carry no gray
/// reference capture.
struct MissingGrayReference : Error {
    using Error::Error;
};

/// Malformed text input; carries the 1-based physical line number.
struct ParseError : Error {
    ParseError(const std::string& message, int line_number)
        : Error("line " + std::to_string(line_number) + ": " + message),
          line(line_number) {}
    int line;
};

}  // namespace chromacal
