// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.
//
// Fitting 3x3 RGB->XYZ correction maps from patch correspondences: plain
// least squares, alternating least squares with a per-patch shading
// diagonal, and a RANSAC homography fit over chromaticities.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chromacal/homography.hpp"

namespace chromacal {

/// Paired patch measurements: row i of A is a camera RGB sample of the patch
/// whose reference XYZ is row i of B.
struct CorrespondenceSet {
    Eigen::MatrixX3d A;
    Eigen::MatrixX3d B;

    Eigen::Index size() const { return A.rows(); }

    /// Throws InsufficientPoints unless both matrices share at least 4 rows,
    /// and DegenerateSample unless every entry is finite and every A row has
    /// a positive component sum (so its chromaticity exists).
    void validate() const;
};

/// Per-patch positive scale factors (one shading value per row of A).
using ShadingDiagonal = Eigen::VectorXd;

struct AlsConfig {
    /// Stop once the Frobenius norm of the change in the working matrix
    /// between iterations falls below this.
    double epsilon = 1e-10;
    int max_iters = 1000;

    void validate() const;
};

struct RansacConfig {
    /// Consensus membership cutoff, in delta E (L*u*v*) after mapping a
    /// source chromaticity and aligning luminance to the target.
    double inlier_threshold = 2.0;
    int max_trials = 2000;
    /// Early exit once a trial's consensus reaches this fraction of n.
    double min_consensus_fraction = 0.8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FitResult {
    /// The fitted RGB->XYZ map (normalized; apply as xyz = rgb * H).
    Homography3 H_rgb;
    /// Per-row scale factors such that diag(shading) * A * H_rgb.matrix()
    /// reproduces the solver's final working matrix (alternating least
    /// squares only).
    std::optional<ShadingDiagonal> shading;
    /// Ascending indices of the winning consensus set (RANSAC only).
    std::optional<std::vector<int>> inliers;
    /// ||fit - B||_F after each iteration (alternating least squares only);
    /// non-increasing.
    std::vector<double> residual_history;
    /// False when the iteration budget ran out before the stop criterion.
    bool converged = true;
};

/// Minimizer of ||A H - B||_F over 3x3 H.
/// Throws RankDeficient when rank(A) < 3.
FitResult solve_least_squares(const CorrespondenceSet& set);

/// Per-row scale factors minimizing ||diag(d) A - B||_F row by row:
/// d_i = (a_i . b_i) / (a_i . a_i). Throws DegenerateSample on a zero row.
ShadingDiagonal solve_diagonal(const Eigen::MatrixX3d& A,
                               const Eigen::MatrixX3d& B);

/// Alternating minimization of ||D A H - B||_F over a diagonal D and a 3x3
/// H: each iteration refits D for the current working matrix, then refits H,
/// and the working matrix becomes D A H. Factors accumulate across
/// iterations (H left to right, D elementwise), and the scale removed by
/// normalizing the accumulated H is folded into the returned shading, so the
/// reconstruction identity in FitResult::shading holds as stated.
///
/// The first diagonal step makes the fit independent of any per-row positive
/// rescaling of A (shading), which is the point of the method.
FitResult solve_als(const CorrespondenceSet& set, const AlsConfig& config = {});

/// Robust chromaticity-homography fit. Each trial draws 4 distinct row
/// indices from an RNG seeded by (config.seed, trial index) only, fits a
/// minimal homography between source and target chromaticities, and scores
/// every row with ransac_residual; rows under the threshold form the trial's
/// consensus. The best consensus (largest; ties by smaller mean residual,
/// then earliest trial) is refit with all its members, and the result is
/// converted back to an RGB map. Deterministic given (set, config): repeated
/// calls return bit-identical results.
///
/// Target rows whose component sum or Y is not positive have no usable
/// chromaticity; they are never sampled and never join a consensus.
/// Throws NoValidSample when no trial yields a usable minimal sample.
FitResult solve_ransac(const CorrespondenceSet& set, const RansacConfig& config,
                       const WhitePoint& white);

/// Consensus distance for one correspondence: map a's chromaticity through
/// chroma_h, lift the image (p, q) to the XYZ ray [p, q, 1-p-q], scale it to
/// b's luminance, and return delta E (L*u*v*) against b. Infinite when the
/// mapped ray cannot be compared (point at infinity, or non-positive Y on
/// either side).
double ransac_residual(const Homography3& chroma_h, const ColorTriple& a,
                       const ColorTriple& b, const WhitePoint& white);

/// Applies a correction map to each row: row_out = row_in * rgb_to_xyz.
Eigen::MatrixX3d apply_correction(const Mat3& rgb_to_xyz,
                                  const Eigen::MatrixX3d& rgbs);

}  // namespace chromacal
