// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.
//
// Synthetic chart generation with known ground truth: a clean reflectance
// set, a well-conditioned RGB->XYZ map, per-patch shading, optional Gaussian
// noise on the targets, and optional outlier rows.

#pragma once

#include <cstdint>
#include <vector>

#include "chromacal/chart_io.hpp"
#include "chromacal/solvers.hpp"

namespace chromacal {

struct SynthConfig {
    int n_patches = 24;
    std::uint64_t seed = 0;
    /// Per-patch shading factors are drawn uniformly from [shading_lo,
    /// shading_hi).
    double shading_lo = 0.2;
    double shading_hi = 1.0;
    /// Standard deviation of Gaussian noise added to each target row, as a
    /// fraction of that row's norm. 0 disables noise.
    double noise_sigma = 0.0;
    /// Fraction of rows (floor(fraction * n)) replaced by random targets
    /// unrelated to the map. 0 disables outliers.
    double outlier_fraction = 0.0;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// A generated chart plus the ground truth that produced it. On rows that
/// are neither noisy nor outliers, diag(1 / d_true) * set.A * m_true equals
/// set.B exactly (up to roundoff); m_true is kept at its raw scale so this
/// identity holds as written.
struct SynthInstance {
    CorrespondenceSet set;
    Mat3 m_true;
    ShadingDiagonal d_true;
    std::vector<int> outlier_indices;  ///< ascending
};

/// Deterministic generation: the same config yields bit-identical instances
/// on every platform.
SynthInstance generate(const SynthConfig& config);

/// Renders an instance as canonical patch records. The gray capture of row i
/// is the shading factor on all three channels, so shading removal can
/// recover the unshaded samples.
std::vector<PatchRecord> to_patch_records(const SynthInstance& instance);

}  // namespace chromacal
