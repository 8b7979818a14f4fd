// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#include "chromacal/solvers.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "rng_util.hpp"

namespace chromacal {

namespace {

constexpr double kRankTol = 1e-10;  // relative singular-value cutoff for rank 3

void require_full_column_rank(const Eigen::MatrixX3d& m, const char* what) {
    Eigen::JacobiSVD<Eigen::MatrixX3d> svd(m);
    const Eigen::Vector3d& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(2) < kRankTol * sv(0)) throw RankDeficient(what);
}

Mat3 least_squares_map(const Eigen::MatrixX3d& a, const Eigen::MatrixX3d& b) {
    return a.colPivHouseholderQr().solve(b);
}

}  // namespace

void CorrespondenceSet::validate() const {
    if (A.rows() != B.rows())
        throw InsufficientPoints("source and target row counts differ");
    if (A.rows() < 4)
        throw InsufficientPoints("need at least 4 correspondences");
    if (!A.allFinite() || !B.allFinite())
        throw DegenerateSample("correspondence entries must be finite");
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        if (!(A.row(i).sum() > 0.0))
            throw DegenerateSample("source row " + std::to_string(i) +
                                   " has non-positive component sum");
    }
}

void AlsConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("epsilon must be finite and > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

void RansacConfig::validate() const {
    if (!(inlier_threshold > 0.0) || !std::isfinite(inlier_threshold))
        throw std::invalid_argument("inlier_threshold must be finite and > 0");
    if (max_trials < 1) throw std::invalid_argument("max_trials must be >= 1");
    if (!(min_consensus_fraction > 0.0) || !(min_consensus_fraction <= 1.0))
        throw std::invalid_argument("min_consensus_fraction must be in (0, 1]");
}

FitResult solve_least_squares(const CorrespondenceSet& set) {
    set.validate();
    require_full_column_rank(set.A, "least squares needs a rank-3 source matrix");
    return FitResult{.H_rgb = Homography3(least_squares_map(set.A, set.B))};
}

ShadingDiagonal solve_diagonal(const Eigen::MatrixX3d& A,
                               const Eigen::MatrixX3d& B) {
    if (A.rows() != B.rows())
        throw std::invalid_argument("row count mismatch in diagonal fit");
    ShadingDiagonal d(A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double denom = A.row(i).squaredNorm();
        if (!(denom > 0.0))
            throw DegenerateSample("zero source row in diagonal fit");
        d(i) = A.row(i).dot(B.row(i)) / denom;
    }
    return d;
}

FitResult solve_als(const CorrespondenceSet& set, const AlsConfig& config) {
    config.validate();
    set.validate();
    require_full_column_rank(set.A, "alternating fit needs a rank-3 source matrix");

    const Eigen::Index n = set.A.rows();
    Eigen::MatrixX3d working = set.A;
    ShadingDiagonal d_total = ShadingDiagonal::Ones(n);
    Mat3 h_total = Mat3::Identity();
    std::vector<double> history;
    bool converged = false;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        const ShadingDiagonal d = solve_diagonal(working, set.B);
        const Eigen::MatrixX3d scaled = d.asDiagonal() * working;
        require_full_column_rank(scaled, "shading step collapsed the source rank");
        const Mat3 h = least_squares_map(scaled, set.B);
        const Eigen::MatrixX3d next = scaled * h;

        history.push_back((next - set.B).norm());
        d_total = d_total.cwiseProduct(d);
        h_total = h_total * h;

        const double change = (next - working).norm();
        working = next;
        if (change < config.epsilon) {
            converged = true;
            break;
        }
    }

    const Homography3 h_final(h_total);
    // Normalizing h_total divides out a (possibly negative) scalar; fold it
    // into the shading so diag(shading) * A * H reproduces `working`.
    const double signed_scale =
        h_total.cwiseProduct(h_final.matrix()).sum() > 0.0 ? h_total.norm()
                                                           : -h_total.norm();
    return FitResult{.H_rgb = h_final,
                     .shading = ShadingDiagonal(d_total * signed_scale),
                     .residual_history = std::move(history),
                     .converged = converged};
}

double ransac_residual(const Homography3& chroma_h, const ColorTriple& a,
                       const ColorTriple& b, const WhitePoint& white) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    Chromaticity mapped;
    try {
        mapped = apply_homography(chroma_h, to_chromaticity(a));
    } catch (const PointAtInfinity&) {
        return kInf;
    }
    const ColorTriple ray(mapped.p, mapped.q, 1.0 - mapped.p - mapped.q);
    // Without positive luminance on both sides there is no scale at which
    // the colors can be compared.
    if (!(ray[1] > 0.0) || !(b[1] > 0.0)) return kInf;
    const ColorTriple aligned = luminance_align(ray, b);
    return delta_e(xyz_to_luv(aligned, white), xyz_to_luv(b, white));
}

FitResult solve_ransac(const CorrespondenceSet& set, const RansacConfig& config,
                       const WhitePoint& white) {
    config.validate();
    white.validate();
    set.validate();

    const int n = static_cast<int>(set.A.rows());
    std::vector<Chromaticity> src(n);
    std::vector<Chromaticity> dst(n);
    std::vector<bool> usable(n);
    for (int i = 0; i < n; ++i) {
        src[i] = to_chromaticity(set.A.row(i));
        usable[i] = set.B.row(i).sum() > 0.0 && set.B(i, 1) > 0.0;
        if (usable[i]) dst[i] = to_chromaticity(set.B.row(i));
    }

    int best_size = -1;
    double best_mean = std::numeric_limits<double>::infinity();
    std::optional<Homography3> best_h;
    std::vector<int> best_inliers;

    std::vector<int> order(n);
    for (int trial = 0; trial < config.max_trials; ++trial) {
        // Per-trial engine: results depend only on (seed, trial), never on
        // how many draws earlier trials consumed.
        std::mt19937_64 rng(detail::mix_seed(config.seed, static_cast<std::uint64_t>(trial)));
        std::iota(order.begin(), order.end(), 0);
        std::array<int, 4> pick;
        for (int k = 0; k < 4; ++k) {
            const int j = k + static_cast<int>(detail::uniform_below(
                                  rng, static_cast<std::uint64_t>(n - k)));
            std::swap(order[k], order[j]);
            pick[k] = order[k];
        }

        bool sample_ok = true;
        std::array<ChromaPair, 4> sample;
        for (int k = 0; k < 4; ++k) {
            if (!usable[pick[k]]) {
                sample_ok = false;
                break;
            }
            sample[k] = ChromaPair{src[pick[k]], dst[pick[k]]};
        }
        if (!sample_ok) continue;  // degenerate draw still consumes a trial

        Homography3 h = Homography3::identity();
        try {
            h = solve_dlt(sample);
        } catch (const DegenerateConfiguration&) {
            continue;
        }

        std::vector<int> inliers;
        double residual_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!usable[i]) continue;
            const double r = ransac_residual(h, set.A.row(i), set.B.row(i), white);
            if (r < config.inlier_threshold) {
                inliers.push_back(i);
                residual_sum += r;
            }
        }
        const double mean = inliers.empty()
                                ? std::numeric_limits<double>::infinity()
                                : residual_sum / static_cast<double>(inliers.size());

        const int size = static_cast<int>(inliers.size());
        if (size > best_size || (size == best_size && mean < best_mean)) {
            best_size = size;
            best_mean = mean;
            best_h = h;
            best_inliers = std::move(inliers);
        }

        if (static_cast<double>(size) >=
            config.min_consensus_fraction * static_cast<double>(n))
            break;
    }

    if (!best_h)
        throw NoValidSample("no usable minimal sample within the trial budget");

    Homography3 h_final = *best_h;
    if (best_inliers.size() >= 4) {
        std::vector<ChromaPair> consensus;
        consensus.reserve(best_inliers.size());
        for (int i : best_inliers) consensus.push_back(ChromaPair{src[i], dst[i]});
        try {
            h_final = solve_dlt(consensus);
        } catch (const DegenerateConfiguration&) {
            // Keep the minimal-sample fit when the consensus refit is
            // ill-posed.
        }
    }

    return FitResult{.H_rgb = chroma_homography_to_rgb_map(h_final),
                     .inliers = std::move(best_inliers)};
}

Eigen::MatrixX3d apply_correction(const Mat3& rgb_to_xyz,
                                  const Eigen::MatrixX3d& rgbs) {
    return rgbs * rgb_to_xyz;
}

}  // namespace chromacal
