// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#include "chromacal/homography.hpp"

#include <cmath>

namespace chromacal {

namespace {

constexpr double kDetTol = 1e-12;       // singularity cutoff at unit Frobenius norm
constexpr double kInfinityTol = 1e-12;  // third homogeneous component cutoff
constexpr double kRankTol = 1e-9;       // relative gap for a unique DLT solution

Mat3 canonical_representative(const Mat3& m) {
    if (!m.allFinite())
        throw SingularMatrix("homography entries must be finite");
    const double norm = m.norm();
    if (norm == 0.0)
        throw SingularMatrix("zero matrix is not a homography");
    Mat3 r = m / norm;

    // Fix the sign so the largest-magnitude entry, scanning row-major and
    // keeping the first on ties, is positive.
    double best = -1.0;
    double best_value = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double mag = std::abs(r(i, j));
            if (mag > best) {
                best = mag;
                best_value = r(i, j);
            }
        }
    }
    if (best_value < 0.0) r = -r;

    if (std::abs(r.determinant()) < kDetTol)
        throw SingularMatrix("matrix is singular within tolerance");
    return r;
}

// Similarity taking the points' centroid to the origin and their mean
// distance from it to sqrt(2), as a row-convention homogeneous matrix
// (ray_out = ray_in * T). Conditions the DLT design matrix.
Mat3 normalizing_similarity(std::span<const ChromaPair> pairs, bool use_src) {
    double cx = 0.0;
    double cy = 0.0;
    for (const ChromaPair& pair : pairs) {
        const Chromaticity& c = use_src ? pair.src : pair.dst;
        cx += c.p;
        cy += c.q;
    }
    const double n = static_cast<double>(pairs.size());
    cx /= n;
    cy /= n;

    double mean_dist = 0.0;
    for (const ChromaPair& pair : pairs) {
        const Chromaticity& c = use_src ? pair.src : pair.dst;
        mean_dist += std::hypot(c.p - cx, c.q - cy);
    }
    mean_dist /= n;
    if (mean_dist < 1e-12)
        throw DegenerateConfiguration("coincident points in correspondence set");
    const double s = std::sqrt(2.0) / mean_dist;

    Mat3 t;
    t << s, 0.0, 0.0,
         0.0, s, 0.0,
         -s * cx, -s * cy, 1.0;
    return t;
}

Chromaticity transform_point(const Chromaticity& c, const Mat3& t) {
    const Eigen::RowVector3d y = c.homogeneous() * t;
    return {y[0] / y[2], y[1] / y[2]};
}

}  // namespace

Homography3::Homography3(const Mat3& m) : m_(canonical_representative(m)) {}

Homography3 Homography3::identity() { return Homography3(Mat3::Identity()); }

Homography3 Homography3::inverse() const { return Homography3(m_.inverse()); }

Chromaticity apply_homography(const Homography3& h, const Chromaticity& c) {
    const Eigen::RowVector3d y = c.homogeneous() * h.matrix();
    if (std::abs(y[2]) < kInfinityTol)
        throw PointAtInfinity("homography maps chromaticity to infinity");
    return {y[0] / y[2], y[1] / y[2]};
}

Homography3 solve_dlt(std::span<const ChromaPair> pairs) {
    const auto n = static_cast<Eigen::Index>(pairs.size());
    if (n < 4)
        throw InsufficientPoints("homography estimation needs at least 4 correspondences");

    const Mat3 t_src = normalizing_similarity(pairs, true);
    const Mat3 t_dst = normalizing_similarity(pairs, false);

    // Each correspondence (x, x') contributes two rows expressing
    // x * H ~ x' with the unknown H column-stacked into h in R^9.
    Eigen::MatrixXd design(2 * n, 9);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Chromaticity src = transform_point(pairs[i].src, t_src);
        const Chromaticity dst = transform_point(pairs[i].dst, t_dst);
        const Eigen::RowVector3d x = src.homogeneous();
        design.row(2 * i) << x, Eigen::RowVector3d::Zero(), -dst.p * x;
        design.row(2 * i + 1) << Eigen::RowVector3d::Zero(), x, -dst.q * x;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    // A unique solution needs a one-dimensional null space: the
    // second-smallest singular value must be well away from zero.
    if (!(sv(0) > 0.0) || sv(7) < kRankTol * sv(0))
        throw DegenerateConfiguration("correspondences do not determine a unique homography");

    const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
    Mat3 normalized;
    normalized.col(0) = h.segment<3>(0);
    normalized.col(1) = h.segment<3>(3);
    normalized.col(2) = h.segment<3>(6);

    const Mat3 result = t_src * normalized * t_dst.inverse();
    try {
        return Homography3(result);
    } catch (const SingularMatrix&) {
        throw DegenerateConfiguration("estimated homography is singular");
    }
}

Homography3 rgb_map_to_chroma_homography(const Homography3& rgb_map) {
    const Mat3 c = rgi_matrix();
    // Exact integer inverse of rgi_matrix().
    Mat3 c_inv;
    c_inv << 1.0, 0.0, -1.0,
             0.0, 1.0, -1.0,
             0.0, 0.0, 1.0;
    return Homography3(c_inv * rgb_map.matrix() * c);
}

Homography3 chroma_homography_to_rgb_map(const Homography3& chroma_h) {
    const Mat3 c = rgi_matrix();
    Mat3 c_inv;
    c_inv << 1.0, 0.0, -1.0,
             0.0, 1.0, -1.0,
             0.0, 0.0, 1.0;
    return Homography3(c * chroma_h.matrix() * c_inv);
}

}  // namespace chromacal
