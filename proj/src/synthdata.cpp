// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#include "chromacal/synthdata.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rng_util.hpp"

namespace chromacal {

namespace {

constexpr double kConditionLimit = 20.0;  // redraw maps with worse conditioning
constexpr double kComponentLo = 0.05;     // keeps samples away from zero sum
constexpr double kComponentHi = 1.0;

double condition_number(const Mat3& m) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (!(sv(2) > 0.0)) return std::numeric_limits<double>::infinity();
    return sv(0) / sv(2);
}

}  // namespace

void SynthConfig::validate() const {
    if (n_patches < 4) throw std::invalid_argument("n_patches must be >= 4");
    if (!(shading_lo > 0.0) || !(shading_hi >= shading_lo))
        throw std::invalid_argument("shading range must satisfy 0 < lo <= hi");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw std::invalid_argument("noise_sigma must be finite and >= 0");
    if (!(outlier_fraction >= 0.0) || !(outlier_fraction < 1.0))
        throw std::invalid_argument("outlier_fraction must be in [0, 1)");
}

SynthInstance generate(const SynthConfig& config) {
    config.validate();
    const int n = config.n_patches;
    std::mt19937_64 rng(detail::mix_seed(config.seed, 0));

    // Clean reflectance samples, drawn componentwise. Per-row statements keep
    // the draw order defined (function-argument order would not be).
    Eigen::MatrixX3d clean(n, 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j)
            clean(i, j) = detail::uniform_range(rng, kComponentLo, kComponentHi);
    }

    // A near-identity map keeps the data physically plausible; redraw until
    // well-conditioned.
    Mat3 m_true;
    do {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double base = i == j ? 1.0 : 0.0;
                m_true(i, j) = base + detail::uniform_range(rng, -0.3, 0.3);
            }
        }
    } while (condition_number(m_true) >= kConditionLimit);

    ShadingDiagonal d_true(n);
    for (int i = 0; i < n; ++i)
        d_true(i) = detail::uniform_range(rng, config.shading_lo, config.shading_hi);

    Eigen::MatrixX3d b = clean * m_true;
    const Eigen::MatrixX3d a = d_true.asDiagonal() * clean;

    if (config.noise_sigma > 0.0) {
        for (int i = 0; i < n; ++i) {
            const double scale = config.noise_sigma * b.row(i).norm();
            const double g0 = detail::standard_normal(rng);
            const double g1 = detail::standard_normal(rng);
            const double g2 = detail::standard_normal(rng);
            b.row(i) += scale * Eigen::RowVector3d(g0, g1, g2);
        }
    }

    std::vector<int> outlier_indices;
    const int n_outliers = static_cast<int>(config.outlier_fraction * n);
    if (n_outliers > 0) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (int k = 0; k < n_outliers; ++k) {
            const int j = k + static_cast<int>(detail::uniform_below(
                                  rng, static_cast<std::uint64_t>(n - k)));
            std::swap(order[k], order[j]);
        }
        outlier_indices.assign(order.begin(), order.begin() + n_outliers);
        std::sort(outlier_indices.begin(), outlier_indices.end());
        for (int i : outlier_indices) {
            for (int j = 0; j < 3; ++j)
                b(i, j) = detail::uniform_range(rng, kComponentLo, kComponentHi);
        }
    }

    return SynthInstance{.set = CorrespondenceSet{.A = a, .B = b},
                         .m_true = m_true,
                         .d_true = d_true,
                         .outlier_indices = std::move(outlier_indices)};
}

std::vector<PatchRecord> to_patch_records(const SynthInstance& instance) {
    const Eigen::Index n = instance.set.size();
    std::vector<PatchRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = instance.d_true(i);
        records.push_back(PatchRecord{
            .patch_id = "p" + std::to_string(i),
            .rgb = instance.set.A.row(i),
            .xyz = ColorTriple(instance.set.B.row(i)),
            .gray_rgb = ColorTriple(d, d, d),
        });
    }
    return records;
}

}  // namespace chromacal
