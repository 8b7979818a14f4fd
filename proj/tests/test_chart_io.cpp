// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "chromacal/chart_io.hpp"

using namespace chromacal;

namespace {

double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Independent Lab pipeline for the statistics oracle.
double ref_lab_delta(ColorTriple corr, const ColorTriple& ref, const WhitePoint& w) {
    if (corr[1] > 0.0) corr *= ref[1] / corr[1];
    const auto f = [](double t) {
        return t > 216.0 / 24389.0 ? std::pow(t, 1.0 / 3.0)
                                   : (24389.0 / 27.0 * t + 16.0) / 116.0;
    };
    const auto lab = [&](const ColorTriple& c, double out[3]) {
        const double x = std::max(c[0], 0.0) / w.Xn;
        const double y = std::max(c[1], 0.0) / w.Yn;
        const double z = std::max(c[2], 0.0) / w.Zn;
        out[0] = y > 216.0 / 24389.0 ? 116.0 * std::pow(y, 1.0 / 3.0) - 16.0
                                     : 24389.0 / 27.0 * y;
        out[1] = 500.0 * (f(x) - f(y));
        out[2] = 200.0 * (f(y) - f(z));
    };
    double a[3], b[3];
    lab(corr, a);
    lab(ref, b);
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                     (a[2] - b[2]) * (a[2] - b[2]));
}

// Sort-based order statistics with linear interpolation.
double ref_quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

}  // namespace

TEST_CASE("chart parsing handles comments, blanks, whitespace, and CRLF") {
    std::istringstream in(
        "# color chart\n"
        "\n"
        "patch_id,R,G,B,X,Y,Z\r\n"
        "p0,0.1,0.2,0.3,1,2,3\n"
        "  \n"
        "# interior comment\n"
        "p1, 0.5 ,0.625,-0.7,4e0,5.5,6.25\r\n");
    const ChartTable table = load_chart(in);
    CHECK(table.columns == std::vector<std::string>{"R", "G", "B", "X", "Y", "Z"});
    CHECK(table.patch_ids == std::vector<std::string>{"p0", "p1"});
    REQUIRE(table.values.rows() == 2);
    CHECK(table.values(0, 0) == 0.1);
    CHECK(table.values(0, 5) == 3.0);
    CHECK(table.values(1, 0) == 0.5);
    CHECK(table.values(1, 1) == 0.625);
    CHECK(table.values(1, 2) == -0.7);
    CHECK(table.values(1, 3) == 4.0);
    CHECK(table.values(1, 5) == 6.25);

    CHECK(table.column_index("Y") == 4);
    CHECK(table.column_index("nope") == -1);
    CHECK(table.triple("R", "G", "B").has_value());
    CHECK(!table.triple("R", "G", "W").has_value());
}

TEST_CASE("chart parsing reports the offending line") {
    SUBCASE("wrong field count") {
        std::istringstream in("patch_id,R,G,B\np0,1,2,3\np1,1,2\n");
        try {
            load_chart(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
        }
    }

    SUBCASE("non-numeric field, line number counts comments and blanks") {
        std::istringstream in("# one\n\npatch_id,R,G,B\n# two\np0,1,x,3\n");
        try {
            load_chart(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 5);
        }
    }

    SUBCASE("non-finite values are rejected") {
        std::istringstream in("patch_id,R,G,B\np0,1,inf,3\n");
        CHECK_THROWS_AS(load_chart(in), ParseError);
        std::istringstream in2("patch_id,R,G,B\np0,nan,2,3\n");
        CHECK_THROWS_AS(load_chart(in2), ParseError);
    }

    SUBCASE("header must start with patch_id") {
        std::istringstream in("id,R,G,B\np0,1,2,3\n");
        CHECK_THROWS_AS(load_chart(in), MissingColumn);
    }

    SUBCASE("duplicate columns are rejected") {
        std::istringstream in("patch_id,R,G,R\np0,1,2,3\n");
        CHECK_THROWS_AS(load_chart(in), ParseError);
    }

    SUBCASE("empty input has no header") {
        std::istringstream in("# only a comment\n");
        CHECK_THROWS_AS(load_chart(in), ParseError);
    }
}

TEST_CASE("charts round-trip through write and load exactly") {
    ChartTable table;
    table.columns = {"R", "G", "B"};
    table.patch_ids = {"a", "b", "c", "d"};
    table.values.resize(4, 3);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 3; ++j) table.values(i, j) = urand(rng, -10.0, 10.0);
    }
    // Values whose decimal rendering is subtle.
    table.values(0, 0) = 0.1;
    table.values(0, 1) = 2.0 / 3.0;
    table.values(1, 0) = 1e-17;
    table.values(1, 1) = 123456.789123456789;
    table.values(2, 0) = 5e-324;  // smallest denormal
    table.values(2, 1) = 0.0;

    std::ostringstream out;
    write_chart(table, out);
    std::istringstream in(out.str());
    const ChartTable back = load_chart(in);

    CHECK(back.columns == table.columns);
    CHECK(back.patch_ids == table.patch_ids);
    CHECK((back.values.array() == table.values.array()).all());
}

TEST_CASE("canonical records are extracted with optional groups") {
    SUBCASE("all groups present") {
        std::istringstream in(
            "patch_id,R,G,B,X,Y,Z,grayR,grayG,grayB\n"
            "p0,1,2,3,4,5,6,0.5,0.5,0.5\n");
        const std::vector<PatchRecord> records = load_patches(in);
        REQUIRE(records.size() == 1);
        CHECK(records[0].rgb == ColorTriple(1, 2, 3));
        REQUIRE(records[0].xyz.has_value());
        CHECK(*records[0].xyz == ColorTriple(4, 5, 6));
        REQUIRE(records[0].gray_rgb.has_value());
        CHECK(*records[0].gray_rgb == ColorTriple(0.5, 0.5, 0.5));
    }

    SUBCASE("groups are optional as a whole") {
        std::istringstream in("patch_id,R,G,B\np0,1,2,3\n");
        const std::vector<PatchRecord> records = load_patches(in);
        REQUIRE(records.size() == 1);
        CHECK(!records[0].xyz.has_value());
        CHECK(!records[0].gray_rgb.has_value());
    }

    SUBCASE("missing required channel") {
        std::istringstream in("patch_id,R,B\np0,1,3\n");
        CHECK_THROWS_AS(load_patches(in), MissingColumn);
    }

    SUBCASE("a partial optional group is an error") {
        std::istringstream in("patch_id,R,G,B,X,Y\np0,1,2,3,4,5\n");
        try {
            load_patches(in);
            FAIL("expected MissingColumn");
        } catch (const MissingColumn& e) {
            CHECK(e.column_name == "Z");
        }
    }
}

TEST_CASE("record writing is canonical and byte-stable") {
    std::vector<PatchRecord> records;
    records.push_back(PatchRecord{.patch_id = "p0",
                                  .rgb = ColorTriple(0.5, 1.0, 0.1),
                                  .xyz = ColorTriple(1.0, 2.0, 3.0),
                                  .gray_rgb = std::nullopt});
    records.push_back(PatchRecord{.patch_id = "p1",
                                  .rgb = ColorTriple(0.25, 0.75, 2.5),
                                  .xyz = ColorTriple(4.0, 5.0, 6.5),
                                  .gray_rgb = std::nullopt});
    std::ostringstream out;
    write_patches(records, out);
    CHECK(out.str() ==
          "patch_id,R,G,B,X,Y,Z\n"
          "p0,0.5,1,0.1,1,2,3\n"
          "p1,0.25,0.75,2.5,4,5,6.5\n");

    SUBCASE("mixed optional groups are rejected") {
        records[1].gray_rgb = ColorTriple(1, 1, 1);
        std::ostringstream sink;
        CHECK_THROWS_AS(write_patches(records, sink), std::invalid_argument);
    }

    SUBCASE("an empty record list is rejected") {
        std::ostringstream sink;
        CHECK_THROWS_AS(write_patches({}, sink), std::invalid_argument);
    }
}

TEST_CASE("shading removal divides by gray brightness") {
    SUBCASE("uniform gray leaves the samples unchanged") {
        std::vector<PatchRecord> records;
        std::mt19937_64 rng(31);
        for (int i = 0; i < 6; ++i) {
            records.push_back(
                PatchRecord{.patch_id = "p" + std::to_string(i),
                            .rgb = ColorTriple(urand(rng, 0.1, 1.0),
                                               urand(rng, 0.1, 1.0),
                                               urand(rng, 0.1, 1.0)),
                            .xyz = std::nullopt,
                            .gray_rgb = ColorTriple(0.4, 0.4, 0.4)});
        }
        const Eigen::MatrixX3d out = remove_shading(records);
        for (int i = 0; i < 6; ++i)
            CHECK((out.row(i) - records[i].rgb).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("hand-computed two-record case") {
        std::vector<PatchRecord> records;
        records.push_back(PatchRecord{.patch_id = "a",
                                      .rgb = ColorTriple(1, 1, 1),
                                      .xyz = std::nullopt,
                                      .gray_rgb = ColorTriple(0.5, 0.5, 0.5)});
        records.push_back(PatchRecord{.patch_id = "b",
                                      .rgb = ColorTriple(2, 2, 2),
                                      .xyz = std::nullopt,
                                      .gray_rgb = ColorTriple(1.0, 1.0, 1.0)});
        // After dividing by gray sums both rows are (2/3, 2/3, 2/3); the
        // global rescale restores the input mean brightness of 4.5, giving
        // rows of brightness 4.5/... -> (1.5, 1.5, 1.5) each.
        const Eigen::MatrixX3d out = remove_shading(records);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 3; ++j)
                CHECK(out(i, j) == doctest::Approx(1.5).epsilon(1e-14));
        }
    }

    SUBCASE("scaling a sample and its gray together changes nothing but scale") {
        std::mt19937_64 rng(37);
        std::vector<PatchRecord> records;
        for (int i = 0; i < 8; ++i) {
            const double g = urand(rng, 0.2, 1.0);
            records.push_back(
                PatchRecord{.patch_id = "p" + std::to_string(i),
                            .rgb = ColorTriple(urand(rng, 0.1, 1.0),
                                               urand(rng, 0.1, 1.0),
                                               urand(rng, 0.1, 1.0)),
                            .xyz = std::nullopt,
                            .gray_rgb = ColorTriple(g, g, g)});
        }
        const Eigen::MatrixX3d base = remove_shading(records);

        std::vector<PatchRecord> scaled = records;
        std::mt19937_64 rng2(38);
        for (auto& record : scaled) {
            const double s = urand(rng2, 0.5, 2.0);
            record.rgb *= s;
            *record.gray_rgb *= s;
        }
        const Eigen::MatrixX3d other = remove_shading(scaled);
        const double k = other(0, 0) / base(0, 0);
        CHECK((other - k * base).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("failure modes") {
        CHECK_THROWS_AS(remove_shading({}), MissingGrayReference);

        std::vector<PatchRecord> no_gray{PatchRecord{.patch_id = "a",
                                                     .rgb = ColorTriple(1, 1, 1),
                                                     .xyz = std::nullopt,
                                                     .gray_rgb = std::nullopt}};
        CHECK_THROWS_AS(remove_shading(no_gray), MissingGrayReference);

        std::vector<PatchRecord> zero_gray{
            PatchRecord{.patch_id = "a",
                        .rgb = ColorTriple(1, 1, 1),
                        .xyz = std::nullopt,
                        .gray_rgb = ColorTriple(0.0, 0.0, 0.0)}};
        CHECK_THROWS_AS(remove_shading(zero_gray), DegenerateSample);
    }
}

TEST_CASE("evaluation summarizes per-patch delta E") {
    const WhitePoint white = WhitePoint::d65();

    SUBCASE("perfect correction scores zero everywhere") {
        Eigen::MatrixX3d reference(3, 3);
        reference << 20, 30, 25, 40, 45, 35, 5, 6, 7;
        const DeltaEStats stats =
            evaluate(reference, reference, white, ColorSpace::Lab);
        CHECK(stats.mean == 0.0);
        CHECK(stats.median == 0.0);
        CHECK(stats.q95 == 0.0);
        CHECK(stats.max == 0.0);
    }

    SUBCASE("scale-free: a uniformly rescaled correction is perfect") {
        Eigen::MatrixX3d reference(4, 3);
        reference << 20, 30, 25, 40, 45, 35, 5, 6, 7, 60, 55, 50;
        const Eigen::MatrixX3d corrected = 3.7 * reference;
        const DeltaEStats stats =
            evaluate(corrected, reference, white, ColorSpace::Lab);
        CHECK(stats.max < 1e-10);
    }

    SUBCASE("single row: all four statistics coincide") {
        Eigen::MatrixX3d corrected(1, 3), reference(1, 3);
        corrected << 20, 30, 25;
        reference << 25, 28, 30;
        const DeltaEStats stats =
            evaluate(corrected, reference, white, ColorSpace::Luv);
        CHECK(stats.mean > 0.0);
        CHECK(stats.median == stats.mean);
        CHECK(stats.q95 == stats.mean);
        CHECK(stats.max == stats.mean);
        CHECK(stats.space == ColorSpace::Luv);
    }

    SUBCASE("matches a sort-based oracle on random inputs") {
        std::mt19937_64 rng(41);
        for (int n : {1, 2, 3, 5, 24, 101}) {
            Eigen::MatrixX3d corrected(n, 3), reference(n, 3);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < 3; ++j) {
                    corrected(i, j) = urand(rng, 0.0, 80.0);
                    reference(i, j) = urand(rng, 0.5, 80.0);
                }
            }
            const DeltaEStats stats =
                evaluate(corrected, reference, white, ColorSpace::Lab);

            std::vector<double> errors;
            for (int i = 0; i < n; ++i)
                errors.push_back(
                    ref_lab_delta(corrected.row(i), reference.row(i), white));
            double mean = 0.0;
            for (double e : errors) mean += e;
            mean /= static_cast<double>(n);

            CHECK(std::abs(stats.mean - mean) < 1e-12);
            CHECK(std::abs(stats.median - ref_quantile(errors, 0.5)) < 1e-12);
            CHECK(std::abs(stats.q95 - ref_quantile(errors, 0.95)) < 1e-12);
            CHECK(std::abs(stats.max - *std::max_element(errors.begin(),
                                                         errors.end())) < 1e-12);
        }
    }

    SUBCASE("shape errors are rejected") {
        Eigen::MatrixX3d a(2, 3), b(3, 3);
        a.setConstant(1.0);
        b.setConstant(1.0);
        CHECK_THROWS_AS(evaluate(a, b, white, ColorSpace::Lab),
                        std::invalid_argument);
        Eigen::MatrixX3d empty(0, 3);
        CHECK_THROWS_AS(evaluate(empty, empty, white, ColorSpace::Lab),
                        std::invalid_argument);
    }
}

TEST_CASE("stats rows format to fixed two decimals") {
    CHECK(stats_header() == "method,space,mean,median,q95,max");

    const DeltaEStats stats{
        .mean = 3.704, .median = 2.004, .q95 = 8.9, .max = 52.786,
        .space = ColorSpace::Lab};
    CHECK(format_stats_row("ls", stats) == "ls,lab,3.70,2.00,8.90,52.79");

    const DeltaEStats luv{
        .mean = 0.0, .median = 0.005, .q95 = 1.0, .max = 100.0,
        .space = ColorSpace::Luv};
    CHECK(format_stats_row("ransac", luv) == "ransac,luv,0.00,0.01,1.00,100.00");
}
