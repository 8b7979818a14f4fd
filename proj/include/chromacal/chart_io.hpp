// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.
//
// Chart CSV input/output, shading removal from gray reference captures, and
// delta E summary statistics.
//
// Chart files are comma-separated with a `patch_id` first column, `#` comment
// lines, and numeric columns. The canonical column groups are R,G,B (camera
// sample), X,Y,Z (reference values), and grayR,grayG,grayB (a gray capture at
// the same patch position); correction tools append further `<tag>_X/_Y/_Z`
// groups.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chromacal/colorimetry.hpp"

namespace chromacal {

/// One chart row in canonical form.
struct PatchRecord {
    std::string patch_id;
    ColorTriple rgb = ColorTriple::Zero();
    std::optional<ColorTriple> xyz;
    std::optional<ColorTriple> gray_rgb;
};

enum class ColorSpace { Lab, Luv };

/// Summary of per-patch delta E values.
struct DeltaEStats {
    double mean = 0.0;
    double median = 0.0;
    double q95 = 0.0;
    double max = 0.0;
    ColorSpace space = ColorSpace::Lab;
};

/// A chart file in raw form: patch ids plus named numeric columns. Keeps
/// columns the canonical reader does not model (e.g. appended corrections).
struct ChartTable {
    std::vector<std::string> columns;  ///< names of the numeric columns
    std::vector<std::string> patch_ids;
    Eigen::MatrixXd values;  ///< patch_ids.size() x columns.size()

    /// Index of a named column, or -1.
    int column_index(const std::string& name) const;
    /// The three named columns side by side, if all are present.
    std::optional<Eigen::MatrixX3d> triple(const std::string& c0,
                                           const std::string& c1,
                                           const std::string& c2) const;
};

/// Parses a chart CSV. Comment lines (first non-space character `#`) and
/// blank lines are skipped; the first remaining line is the header, which
/// must start with `patch_id`. Throws ParseError (with the 1-based line
/// number) on malformed rows, field-count mismatches, non-numeric or
/// non-finite values, and duplicate column names.
ChartTable load_chart(std::istream& in);

/// Writes a chart CSV. Doubles are rendered in the shortest form that parses
/// back to the identical value.
void write_chart(const ChartTable& table, std::ostream& out);

/// Shortest decimal form of a double that parses back to the identical value.
std::string format_double(double value);

/// Extracts canonical records from a table: R,G,B required, X,Y,Z and
/// grayR,grayG,grayB optional but all-or-none each. Throws MissingColumn.
std::vector<PatchRecord> patches_from_table(const ChartTable& table);

/// load_chart followed by patches_from_table.
std::vector<PatchRecord> load_patches(std::istream& in);

/// Writes canonical records as a chart CSV. All records must carry the same
/// optional groups; throws std::invalid_argument otherwise.
void write_patches(const std::vector<PatchRecord>& records, std::ostream& out);

/// Divides each rgb by the brightness (component sum) of its gray reference,
/// then rescales the whole set so its mean brightness matches the input's.
/// A uniform gray level therefore leaves the data unchanged. Throws
/// MissingGrayReference when a record has no gray capture and
/// DegenerateSample when a gray brightness is not positive.
Eigen::MatrixX3d remove_shading(const std::vector<PatchRecord>& records);

/// Per-row delta E between corrected and reference XYZ, summarized as
/// mean / median / 95th percentile / max (quantiles by linear interpolation
/// of order statistics). Rows with positive corrected Y are rescaled to the
/// reference luminance first, since fitted maps carry no absolute scale.
DeltaEStats evaluate(const Eigen::MatrixX3d& corrected,
                     const Eigen::MatrixX3d& reference, const WhitePoint& white,
                     ColorSpace space);

/// Header line for a stats CSV: method,space,mean,median,q95,max
std::string stats_header();

/// One stats CSV row, numbers fixed to two decimals.
std::string format_stats_row(const std::string& method, const DeltaEStats& stats);

}  // namespace chromacal
