// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.

#include "chromacal/chart_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace chromacal {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view field = comma == std::string_view::npos
                                           ? line.substr(start)
                                           : line.substr(start, comma - start);
        fields.emplace_back(trim(field));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_double(const std::string& field, int line_number) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("not a number: '" + field + "'", line_number);
    if (!std::isfinite(value))
        throw ParseError("non-finite value: '" + field + "'", line_number);
    return value;
}

// Order statistic at probability p by linear interpolation between adjacent
// sorted values (the common spreadsheet/statistics-package definition).
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

int ChartTable::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return -1;
    return static_cast<int>(it - columns.begin());
}

std::optional<Eigen::MatrixX3d> ChartTable::triple(const std::string& c0,
                                                   const std::string& c1,
                                                   const std::string& c2) const {
    const int i0 = column_index(c0);
    const int i1 = column_index(c1);
    const int i2 = column_index(c2);
    if (i0 < 0 || i1 < 0 || i2 < 0) return std::nullopt;
    Eigen::MatrixX3d m(values.rows(), 3);
    m.col(0) = values.col(i0);
    m.col(1) = values.col(i1);
    m.col(2) = values.col(i2);
    return m;
}

ChartTable load_chart(std::istream& in) {
    std::string line;
    int line_number = 0;
    bool have_header = false;
    std::vector<std::string> columns;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;

    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;

        std::vector<std::string> fields = split_fields(body);
        if (!have_header) {
            if (fields.front() != "patch_id") throw MissingColumn("patch_id");
            columns.assign(fields.begin() + 1, fields.end());
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (columns[i].empty())
                    throw ParseError("empty column name in header", line_number);
                for (std::size_t j = i + 1; j < columns.size(); ++j) {
                    if (columns[i] == columns[j])
                        throw ParseError("duplicate column name: " + columns[i],
                                         line_number);
                }
            }
            have_header = true;
            continue;
        }

        if (fields.size() != columns.size() + 1)
            throw ParseError("expected " + std::to_string(columns.size() + 1) +
                                 " fields, got " + std::to_string(fields.size()),
                             line_number);
        ids.push_back(fields[0]);
        std::vector<double> row(columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j)
            row[j] = parse_double(fields[j + 1], line_number);
        rows.push_back(std::move(row));
    }

    if (!have_header) throw ParseError("no header line found", line_number);

    ChartTable table;
    table.columns = std::move(columns);
    table.patch_ids = std::move(ids);
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
    }
    return table;
}

void write_chart(const ChartTable& table, std::ostream& out) {
    if (static_cast<Eigen::Index>(table.patch_ids.size()) != table.values.rows() ||
        static_cast<Eigen::Index>(table.columns.size()) != table.values.cols())
        throw std::invalid_argument("chart table shape mismatch");
    out << "patch_id";
    for (const std::string& name : table.columns) out << ',' << name;
    out << '\n';
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        out << table.patch_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < table.values.cols(); ++j)
            out << ',' << format_double(table.values(i, j));
        out << '\n';
    }
}

std::vector<PatchRecord> patches_from_table(const ChartTable& table) {
    for (const char* name : {"R", "G", "B"}) {
        if (table.column_index(name) < 0) throw MissingColumn(name);
    }
    const auto require_group = [&table](const char* c0, const char* c1,
                                        const char* c2) -> std::optional<Eigen::MatrixX3d> {
        const bool any = table.column_index(c0) >= 0 || table.column_index(c1) >= 0 ||
                         table.column_index(c2) >= 0;
        if (!any) return std::nullopt;
        for (const char* name : {c0, c1, c2}) {
            if (table.column_index(name) < 0) throw MissingColumn(name);
        }
        return table.triple(c0, c1, c2);
    };

    const Eigen::MatrixX3d rgb = *table.triple("R", "G", "B");
    const std::optional<Eigen::MatrixX3d> xyz = require_group("X", "Y", "Z");
    const std::optional<Eigen::MatrixX3d> gray =
        require_group("grayR", "grayG", "grayB");

    std::vector<PatchRecord> records;
    records.reserve(table.patch_ids.size());
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        PatchRecord record;
        record.patch_id = table.patch_ids[static_cast<std::size_t>(i)];
        record.rgb = rgb.row(i);
        if (xyz) record.xyz = ColorTriple(xyz->row(i));
        if (gray) record.gray_rgb = ColorTriple(gray->row(i));
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<PatchRecord> load_patches(std::istream& in) {
    return patches_from_table(load_chart(in));
}

void write_patches(const std::vector<PatchRecord>& records, std::ostream& out) {
    if (records.empty()) throw std::invalid_argument("no records to write");
    const bool with_xyz = records.front().xyz.has_value();
    const bool with_gray = records.front().gray_rgb.has_value();
    for (const PatchRecord& record : records) {
        if (record.xyz.has_value() != with_xyz ||
            record.gray_rgb.has_value() != with_gray)
            throw std::invalid_argument(
                "all records must carry the same optional column groups");
    }

    ChartTable table;
    table.columns = {"R", "G", "B"};
    if (with_xyz) table.columns.insert(table.columns.end(), {"X", "Y", "Z"});
    if (with_gray)
        table.columns.insert(table.columns.end(), {"grayR", "grayG", "grayB"});
    table.values.resize(static_cast<Eigen::Index>(records.size()),
                        static_cast<Eigen::Index>(table.columns.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        table.patch_ids.push_back(records[i].patch_id);
        table.values.block<1, 3>(row, 0) = records[i].rgb;
        Eigen::Index col = 3;
        if (with_xyz) {
            table.values.block<1, 3>(row, col) = *records[i].xyz;
            col += 3;
        }
        if (with_gray) table.values.block<1, 3>(row, col) = *records[i].gray_rgb;
    }
    write_chart(table, out);
}

Eigen::MatrixX3d remove_shading(const std::vector<PatchRecord>& records) {
    if (records.empty()) throw MissingGrayReference("no records");
    const auto n = static_cast<Eigen::Index>(records.size());
    Eigen::MatrixX3d out(n, 3);
    double input_brightness = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const PatchRecord& record = records[static_cast<std::size_t>(i)];
        if (!record.gray_rgb)
            throw MissingGrayReference("record '" + record.patch_id +
                                       "' has no gray reference");
        const double gray = record.gray_rgb->sum();
        if (!(gray > 0.0))
            throw DegenerateSample("gray reference of '" + record.patch_id +
                                   "' has non-positive brightness");
        out.row(i) = record.rgb / gray;
        input_brightness += record.rgb.sum();
    }
    // Dividing by gray brightness fixes relative scales only; restore the
    // input's mean brightness so a uniform gray level is a no-op.
    const double output_brightness = out.sum();
    if (output_brightness > 0.0) out *= input_brightness / output_brightness;
    return out;
}

DeltaEStats evaluate(const Eigen::MatrixX3d& corrected,
                     const Eigen::MatrixX3d& reference, const WhitePoint& white,
                     ColorSpace space) {
    if (corrected.rows() != reference.rows())
        throw std::invalid_argument("corrected/reference row count mismatch");
    if (corrected.rows() == 0)
        throw std::invalid_argument("nothing to evaluate");
    white.validate();

    const Eigen::Index n = corrected.rows();
    std::vector<double> errors(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        ColorTriple corr = corrected.row(i);
        const ColorTriple ref = reference.row(i);
        // Fitted maps are scale-free; compare at the reference luminance.
        if (corr[1] > 0.0) corr = luminance_align(corr, ref);
        errors[static_cast<std::size_t>(i)] =
            space == ColorSpace::Lab
                ? delta_e(xyz_to_lab(corr, white), xyz_to_lab(ref, white))
                : delta_e(xyz_to_luv(corr, white), xyz_to_luv(ref, white));
    }

    double sum = 0.0;
    for (double e : errors) sum += e;
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());

    return DeltaEStats{.mean = sum / static_cast<double>(n),
                       .median = quantile_sorted(sorted, 0.5),
                       .q95 = quantile_sorted(sorted, 0.95),
                       .max = sorted.back(),
                       .space = space};
}

std::string stats_header() { return "method,space,mean,median,q95,max"; }

std::string format_stats_row(const std::string& method, const DeltaEStats& stats) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f,%.2f,%.2f",
                  stats.space == ColorSpace::Lab ? "lab" : "luv", stats.mean,
                  stats.median, stats.q95, stats.max);
    return method + "," + buf;
}

}  // namespace chromacal
