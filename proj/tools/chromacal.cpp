// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the chromacal Project.
//
// Command-line front end: calibrate / apply / evaluate / synth.
//
// Exit codes: 0 success, 2 bad flags or unparseable/incomplete input,
// 3 solver failure on structurally valid data.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <json.hpp>

#include "chromacal/chart_io.hpp"
#include "chromacal/solvers.hpp"
#include "chromacal/synthdata.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

int fail(int code, const std::string& message) {
    std::cerr << "chromacal: error: " << message << "\n";
    return code;
}

chromacal::WhitePoint parse_white(const std::string& text) {
    if (text == "d65") return chromacal::WhitePoint::d65();
    std::istringstream in(text);
    double x = 0.0, y = 0.0, z = 0.0;
    char comma1 = 0, comma2 = 0;
    if (!(in >> x >> comma1 >> y >> comma2 >> z) || comma1 != ',' ||
        comma2 != ',' || !(in >> std::ws).eof())
        throw chromacal::InvalidWhitePoint("--white expects 'd65' or 'X,Y,Z', got '" +
                                           text + "'");
    const chromacal::WhitePoint white{x, y, z};
    white.validate();
    return white;
}

chromacal::ChartTable load_chart_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw chromacal::Error("cannot open input file: " + path);
    return chromacal::load_chart(in);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw chromacal::Error("cannot open output file: " + path);
    return out;
}

Eigen::MatrixX3d require_triple(const chromacal::ChartTable& table,
                                const char* c0, const char* c1, const char* c2) {
    const auto m = table.triple(c0, c1, c2);
    if (!m) {
        for (const char* name : {c0, c1, c2}) {
            if (table.column_index(name) < 0) throw chromacal::MissingColumn(name);
        }
        throw chromacal::MissingColumn(c0);  // unreachable
    }
    return *m;
}

struct MatrixFile {
    chromacal::Mat3 h;
    std::string method;
};

void write_matrix_file(const std::string& path, const chromacal::Mat3& h,
                       const std::string& method,
                       const std::vector<std::string>& notes) {
    std::ofstream out = open_output(path);
    out << "# chromacal correction matrix\n";
    out << "# row-vector convention: xyz = rgb * H\n";
    out << "# method: " << method << "\n";
    for (const std::string& note : notes) out << "# " << note << "\n";
    for (int i = 0; i < 3; ++i) {
        out << chromacal::format_double(h(i, 0)) << ' '
            << chromacal::format_double(h(i, 1)) << ' '
            << chromacal::format_double(h(i, 2)) << '\n';
    }
    if (!out) throw chromacal::Error("failed writing output file: " + path);
}

MatrixFile read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw chromacal::Error("cannot open matrix file: " + path);

    MatrixFile file;
    std::vector<double> entries;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;  // blank line
        if (first.front() == '#') {
            static const std::string kMethodKey = "# method:";
            if (line.rfind(kMethodKey, 0) == 0) {
                std::string value = line.substr(kMethodKey.size());
                const auto begin = value.find_first_not_of(" \t");
                if (begin != std::string::npos)
                    file.method = value.substr(begin);
            }
            continue;
        }
        fields.clear();
        fields.str(line);
        double value = 0.0;
        while (fields >> value) entries.push_back(value);
        if (!fields.eof())
            throw chromacal::ParseError("non-numeric matrix entry", line_number);
    }
    if (entries.size() != 9)
        throw chromacal::ParseError(
            "expected 9 matrix entries, found " + std::to_string(entries.size()),
            line_number);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) file.h(i, j) = entries[3 * i + j];
    }
    return file;
}

struct CalibrateOptions {
    std::string method = "als";
    std::string input;
    std::string output;
    std::string white = "d65";
    chromacal::AlsConfig als;
    chromacal::RansacConfig ransac;
};

int run_calibrate(const CalibrateOptions& opt) {
    chromacal::CorrespondenceSet set;
    chromacal::WhitePoint white;
    try {
        white = parse_white(opt.white);
        const chromacal::ChartTable table = load_chart_file(opt.input);
        set.A = require_triple(table, "R", "G", "B");
        set.B = require_triple(table, "X", "Y", "Z");
    } catch (const std::exception& e) {
        return fail(kExitInput, e.what());
    }

    std::vector<std::string> notes;
    chromacal::Mat3 h;
    try {
        if (opt.method == "ls") {
            const chromacal::FitResult fit = chromacal::solve_least_squares(set);
            h = fit.H_rgb.matrix();
            std::cerr << "ls: fitted on " << set.size() << " patches\n";
        } else if (opt.method == "als") {
            const chromacal::FitResult fit = chromacal::solve_als(set, opt.als);
            h = fit.H_rgb.matrix();
            const std::size_t iters = fit.residual_history.size();
            const double residual =
                fit.residual_history.empty() ? 0.0 : fit.residual_history.back();
            std::cerr << "als: " << iters << " iterations, converged="
                      << (fit.converged ? "yes" : "no")
                      << ", final residual=" << residual << "\n";
            if (!fit.converged)
                std::cerr << "chromacal: warning: iteration budget exhausted "
                             "before the convergence threshold\n";
            notes.push_back("iterations: " + std::to_string(iters));
            notes.push_back(std::string("converged: ") +
                            (fit.converged ? "yes" : "no"));
        } else {  // ransac
            const chromacal::FitResult fit =
                chromacal::solve_ransac(set, opt.ransac, white);
            h = fit.H_rgb.matrix();
            const std::size_t consensus = fit.inliers ? fit.inliers->size() : 0;
            std::cerr << "ransac: consensus " << consensus << "/" << set.size()
                      << ", seed " << opt.ransac.seed << "\n";
            notes.push_back("consensus: " + std::to_string(consensus) + "/" +
                            std::to_string(set.size()));
            notes.push_back("seed: " + std::to_string(opt.ransac.seed));
        }
    } catch (const std::exception& e) {
        return fail(kExitSolver, e.what());
    }

    try {
        write_matrix_file(opt.output, h, opt.method, notes);
    } catch (const std::exception& e) {
        return fail(kExitInput, e.what());
    }
    return kExitOk;
}

int run_apply(const std::string& matrix_path, const std::string& input,
              const std::string& output) {
    try {
        const MatrixFile matrix = read_matrix_file(matrix_path);
        chromacal::ChartTable table = load_chart_file(input);
        const std::vector<chromacal::PatchRecord> records =
            chromacal::patches_from_table(table);

        bool with_gray = !records.empty();
        for (const chromacal::PatchRecord& record : records)
            with_gray = with_gray && record.gray_rgb.has_value();

        Eigen::MatrixX3d rgbs(static_cast<Eigen::Index>(records.size()), 3);
        if (with_gray) {
            // Gray captures available: strip shading before correcting.
            rgbs = chromacal::remove_shading(records);
        } else {
            for (std::size_t i = 0; i < records.size(); ++i)
                rgbs.row(static_cast<Eigen::Index>(i)) = records[i].rgb;
        }
        const Eigen::MatrixX3d corrected =
            chromacal::apply_correction(matrix.h, rgbs);

        const std::string tag = matrix.method.empty() ? "corrected" : matrix.method;
        const std::string names[3] = {tag + "_X", tag + "_Y", tag + "_Z"};
        int existing = 0;
        for (const std::string& name : names)
            existing += table.column_index(name) >= 0 ? 1 : 0;
        if (existing != 0 && existing != 3)
            throw chromacal::Error("input already has a partial column group for '" +
                                   tag + "'");
        if (existing == 0) {
            const Eigen::Index old_cols = table.values.cols();
            table.values.conservativeResize(Eigen::NoChange, old_cols + 3);
            for (int j = 0; j < 3; ++j) table.columns.push_back(names[j]);
        }
        for (int j = 0; j < 3; ++j)
            table.values.col(table.column_index(names[j])) = corrected.col(j);

        std::ofstream out = open_output(output);
        chromacal::write_chart(table, out);
        if (!out) throw chromacal::Error("failed writing output file: " + output);
    } catch (const std::exception& e) {
        return fail(kExitInput, e.what());
    }
    return kExitOk;
}

int run_evaluate(const std::string& input, const std::string& space_name,
                 const std::string& white_text, const std::string& output) {
    try {
        const chromacal::WhitePoint white = parse_white(white_text);
        const chromacal::ColorSpace space = space_name == "lab"
                                                ? chromacal::ColorSpace::Lab
                                                : chromacal::ColorSpace::Luv;
        const chromacal::ChartTable table = load_chart_file(input);
        const Eigen::MatrixX3d reference = require_triple(table, "X", "Y", "Z");

        // Every complete <tag>_X/_Y/_Z group is a correction to score.
        std::vector<std::string> tags;
        for (const std::string& name : table.columns) {
            const std::string suffix = "_X";
            if (name.size() <= suffix.size() ||
                name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
                continue;
            const std::string tag = name.substr(0, name.size() - suffix.size());
            if (table.column_index(tag + "_Y") >= 0 &&
                table.column_index(tag + "_Z") >= 0)
                tags.push_back(tag);
        }
        if (tags.empty())
            throw chromacal::Error(
                "no corrected column groups (<tag>_X,<tag>_Y,<tag>_Z) in " + input);

        std::ostringstream report;
        report << chromacal::stats_header() << "\n";
        for (const std::string& tag : tags) {
            const Eigen::MatrixX3d corrected =
                *table.triple(tag + "_X", tag + "_Y", tag + "_Z");
            const chromacal::DeltaEStats stats =
                chromacal::evaluate(corrected, reference, white, space);
            report << chromacal::format_stats_row(tag, stats) << "\n";
        }

        std::ofstream out = open_output(output);
        out << report.str();
        if (!out) throw chromacal::Error("failed writing output file: " + output);
        std::cout << report.str();
    } catch (const std::exception& e) {
        return fail(kExitInput, e.what());
    }
    return kExitOk;
}

int run_synth(const chromacal::SynthConfig& config, const std::string& shading_text,
              const std::string& output) {
    try {
        chromacal::SynthConfig cfg = config;
        if (!shading_text.empty()) {
            std::istringstream in(shading_text);
            char comma = 0;
            if (!(in >> cfg.shading_lo >> comma >> cfg.shading_hi) || comma != ',' ||
                !(in >> std::ws).eof())
                throw std::invalid_argument("--shading expects 'lo,hi', got '" +
                                            shading_text + "'");
        }
        cfg.validate();

        const chromacal::SynthInstance instance = chromacal::generate(cfg);
        std::ofstream out = open_output(output);
        out << "# synthetic chart (seed " << cfg.seed << ")\n";
        chromacal::write_patches(chromacal::to_patch_records(instance), out);
        if (!out) throw chromacal::Error("failed writing output file: " + output);

        // Ground truth sidecar for downstream checks.
        nlohmann::json truth;
        truth["seed"] = cfg.seed;
        truth["n_patches"] = cfg.n_patches;
        truth["shading_range"] = {cfg.shading_lo, cfg.shading_hi};
        truth["noise_sigma"] = cfg.noise_sigma;
        truth["outlier_fraction"] = cfg.outlier_fraction;
        for (int i = 0; i < 3; ++i) {
            truth["m_true"].push_back({instance.m_true(i, 0), instance.m_true(i, 1),
                                       instance.m_true(i, 2)});
        }
        for (Eigen::Index i = 0; i < instance.d_true.size(); ++i)
            truth["d_true"].push_back(instance.d_true(i));
        truth["outlier_indices"] = instance.outlier_indices;
        std::ofstream sidecar = open_output(output + ".truth.json");
        sidecar << truth.dump(2) << "\n";
    } catch (const std::exception& e) {
        return fail(kExitInput, e.what());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shading-independent color correction via chromaticity homographies"};
    app.require_subcommand(1);
    int rc = kExitOk;

    CalibrateOptions cal;
    auto* calibrate =
        app.add_subcommand("calibrate", "fit a 3x3 RGB->XYZ correction from a chart");
    calibrate->add_option("--method", cal.method, "fitting method")
        ->check(CLI::IsMember({"ls", "als", "ransac"}))
        ->required();
    calibrate->add_option("--input", cal.input, "chart CSV with R,G,B and X,Y,Z")
        ->required();
    calibrate->add_option("--output", cal.output, "matrix file to write")->required();
    calibrate->add_option("--epsilon", cal.als.epsilon, "als stop threshold")
        ->capture_default_str();
    calibrate->add_option("--max-iters", cal.als.max_iters, "als iteration budget")
        ->capture_default_str();
    calibrate
        ->add_option("--threshold", cal.ransac.inlier_threshold,
                     "ransac inlier threshold (delta E Luv)")
        ->capture_default_str();
    calibrate->add_option("--max-trials", cal.ransac.max_trials, "ransac trial budget")
        ->capture_default_str();
    calibrate
        ->add_option("--min-consensus", cal.ransac.min_consensus_fraction,
                     "ransac early-exit consensus fraction")
        ->capture_default_str();
    calibrate->add_option("--seed", cal.ransac.seed, "ransac sampling seed")
        ->capture_default_str();
    calibrate->add_option("--white", cal.white, "reference white: d65 or X,Y,Z")
        ->capture_default_str();
    calibrate->callback([&] { rc = run_calibrate(cal); });

    std::string apply_matrix, apply_input, apply_output;
    auto* apply = app.add_subcommand(
        "apply", "apply a correction matrix to chart RGB samples");
    apply->add_option("--matrix", apply_matrix, "matrix file from calibrate")
        ->required();
    apply->add_option("--input", apply_input, "chart CSV with R,G,B")->required();
    apply->add_option("--output", apply_output, "chart CSV to write")->required();
    apply->callback([&] { rc = run_apply(apply_matrix, apply_input, apply_output); });

    std::string eval_input, eval_output, eval_space = "lab", eval_white = "d65";
    auto* evaluate =
        app.add_subcommand("evaluate", "score corrected charts against X,Y,Z");
    evaluate->add_option("--input", eval_input, "chart CSV with corrections applied")
        ->required();
    evaluate->add_option("--space", eval_space, "color space for delta E")
        ->check(CLI::IsMember({"lab", "luv"}))
        ->required();
    evaluate->add_option("--white", eval_white, "reference white: d65 or X,Y,Z")
        ->capture_default_str();
    evaluate->add_option("--output", eval_output, "stats CSV to write")->required();
    evaluate->callback(
        [&] { rc = run_evaluate(eval_input, eval_space, eval_white, eval_output); });

    chromacal::SynthConfig synth_cfg;
    std::string synth_shading, synth_output;
    auto* synth = app.add_subcommand("synth", "generate a synthetic chart");
    synth->add_option("--n", synth_cfg.n_patches, "number of patches")->required();
    synth->add_option("--seed", synth_cfg.seed, "generator seed")->required();
    synth->add_option("--shading", synth_shading, "shading factor range lo,hi");
    synth->add_option("--noise", synth_cfg.noise_sigma, "relative noise sigma")
        ->capture_default_str();
    synth->add_option("--outliers", synth_cfg.outlier_fraction, "outlier fraction")
        ->capture_default_str();
    synth->add_option("--output", synth_output, "chart CSV to write")->required();
    synth->callback([&] { rc = run_synth(synth_cfg, synth_shading, synth_output); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }
    return rc;
}
