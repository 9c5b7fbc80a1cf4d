// nuwean command-line tool: synthetic cohorts, per-stage processing, and the
// end-to-end train/evaluate pipeline. Every artifact is a CSV (first line a
// "# config_hash=... seed=..." stamp) so stages can be chained through files.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nuwean/features.hpp"
#include "nuwean/pipeline.hpp"
#include "nuwean/rng.hpp"

namespace fs = std::filesystem;
using namespace nuwean;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

RunConfig load_config(const GlobalOpts& g) {
    RunConfig cfg = g.config_path.empty() ? RunConfig{} : RunConfig::from_file(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    cfg.validate();
    return cfg;
}

std::optional<SignalKind> parse_kind_flag(const std::string& kind_flag, const std::string& path) {
    if (!kind_flag.empty()) return signal_kind_from_string(kind_flag);
    try {
        return signal_kind_from_string(fs::path(path).stem().string());
    } catch (const Error&) {
        throw Error("series", "cannot infer signal kind from '" + path +
                                  "'; pass --kind (one of RR, TI, TE, TTOT, VT, TI_TTOT, "
                                  "VT_TI, F_VT)");
    }
}

FeatureMatrix masked_by_selection(const FeatureMatrix& matrix,
                                  const std::vector<std::string>& names) {
    if (names.empty())
        throw Error("select", "selection report lists no features");
    FeatureMatrix out;
    out.patient_ids = matrix.patient_ids;
    out.labels = matrix.labels;
    std::vector<std::size_t> mask;
    for (const std::string& name : names) {
        const auto it = std::find(matrix.names.begin(), matrix.names.end(), name);
        if (it == matrix.names.end())
            throw Error("select", "selection feature '" + name + "' not in the matrix");
        mask.push_back(static_cast<std::size_t>(it - matrix.names.begin()));
        out.names.push_back(name);
    }
    for (const auto& row : matrix.rows) {
        std::vector<double> r;
        r.reserve(mask.size());
        for (std::size_t j : mask) r.push_back(row[j]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weaning-outcome prediction pipeline for non-uniformly sampled "
                 "physiological time series"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--seed", g.seed, "master seed (overrides the config file)");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic cohort on disk");
    std::optional<std::size_t> n_success, n_failure;
    std::optional<double> difficulty;
    synth_cmd->add_option("--success", n_success, "number of success-class patients");
    synth_cmd->add_option("--failure", n_failure, "number of failure-class patients");
    synth_cmd->add_option("--difficulty", difficulty, "class overlap in [0,1]");

    // wrangle
    auto* wrangle_cmd = app.add_subcommand("wrangle", "clean one series file");
    std::string in_path, kind_flag;
    wrangle_cmd->add_option("--in", in_path, "input series CSV")->required();
    wrangle_cmd->add_option("--kind", kind_flag, "signal kind (default: from file stem)");

    // spectrogram
    auto* spec_cmd = app.add_subcommand("spectrogram", "windowed transform of one series file");
    spec_cmd->add_option("--in", in_path, "input series CSV")->required();
    spec_cmd->add_option("--kind", kind_flag, "signal kind (default: from file stem)");
    bool no_wrangle = false;
    spec_cmd->add_flag("--no-wrangle", no_wrangle, "transform the input as-is");

    // features
    auto* feat_cmd = app.add_subcommand("features", "cohort manifest -> feature matrix");
    std::string manifest_path;
    feat_cmd->add_option("--manifest", manifest_path, "cohort manifest CSV")->required();

    // select
    auto* select_cmd = app.add_subcommand("select", "rank-test feature selection report");
    std::string features_path;
    select_cmd->add_option("--features", features_path, "feature matrix CSV")->required();

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "Bayesian hyperparameter search");
    std::string selection_path;
    opt_cmd->add_option("--features", features_path, "feature matrix CSV")->required();
    opt_cmd->add_option("--selection", selection_path,
                        "selection report CSV (default: recompute)");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "repeated cross-validated evaluation");
    std::string model_path, kernel_flag;
    std::optional<double> c_flag, scale_flag;
    std::optional<int> degree_flag;
    eval_cmd->add_option("--features", features_path, "feature matrix CSV")->required();
    eval_cmd->add_option("--model", model_path, "NUSVM1 model file providing the kernel spec");
    eval_cmd->add_option("--kernel", kernel_flag, "linear|polynomial|rbf (alternative to --model)");
    eval_cmd->add_option("--c", c_flag, "regularization parameter");
    eval_cmd->add_option("--scale", scale_flag, "kernel scale");
    eval_cmd->add_option("--degree", degree_flag, "polynomial degree");

    // compare-interp
    auto* cmp_cmd = app.add_subcommand("compare-interp",
                                       "direct transform vs interpolation baselines");
    std::optional<double> rate_flag;
    std::optional<std::size_t> bins_flag;
    cmp_cmd->add_option("--in", in_path, "input series CSV")->required();
    cmp_cmd->add_option("--kind", kind_flag, "signal kind (default: from file stem)");
    cmp_cmd->add_option("--rate", rate_flag,
                        "resample rate Hz (default: the mean sampling rate, which keeps the "
                        "per-sample PSD normalization comparable across the three transforms)");
    cmp_cmd->add_option("--bins", bins_flag, "grid bins (default: 256)");

    // run
    auto* run_cmd = app.add_subcommand("run", "end-to-end pipeline");
    run_cmd->add_option("--manifest", manifest_path,
                        "cohort manifest CSV (default: synthesize per config)");
    run_cmd->add_option("--success", n_success, "synthetic success count (no --manifest)");
    run_cmd->add_option("--failure", n_failure, "synthetic failure count (no --manifest)");
    run_cmd->add_option("--difficulty", difficulty, "synthetic difficulty (no --manifest)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(g);
        if (n_success) cfg.synth_success = *n_success;
        if (n_failure) cfg.synth_failure = *n_failure;
        if (difficulty) cfg.synth_difficulty = *difficulty;
        cfg.validate();
        const ArtifactStamp stamp = cfg.stamp();
        const fs::path out(g.out_dir);

        if (synth_cmd->parsed()) {
            const auto cohort =
                synth_cohort(cfg.synth_success, cfg.synth_failure, cfg.seed, cfg.synth_difficulty);
            write_cohort(g.out_dir, cohort, stamp);
            std::cout << "wrote " << cohort.size() << " patients under " << g.out_dir << "\n";
        } else if (wrangle_cmd->parsed()) {
            const auto kind = parse_kind_flag(kind_flag, in_path);
            const NonUniformSeries cleaned = wrangle(read_series(in_path, kind), cfg.wrangle);
            const fs::path dest = out / ("wrangled_" + fs::path(in_path).filename().string());
            write_series(dest.string(), cleaned, stamp);
            std::cout << "wrote " << dest.string() << " (" << cleaned.size() << " samples)\n";
        } else if (spec_cmd->parsed()) {
            const auto kind = parse_kind_flag(kind_flag, in_path);
            NonUniformSeries series = read_series(in_path, kind);
            if (!no_wrangle) series = wrangle(series, cfg.wrangle);
            const auto frames = spectrogram(series, cfg.spectrogram);
            const fs::path dest = out / "spectrogram.csv";
            write_text_file(dest.string(), spectrogram_to_csv(frames, stamp));
            std::cout << "wrote " << dest.string() << " (" << frames.size() << " frames)\n";
        } else if (feat_cmd->parsed()) {
            const auto cohort = ingest_cohort(manifest_path);
            const FeatureMatrix matrix = build_feature_matrix(cohort, cfg);
            const fs::path dest = out / "features.csv";
            write_text_file(dest.string(), feature_matrix_to_csv(matrix, stamp));
            std::cout << "wrote " << dest.string() << " (" << matrix.n_rows() << " patients x "
                      << matrix.n_cols() << " features)\n";
        } else if (select_cmd->parsed()) {
            const FeatureMatrix matrix = read_feature_matrix(features_path);
            const SelectionResult sel =
                select_features(matrix, cfg.selection_threshold, cfg.selection_k);
            const fs::path dest = out / "selection.csv";
            write_text_file(dest.string(), selection_report_csv(matrix, sel, stamp));
            std::cout << "wrote " << dest.string() << " (" << sel.kept_indices.size()
                      << " features kept)\n";
        } else if (opt_cmd->parsed()) {
            const FeatureMatrix matrix = read_feature_matrix(features_path);
            FeatureMatrix masked;
            std::vector<std::size_t> mask;
            if (!selection_path.empty()) {
                masked = masked_by_selection(matrix, read_selection_names(selection_path));
                for (const std::string& name : masked.names) {
                    const auto it = std::find(matrix.names.begin(), matrix.names.end(), name);
                    mask.push_back(static_cast<std::size_t>(it - matrix.names.begin()));
                }
            } else {
                mask = selection_mask_with_fallback(matrix, cfg.selection_threshold,
                                                    cfg.selection_k);
                std::vector<std::string> names;
                for (std::size_t j : mask) names.push_back(matrix.names[j]);
                masked = masked_by_selection(matrix, names);
            }
            BoConfig bo_cfg;
            bo_cfg.iterations = cfg.bo_iterations;
            bo_cfg.init_random = cfg.bo_init_random;
            bo_cfg.seed = derive_seed(cfg.seed, 0xB0F);
            const HyperSearchResult search = optimize_hyperparameters(masked, bo_cfg);

            write_text_file((out / "bo_trace.csv").string(), bo_trace_csv(search, stamp));
            TrainedModel model = train(masked.rows, masked.labels, search.best_spec,
                                       inverse_frequency_weights(masked.labels));
            model.selection_mask = mask;
            model.config_hash = stamp.config_hash;
            model.seed = cfg.seed;
            save_model((out / "model.nusvm").string(), model);
            std::cout << "best: kernel=" << kernel_kind_name(search.best_spec.kind)
                      << " c=" << format_double(search.best_spec.c)
                      << " scale=" << format_double(search.best_spec.scale)
                      << " degree=" << search.best_spec.degree
                      << " objective=" << format_double(search.bo.best_value) << "\n";
        } else if (eval_cmd->parsed()) {
            const FeatureMatrix matrix = read_feature_matrix(features_path);
            KernelSpec spec;
            if (!model_path.empty()) {
                spec = load_model(model_path).kernel;
            } else if (!kernel_flag.empty()) {
                spec.kind = kernel_kind_from_string(kernel_flag);
                if (c_flag) spec.c = *c_flag;
                if (scale_flag) spec.scale = *scale_flag;
                if (degree_flag) spec.degree = *degree_flag;
            } else {
                throw Error("evaluate", "pass --model or --kernel");
            }
            RepeatedCvConfig cv_cfg;
            cv_cfg.repetitions = cfg.cv_repetitions;
            cv_cfg.folds = cfg.cv_folds;
            cv_cfg.seed = derive_seed(cfg.seed, 0xC4);
            cv_cfg.selection_threshold = cfg.selection_threshold;
            cv_cfg.selection_k = cfg.selection_k;
            const EvalReport report = repeated_cv(matrix, spec, cv_cfg);
            write_text_file((out / "eval_report.csv").string(), eval_report_csv(report, stamp));
            write_text_file((out / "eval_report.json").string(),
                            eval_report_json(report, stamp.config_hash, cfg.seed));
            std::cout << "auc " << format_double(report.auc.mean) << " +- "
                      << format_double(report.auc.stddev) << " over "
                      << report.evaluations.size() << " evaluations\n";
        } else if (cmp_cmd->parsed()) {
            const auto kind = parse_kind_flag(kind_flag, in_path);
            const NonUniformSeries series = read_series(in_path, kind);
            const double fs_mean = static_cast<double>(series.size() - 1) /
                                   (series.times.back() - series.times.front());
            const double rate = rate_flag ? *rate_flag : fs_mean;
            const std::size_t bins = bins_flag ? *bins_flag : 256;
            std::vector<double> freqs(bins);
            const double f_top = 1.25 * fs_mean;
            for (std::size_t k = 0; k < bins; ++k)
                freqs[k] = f_top * static_cast<double>(k + 1) / static_cast<double>(bins);
            const InterpComparison cmp =
                compare_interpolation(series, rate, FrequencyGrid(std::move(freqs)));
            write_text_file((out / "compare_interp.csv").string(),
                            interp_comparison_csv(cmp, stamp));
            write_text_file((out / "interp_diagnostics.csv").string(),
                            interp_diagnostics_csv(cmp, stamp));
            std::cout << "linear: attenuation=" << format_double(cmp.linear.attenuation_ratio)
                      << " artifact=" << format_double(cmp.linear.artifact_ratio)
                      << "; cubic: attenuation=" << format_double(cmp.cubic.attenuation_ratio)
                      << " artifact=" << format_double(cmp.cubic.artifact_ratio) << "\n";
        } else if (run_cmd->parsed()) {
            std::vector<PatientRecord> cohort;
            if (!manifest_path.empty()) {
                cohort = ingest_cohort(manifest_path);
            } else {
                cohort = synth_cohort(cfg.synth_success, cfg.synth_failure, cfg.seed,
                                      cfg.synth_difficulty);
            }
            const RunArtifacts art = run_pipeline(cohort, cfg, g.out_dir);
            std::cout << "kept " << art.selection.kept_indices.size() << " features; best kernel "
                      << kernel_kind_name(art.search.best_spec.kind) << "; validation auc "
                      << format_double(art.report.auc.mean) << " +- "
                      << format_double(art.report.auc.stddev) << "\n";
            for (const std::string& f : art.files) std::cout << "  " << f << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "nuwean: error " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "nuwean: error [internal] " << e.what() << "\n";
        return 1;
    }
    return 0;
}
