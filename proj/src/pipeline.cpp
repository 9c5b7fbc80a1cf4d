#include "nuwean/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include "nuwean/features.hpp"
#include "nuwean/rng.hpp"

namespace fs = std::filesystem;

namespace nuwean {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void RunConfig::validate() const {
    wrangle.validate();
    spectrogram.validate();
    if (!(selection_threshold > 0.0 && selection_threshold <= 1.0))
        throw Error("config", "selection.threshold must be in (0, 1]");
    if (selection_k == 0) throw Error("config", "selection.k must be >= 1");
    if (cv_repetitions == 0) throw Error("config", "cv.repetitions must be >= 1");
    if (cv_folds < 2) throw Error("config", "cv.folds must be >= 2");
    if (bo_iterations < bo_init_random || bo_init_random == 0)
        throw Error("config", "bo.iterations must be >= bo.init_random >= 1");
    if (!(synth_difficulty >= 0.0 && synth_difficulty <= 1.0))
        throw Error("config", "synth.difficulty must be in [0, 1]");
    if (synth_success == 0 || synth_failure == 0)
        throw Error("config", "synth class counts must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::uint64_t parse_count(const std::string& value, const std::string& key) {
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        throw Error("config", "invalid integer for " + key + ": '" + value + "'");
    }
}

} // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "wrangle.outlier_z_threshold")
        wrangle.outlier_z_threshold = parse_double(value, key);
    else if (key == "wrangle.neighbor_radius")
        wrangle.neighbor_radius = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "wrangle.gap_threshold_s") {
        const double v = parse_double(value, key);
        wrangle.gap_threshold_s = v > 0.0 ? std::optional<double>(v) : std::nullopt;
    } else if (key == "spectrogram.window_s")
        spectrogram.window_s = parse_double(value, key);
    else if (key == "spectrogram.overlap_fraction")
        spectrogram.overlap_fraction = parse_double(value, key);
    else if (key == "spectrogram.bins")
        spectrogram.bins = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "spectrogram.min_samples_per_frame")
        spectrogram.min_samples_per_frame = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "selection.threshold")
        selection_threshold = parse_double(value, key);
    else if (key == "selection.k")
        selection_k = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "cv.repetitions")
        cv_repetitions = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "cv.folds")
        cv_folds = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "bo.iterations")
        bo_iterations = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "bo.init_random")
        bo_init_random = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "seed")
        seed = parse_count(value, key);
    else if (key == "synth.success")
        synth_success = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "synth.failure")
        synth_failure = static_cast<std::size_t>(parse_count(value, key));
    else if (key == "synth.difficulty")
        synth_difficulty = parse_double(value, key);
    else
        throw Error("config", "unknown config key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::string& path) {
    RunConfig cfg;
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw Error("config",
                        path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        cfg.apply(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

std::string RunConfig::canonical() const {
    std::string out;
    auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    kv("bo.init_random", std::to_string(bo_init_random));
    kv("bo.iterations", std::to_string(bo_iterations));
    kv("cv.folds", std::to_string(cv_folds));
    kv("cv.repetitions", std::to_string(cv_repetitions));
    kv("seed", std::to_string(seed));
    kv("selection.k", std::to_string(selection_k));
    kv("selection.threshold", format_double(selection_threshold));
    kv("spectrogram.bins", std::to_string(spectrogram.bins));
    kv("spectrogram.min_samples_per_frame", std::to_string(spectrogram.min_samples_per_frame));
    kv("spectrogram.overlap_fraction", format_double(spectrogram.overlap_fraction));
    kv("spectrogram.window_s", format_double(spectrogram.window_s));
    kv("synth.difficulty", format_double(synth_difficulty));
    kv("synth.failure", std::to_string(synth_failure));
    kv("synth.success", std::to_string(synth_success));
    kv("wrangle.gap_threshold_s",
       wrangle.gap_threshold_s ? format_double(*wrangle.gap_threshold_s) : "auto");
    kv("wrangle.neighbor_radius", std::to_string(wrangle.neighbor_radius));
    kv("wrangle.outlier_z_threshold", format_double(wrangle.outlier_z_threshold));
    return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

std::vector<PatientRecord> ingest_cohort(const std::string& manifest_path) {
    const auto rows = read_csv(manifest_path, "patient_id,label,series_dir");
    const fs::path base = fs::path(manifest_path).parent_path();

    std::vector<PatientRecord> cohort;
    std::map<std::string, bool> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string ctx = manifest_path + ": row " + std::to_string(i + 1);
        if (rows[i].size() != 3)
            throw Error("ingest", ctx + ": expected 3 fields");
        PatientRecord record;
        record.patient_id = rows[i][0];
        if (record.patient_id.empty())
            throw Error("ingest", ctx + ": empty patient_id");
        if (seen.count(record.patient_id))
            throw Error("ingest", ctx + ": duplicate patient '" + record.patient_id + "'");
        seen[record.patient_id] = true;

        const double label = parse_double(rows[i][1], ctx);
        if (label != 0.0 && label != 1.0)
            throw Error("ingest", ctx + ": label must be 0 or 1");
        record.label = static_cast<int>(label);

        fs::path dir = rows[i][2];
        if (dir.is_relative()) dir = base / dir;
        for (SignalKind kind : all_signal_kinds()) {
            const fs::path file = dir / (signal_file_stem(kind) + ".csv");
            if (!fs::exists(file))
                throw Error("ingest", "patient '" + record.patient_id +
                                          "': missing series file " + file.string());
            record.series[kind] = read_series(file.string(), kind);
        }
        cohort.push_back(std::move(record));
    }
    if (cohort.empty())
        throw Error("ingest", manifest_path + ": no patients listed");
    return cohort;
}

void write_cohort(const std::string& dir, const std::vector<PatientRecord>& cohort,
                  const std::optional<ArtifactStamp>& stamp) {
    std::string manifest;
    if (stamp) manifest += stamp->line() + "\n";
    manifest += "patient_id,label,series_dir\n";
    for (const PatientRecord& record : cohort) {
        const std::string rel = "patients/" + record.patient_id;
        manifest += record.patient_id + "," + std::to_string(record.label) + "," + rel + "\n";
        for (const auto& [kind, series] : record.series) {
            const fs::path file = fs::path(dir) / rel / (signal_file_stem(kind) + ".csv");
            write_series(file.string(), series, stamp);
        }
    }
    write_text_file((fs::path(dir) / "manifest.csv").string(), manifest);
}

FeatureVector patient_features(const PatientRecord& record, const RunConfig& cfg) {
    std::map<SignalKind, std::vector<FrameFeatures>> by_signal;
    for (SignalKind kind : all_signal_kinds()) {
        const auto it = record.series.find(kind);
        if (it == record.series.end())
            throw Error("features", "patient '" + record.patient_id + "': missing signal " +
                                        signal_label(kind));
        try {
            const NonUniformSeries cleaned = wrangle(it->second, cfg.wrangle);
            const auto frames = spectrogram(cleaned, cfg.spectrogram);
            std::vector<FrameFeatures> trajectory;
            trajectory.reserve(frames.size());
            for (const SpectrogramFrame& frame : frames)
                trajectory.push_back(frame_features(frame.spectrum));
            by_signal[kind] = std::move(trajectory);
        } catch (const Error& e) {
            throw Error(e.stage(), "patient '" + record.patient_id + "', signal " +
                                       signal_label(kind) + ": " + e.message());
        }
    }
    return assemble_features(by_signal, record.patient_id, record.label);
}

FeatureMatrix build_feature_matrix(const std::vector<PatientRecord>& cohort,
                                   const RunConfig& cfg) {
    cfg.validate();
    FeatureMatrix matrix;
    matrix.names = feature_names();
    for (const PatientRecord& record : cohort) {
        FeatureVector fv = patient_features(record, cfg);
        matrix.patient_ids.push_back(fv.patient_id);
        matrix.labels.push_back(fv.label);
        matrix.rows.push_back(std::move(fv.values));
    }
    matrix.validate();
    return matrix;
}

namespace {

InterpDiagnostics diagnose(const std::vector<double>& interp, const std::vector<double>& reference,
                           const std::vector<double>& freqs, double fs) {
    InterpDiagnostics d;
    const std::size_t m = freqs.size();
    const std::size_t quartile = std::max<std::size_t>(1, m / 4);

    double low_num = 0.0, low_den = 0.0;
    for (std::size_t k = 0; k < quartile; ++k) {
        low_num += interp[k];
        low_den += reference[k];
    }

    double band_num = 0.0, band_den = 0.0;
    std::size_t band_count = 0;
    for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(freqs[k] - fs) <= 0.05 * fs) {
            band_num += interp[k];
            band_den += reference[k];
            ++band_count;
        }
    }
    if (band_count == 0) {
        // fall back to the single nearest bin
        std::size_t nearest = 0;
        for (std::size_t k = 1; k < m; ++k)
            if (std::abs(freqs[k] - fs) < std::abs(freqs[nearest] - fs)) nearest = k;
        band_num = interp[nearest];
        band_den = reference[nearest];
    }

    if (low_den > 0.0 && band_den > 0.0) {
        d.defined = true;
        d.attenuation_ratio = low_num / low_den;
        d.artifact_ratio = band_num / band_den;
    } else {
        d.defined = false;
        d.attenuation_ratio = std::numeric_limits<double>::quiet_NaN();
        d.artifact_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

} // namespace

InterpComparison compare_interpolation(const NonUniformSeries& series, double rate_hz,
                                       const FrequencyGrid& grid) {
    series.validate("compare-interp");
    if (series.size() < 4)
        throw Error("compare-interp", "need at least 4 samples");

    InterpComparison cmp;
    cmp.frequencies = grid.frequencies();
    cmp.mean_sampling_hz =
        static_cast<double>(series.size() - 1) / (series.times.back() - series.times.front());

    cmp.psd_nudft = nudft(series, grid).psd;
    cmp.psd_linear =
        uniform_periodogram(resample_uniform(series, rate_hz, InterpMethod::Linear), grid).psd;
    cmp.psd_cubic =
        uniform_periodogram(resample_uniform(series, rate_hz, InterpMethod::CubicSpline), grid)
            .psd;

    cmp.linear = diagnose(cmp.psd_linear, cmp.psd_nudft, cmp.frequencies, cmp.mean_sampling_hz);
    cmp.cubic = diagnose(cmp.psd_cubic, cmp.psd_nudft, cmp.frequencies, cmp.mean_sampling_hz);
    return cmp;
}

std::string interp_comparison_csv(const InterpComparison& cmp,
                                  const std::optional<ArtifactStamp>& stamp) {
    std::string out;
    if (stamp) out += stamp->line() + "\n";
    out += "frequency_hz,psd_nudft,psd_linear,psd_cubic\n";
    for (std::size_t k = 0; k < cmp.frequencies.size(); ++k) {
        out += format_double(cmp.frequencies[k]);
        out += ',';
        out += format_double(cmp.psd_nudft[k]);
        out += ',';
        out += format_double(cmp.psd_linear[k]);
        out += ',';
        out += format_double(cmp.psd_cubic[k]);
        out += '\n';
    }
    return out;
}

std::string interp_diagnostics_csv(const InterpComparison& cmp,
                                   const std::optional<ArtifactStamp>& stamp) {
    std::string out;
    if (stamp) out += stamp->line() + "\n";
    out += "method,low_freq_attenuation_ratio,sampling_artifact_ratio,defined\n";
    auto row = [&out](const char* name, const InterpDiagnostics& d) {
        out += name;
        out += ',';
        out += format_double(d.attenuation_ratio);
        out += ',';
        out += format_double(d.artifact_ratio);
        out += ',';
        out += d.defined ? "1" : "0";
        out += '\n';
    };
    row("linear", cmp.linear);
    row("cubic_spline", cmp.cubic);
    return out;
}

std::string bo_trace_csv(const HyperSearchResult& search,
                         const std::optional<ArtifactStamp>& stamp) {
    std::string out;
    if (stamp) out += stamp->line() + "\n";
    out += "iteration,kernel,c,scale,degree,objective,best_so_far\n";
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < search.bo.history.size(); ++i) {
        const BoEvaluation& ev = search.bo.history[i];
        const KernelSpec& spec = search.specs[i];
        if (ev.ok && ev.value > best) best = ev.value;
        out += std::to_string(i);
        out += ',';
        out += kernel_kind_name(spec.kind);
        out += ',';
        out += format_double(spec.c);
        out += ',';
        out += format_double(spec.scale);
        out += ',';
        out += std::to_string(spec.degree);
        out += ',';
        out += format_double(ev.value);
        out += ',';
        out += format_double(best);
        out += '\n';
    }
    return out;
}

RunArtifacts run_pipeline(const std::vector<PatientRecord>& cohort, const RunConfig& cfg,
                          const std::string& out_dir) {
    cfg.validate();
    if (cohort.empty())
        throw Error("run", "empty cohort");
    {
        std::size_t n0 = 0, n1 = 0;
        for (const PatientRecord& r : cohort) (r.label == 0 ? n0 : n1) += 1;
        if (n0 < cfg.cv_folds || n1 < cfg.cv_folds)
            throw Error("run", "each class needs at least cv.folds=" +
                                   std::to_string(cfg.cv_folds) + " patients (have " +
                                   std::to_string(n0) + "/" + std::to_string(n1) + ")");
    }

    const ArtifactStamp stamp = cfg.stamp();
    RunArtifacts art;

    art.matrix = build_feature_matrix(cohort, cfg);
    art.selection = select_features(art.matrix, cfg.selection_threshold, cfg.selection_k);
    const std::vector<std::size_t> mask =
        selection_mask_with_fallback(art.matrix, cfg.selection_threshold, cfg.selection_k);

    FeatureMatrix masked;
    masked.patient_ids = art.matrix.patient_ids;
    masked.labels = art.matrix.labels;
    for (std::size_t j : mask) masked.names.push_back(art.matrix.names[j]);
    for (const auto& row : art.matrix.rows) {
        std::vector<double> r;
        r.reserve(mask.size());
        for (std::size_t j : mask) r.push_back(row[j]);
        masked.rows.push_back(std::move(r));
    }

    BoConfig bo_cfg;
    bo_cfg.iterations = cfg.bo_iterations;
    bo_cfg.init_random = cfg.bo_init_random;
    bo_cfg.seed = derive_seed(cfg.seed, 0xB0F);
    art.search = optimize_hyperparameters(masked, bo_cfg);

    RepeatedCvConfig cv_cfg;
    cv_cfg.repetitions = cfg.cv_repetitions;
    cv_cfg.folds = cfg.cv_folds;
    cv_cfg.seed = derive_seed(cfg.seed, 0xC4);
    cv_cfg.selection_threshold = cfg.selection_threshold;
    cv_cfg.selection_k = cfg.selection_k;
    art.report = repeated_cv(art.matrix, art.search.best_spec, cv_cfg);

    // final model on the whole cohort with the winning spec
    art.model = train(masked.rows, masked.labels, art.search.best_spec,
                      inverse_frequency_weights(masked.labels));
    art.model.selection_mask = mask;
    art.model.config_hash = stamp.config_hash;
    art.model.seed = cfg.seed;

    const fs::path out(out_dir);
    fs::create_directories(out);
    auto emit = [&](const std::string& name, const std::string& content) {
        write_text_file((out / name).string(), content);
        art.files.push_back(name);
    };
    emit("features.csv", feature_matrix_to_csv(art.matrix, stamp));
    emit("selection.csv", selection_report_csv(art.matrix, art.selection, stamp));
    emit("bo_trace.csv", bo_trace_csv(art.search, stamp));
    emit("eval_report.csv", eval_report_csv(art.report, stamp));
    emit("eval_report.json", eval_report_json(art.report, stamp.config_hash, cfg.seed));
    emit("config_echo.txt", cfg.canonical() + stamp.line() + "\n");
    save_model((out / "model.nusvm").string(), art.model);
    art.files.push_back("model.nusvm");
    return art;
}

} // namespace nuwean
