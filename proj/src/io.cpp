#include "nuwean/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace nuwean {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
    if (token == "nan" || token == "NaN" || token == "-nan")
        return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const char* begin = token.c_str();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw Error("io", context + ": malformed number '" + token + "'");
    return v;
}

std::string ArtifactStamp::line() const {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "# config_hash=%016llx seed=%llu",
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed));
    return std::string(buf);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

void append_stamp(std::string& out, const std::optional<ArtifactStamp>& stamp) {
    if (stamp) {
        out += stamp->line();
        out += '\n';
    }
}

} // namespace

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool saw_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (!saw_header) {
            std::string header;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) header += ',';
                header += fields[i];
            }
            if (!expected_header.empty() && header.rfind(expected_header, 0) != 0)
                throw Error("io", path + ":" + std::to_string(line_no) +
                                      ": expected header '" + expected_header + "', got '" +
                                      header + "'");
            saw_header = true;
            rows.push_back(std::move(fields)); // header kept as row 0
            continue;
        }
        rows.push_back(std::move(fields));
    }
    if (!saw_header) throw Error("io", path + ": empty file");
    return rows;
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error("io", "write failure on " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NonUniformSeries read_series(const std::string& path, std::optional<SignalKind> kind) {
    SignalKind resolved;
    if (kind) {
        resolved = *kind;
    } else {
        const std::string stem = std::filesystem::path(path).stem().string();
        resolved = signal_kind_from_string(stem); // throws unknown-kind
    }

    const auto rows = read_csv(path, "time_s,value");
    NonUniformSeries series;
    series.kind = resolved;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2)
            throw Error("io", path + ": row " + std::to_string(i + 1) + " needs 2 fields");
        const std::string ctx = path + ": row " + std::to_string(i + 1);
        series.times.push_back(parse_double(rows[i][0], ctx));
        series.values.push_back(parse_double(rows[i][1], ctx));
    }
    series.validate("io");
    return series;
}

std::string series_to_csv(const NonUniformSeries& series,
                          const std::optional<ArtifactStamp>& stamp) {
    std::string out;
    append_stamp(out, stamp);
    out += "time_s,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_double(series.times[i]);
        out += ',';
        out += format_double(series.values[i]);
        out += '\n';
    }
    return out;
}

void write_series(const std::string& path, const NonUniformSeries& series,
                  const std::optional<ArtifactStamp>& stamp) {
    write_text_file(path, series_to_csv(series, stamp));
}

std::string feature_matrix_to_csv(const FeatureMatrix& matrix,
                                  const std::optional<ArtifactStamp>& stamp) {
    matrix.validate();
    std::string out;
    append_stamp(out, stamp);
    out += "patient_id,label";
    for (const std::string& name : matrix.names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
        out += matrix.patient_ids[i];
        out += ',';
        out += std::to_string(matrix.labels[i]);
        for (double v : matrix.rows[i]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

FeatureMatrix read_feature_matrix(const std::string& path) {
    const auto rows = read_csv(path, "patient_id,label");
    FeatureMatrix matrix;
    const auto& header = rows[0];
    if (header.size() < 3)
        throw Error("io", path + ": feature matrix needs at least one feature column");
    matrix.names.assign(header.begin() + 2, header.end());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string ctx = path + ": row " + std::to_string(i + 1);
        if (rows[i].size() != header.size())
            throw Error("io", ctx + ": field count mismatch");
        matrix.patient_ids.push_back(rows[i][0]);
        const double label = parse_double(rows[i][1], ctx);
        if (label != 0.0 && label != 1.0)
            throw Error("io", ctx + ": label must be 0 or 1");
        matrix.labels.push_back(static_cast<int>(label));
        std::vector<double> row;
        row.reserve(matrix.names.size());
        for (std::size_t j = 2; j < rows[i].size(); ++j)
            row.push_back(parse_double(rows[i][j], ctx));
        matrix.rows.push_back(std::move(row));
    }
    matrix.validate();
    return matrix;
}

std::string spectrogram_to_csv(const std::vector<SpectrogramFrame>& frames,
                               const std::optional<ArtifactStamp>& stamp) {
    std::string out;
    append_stamp(out, stamp);
    out += "frame_start_s,frequency_hz,psd\n";
    for (const SpectrogramFrame& frame : frames) {
        for (std::size_t k = 0; k < frame.spectrum.grid.size(); ++k) {
            out += format_double(frame.start);
            out += ',';
            out += format_double(frame.spectrum.grid[k]);
            out += ',';
            out += format_double(frame.spectrum.psd[k]);
            out += '\n';
        }
    }
    return out;
}

std::string selection_report_csv(const FeatureMatrix& matrix, const SelectionResult& selection,
                                 const std::optional<ArtifactStamp>& stamp) {
    matrix.validate();
    std::string out;
    append_stamp(out, stamp);
    out += "feature,success_mean,success_std,failure_mean,failure_std,p_value\n";
    for (std::size_t r = 0; r < selection.kept_indices.size(); ++r) {
        const std::size_t j = selection.kept_indices[r];
        std::vector<double> a, b;
        for (std::size_t i = 0; i < matrix.n_rows(); ++i)
            (matrix.labels[i] == 0 ? a : b).push_back(matrix.rows[i][j]);
        out += selection.kept_names[r];
        out += ',';
        out += format_double(mean_of(a));
        out += ',';
        out += format_double(population_std(a));
        out += ',';
        out += format_double(mean_of(b));
        out += ',';
        out += format_double(population_std(b));
        out += ',';
        out += format_double(selection.p_values[r]);
        out += '\n';
    }
    return out;
}

std::vector<std::string> read_selection_names(const std::string& path) {
    const auto rows = read_csv(path, "feature,");
    std::vector<std::string> names;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty() || rows[i][0].empty())
            throw Error("io", path + ": row " + std::to_string(i + 1) + " has no feature name");
        names.push_back(rows[i][0]);
    }
    return names;
}

namespace {

void metric_row(std::string& out, const char* name, const MetricSummary& s) {
    out += name;
    out += ',';
    out += format_double(s.mean);
    out += ',';
    out += format_double(s.stddev);
    out += '\n';
}

nlohmann::ordered_json metric_json(const MetricSummary& s) {
    return {{"mean", s.mean},
            {"std", s.stddev},
            {"defined", s.defined},
            {"undefined", s.undefined}};
}

} // namespace

std::string eval_report_csv(const EvalReport& report, const std::optional<ArtifactStamp>& stamp) {
    std::string out;
    append_stamp(out, stamp);
    out += "metric,mean,std\n";
    metric_row(out, "accuracy", report.accuracy);
    metric_row(out, "precision", report.precision);
    metric_row(out, "recall", report.recall);
    metric_row(out, "f1", report.f1);
    metric_row(out, "specificity", report.specificity);
    metric_row(out, "auc", report.auc);
    return out;
}

std::string eval_report_json(const EvalReport& report, std::uint64_t config_hash,
                             std::uint64_t seed) {
    nlohmann::ordered_json doc;
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    doc["config_hash"] = hash_hex;
    doc["seed"] = seed;
    doc["folds"] = report.folds;
    doc["repetitions"] = report.repetitions;
    doc["positive_label"] = report.positive_label;
    doc["metrics"] = {{"accuracy", metric_json(report.accuracy)},
                      {"precision", metric_json(report.precision)},
                      {"recall", metric_json(report.recall)},
                      {"f1", metric_json(report.f1)},
                      {"specificity", metric_json(report.specificity)},
                      {"auc", metric_json(report.auc)}};
    nlohmann::ordered_json evals = nlohmann::ordered_json::array();
    for (const CvEvaluation& ev : report.evaluations) {
        nlohmann::ordered_json e;
        e["repetition"] = ev.repetition;
        e["fold"] = ev.fold;
        e["tp"] = ev.counts.tp;
        e["fp"] = ev.counts.fp;
        e["tn"] = ev.counts.tn;
        e["fn"] = ev.counts.fn;
        auto opt = [](const std::optional<double>& v) {
            return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
        };
        e["accuracy"] = opt(ev.metrics.accuracy);
        e["precision"] = opt(ev.metrics.precision);
        e["recall"] = opt(ev.metrics.recall);
        e["f1"] = opt(ev.metrics.f1);
        e["specificity"] = opt(ev.metrics.specificity);
        e["auc"] = ev.auc;
        e["selected_features"] = ev.selected_features;
        evals.push_back(std::move(e));
    }
    doc["evaluations"] = std::move(evals);
    return doc.dump(2) + "\n";
}

} // namespace nuwean
