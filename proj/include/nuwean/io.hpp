#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nuwean/eval.hpp"
#include "nuwean/nudft.hpp"
#include "nuwean/series.hpp"
#include "nuwean/stats.hpp"

namespace nuwean {

// Shortest round-trip decimal form (std::to_chars); parsing it back yields
// the identical double, which is what stage isolation and byte-identical
// reruns rely on.
std::string format_double(double v);
double parse_double(const std::string& token, const std::string& context);

// Optional "# config_hash=... seed=..." first line on every artifact.
struct ArtifactStamp {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string line() const;
};

// Raw CSV access. Lines starting with '#' are skipped everywhere.
std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& expected_header);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Series files: header `time_s,value`. Kind comes from the file stem unless
// given explicitly.
NonUniformSeries read_series(const std::string& path,
                             std::optional<SignalKind> kind = std::nullopt);
std::string series_to_csv(const NonUniformSeries& series,
                          const std::optional<ArtifactStamp>& stamp = std::nullopt);
void write_series(const std::string& path, const NonUniformSeries& series,
                  const std::optional<ArtifactStamp>& stamp = std::nullopt);

// Feature matrix: `patient_id,label,<448 canonical names>`.
std::string feature_matrix_to_csv(const FeatureMatrix& matrix,
                                  const std::optional<ArtifactStamp>& stamp = std::nullopt);
FeatureMatrix read_feature_matrix(const std::string& path);

// Spectrogram export: `frame_start_s,frequency_hz,psd`.
std::string spectrogram_to_csv(const std::vector<SpectrogramFrame>& frames,
                               const std::optional<ArtifactStamp>& stamp = std::nullopt);

// Selection report, Table-1 style:
// `feature,success_mean,success_std,failure_mean,failure_std,p_value`.
std::string selection_report_csv(const FeatureMatrix& matrix, const SelectionResult& selection,
                                 const std::optional<ArtifactStamp>& stamp = std::nullopt);
std::vector<std::string> read_selection_names(const std::string& path);

// Eval report: `metric,mean,std` plus a JSON document with per-evaluation detail.
std::string eval_report_csv(const EvalReport& report,
                            const std::optional<ArtifactStamp>& stamp = std::nullopt);
std::string eval_report_json(const EvalReport& report, std::uint64_t config_hash,
                             std::uint64_t seed);

} // namespace nuwean
