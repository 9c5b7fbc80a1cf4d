#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nuwean/bayesopt.hpp"
#include "nuwean/eval.hpp"
#include "nuwean/features.hpp"
#include "nuwean/io.hpp"
#include "nuwean/synth.hpp"

namespace nuwean {

// Every tunable of the end-to-end run, with the published defaults. Parsed
// from a `key = value` text file; unknown keys are rejected.
struct RunConfig {
    WrangleConfig wrangle;
    SpectrogramConfig spectrogram;
    double selection_threshold = 0.05;
    std::size_t selection_k = 18;
    std::size_t cv_repetitions = 150;
    std::size_t cv_folds = 4;
    std::size_t bo_iterations = 100;
    std::size_t bo_init_random = 10;
    std::uint64_t seed = 1;
    std::size_t synth_success = 94;
    std::size_t synth_failure = 60;
    double synth_difficulty = 0.0;

    void validate() const;
    void apply(const std::string& key, const std::string& value);
    static RunConfig from_file(const std::string& path);

    // sorted key=value serialization; the config hash stamped onto artifacts
    // is FNV-1a over this string
    std::string canonical() const;
    std::uint64_t hash() const;
    ArtifactStamp stamp() const { return ArtifactStamp{hash(), seed}; }
};

// Manifest CSV `patient_id,label,series_dir`; series_dir is resolved
// relative to the manifest's directory and must hold one `<stem>.csv` per
// signal kind.
std::vector<PatientRecord> ingest_cohort(const std::string& manifest_path);

// Writes manifest + per-patient series files under `dir`.
void write_cohort(const std::string& dir, const std::vector<PatientRecord>& cohort,
                  const std::optional<ArtifactStamp>& stamp = std::nullopt);

// wrangle -> spectrogram -> per-frame features -> 448-entry vector
FeatureVector patient_features(const PatientRecord& record, const RunConfig& cfg);
FeatureMatrix build_feature_matrix(const std::vector<PatientRecord>& cohort,
                                   const RunConfig& cfg);

struct InterpDiagnostics {
    double attenuation_ratio = 0.0; // mean interp PSD / mean reference PSD, lowest grid quartile
    double artifact_ratio = 0.0;    // same ratio in a band around the mean sampling rate
    bool defined = false;
};

struct InterpComparison {
    std::vector<double> frequencies;
    std::vector<double> psd_nudft;
    std::vector<double> psd_linear;
    std::vector<double> psd_cubic;
    double mean_sampling_hz = 0.0;
    InterpDiagnostics linear;
    InterpDiagnostics cubic;
};

// Direct transform of the raw samples versus interpolate-then-transform
// baselines on a shared grid; quantifies the low-frequency attenuation and
// the spurious sampling-frequency peak the baselines introduce.
InterpComparison compare_interpolation(const NonUniformSeries& series, double rate_hz,
                                       const FrequencyGrid& grid);

std::string interp_comparison_csv(const InterpComparison& cmp,
                                  const std::optional<ArtifactStamp>& stamp = std::nullopt);
std::string interp_diagnostics_csv(const InterpComparison& cmp,
                                   const std::optional<ArtifactStamp>& stamp = std::nullopt);

struct RunArtifacts {
    FeatureMatrix matrix;
    SelectionResult selection;
    HyperSearchResult search;
    EvalReport report;
    TrainedModel model;
    std::vector<std::string> files; // everything written, relative to out_dir
};

std::string bo_trace_csv(const HyperSearchResult& search,
                         const std::optional<ArtifactStamp>& stamp = std::nullopt);

// Full protocol: features -> selection -> hyperparameter search -> repeated
// CV with the winning spec -> final model on the whole cohort. All artifacts
// land under out_dir, stamped with the config hash and seed.
RunArtifacts run_pipeline(const std::vector<PatientRecord>& cohort, const RunConfig& cfg,
                          const std::string& out_dir);

std::uint64_t fnv1a64(const std::string& data);

} // namespace nuwean
