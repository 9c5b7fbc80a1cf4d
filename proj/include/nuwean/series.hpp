#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nuwean/error.hpp"

namespace nuwean {

// The eight breath-by-breath / beat-by-beat series recorded per patient.
enum class SignalKind {
    RR,           // beat-to-beat interval
    TI,           // inspiration time
    TE,           // expiration time
    TTOT,         // respiratory cycle duration
    VT,           // tidal volume
    TI_OVER_TTOT, // inspiratory fraction
    VT_OVER_TI,   // mean inspired flow
    F_OVER_VT,    // frequency-tidal volume ratio
};

inline constexpr int kSignalKindCount = 8;

const std::vector<SignalKind>& all_signal_kinds();

// Display label ("f/V_T", "T_I/T_Tot", ...) and filesystem-safe stem ("F_VT").
std::string signal_label(SignalKind kind);
std::string signal_file_stem(SignalKind kind);

// Accepts either the label or the file stem; throws Error("series", ...) on
// an unknown token.
SignalKind signal_kind_from_string(const std::string& token);

// Timestamped samples at strictly increasing, irregularly spaced times.
struct NonUniformSeries {
    SignalKind kind = SignalKind::RR;
    std::vector<double> times;  // seconds
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }

    // times/values same length, times strictly increasing. Values may contain
    // NaN before remove_nulls; never after wrangling.
    void validate(const std::string& stage = "series") const;
};

struct WrangleConfig {
    double outlier_z_threshold = 3.0;
    std::size_t neighbor_radius = 5;
    // Absent: 5 x median inter-sample interval of the series being processed.
    std::optional<double> gap_threshold_s;

    void validate() const;
    double effective_gap_threshold(const NonUniformSeries& series) const;
};

// Drops non-finite samples, preserving time order. Errors if nothing is left.
NonUniformSeries remove_nulls(const NonUniformSeries& series);

// Replaces samples whose global z-score (population std) exceeds the
// threshold by the mean of the up-to-`neighbor_radius` non-flagged values on
// each side. Times unchanged.
NonUniformSeries replace_outliers(const NonUniformSeries& series, const WrangleConfig& cfg);

// Splits wherever the inter-sample interval exceeds the gap threshold.
// Concatenating the result reproduces the input exactly.
std::vector<NonUniformSeries> segment_gaps(const NonUniformSeries& series, const WrangleConfig& cfg);

// Greatest sample count; ties broken by earliest start time.
NonUniformSeries longest_segment(const std::vector<NonUniformSeries>& segments);

// Mean 0, population std 1. Errors on constant or too-short series.
NonUniformSeries zscore_normalize(const NonUniformSeries& series);

// remove_nulls -> replace_outliers -> segment_gaps -> longest_segment -> zscore_normalize
NonUniformSeries wrangle(const NonUniformSeries& series, const WrangleConfig& cfg);

// Population (divide-by-N) moments, shared by this module and the feature
// descriptors.
double mean_of(const std::vector<double>& v);
double population_std(const std::vector<double>& v);
double median_of(std::vector<double> v); // copies; does not require sorted input

} // namespace nuwean
