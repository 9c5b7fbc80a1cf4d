#include "nuwean/series.hpp"

#include <algorithm>
#include <cmath>

namespace nuwean {

const std::vector<SignalKind>& all_signal_kinds() {
    static const std::vector<SignalKind> kinds = {
        SignalKind::RR,           SignalKind::TI,         SignalKind::TE,
        SignalKind::TTOT,         SignalKind::VT,         SignalKind::TI_OVER_TTOT,
        SignalKind::VT_OVER_TI,   SignalKind::F_OVER_VT,
    };
    return kinds;
}

std::string signal_label(SignalKind kind) {
    switch (kind) {
        case SignalKind::RR: return "RR";
        case SignalKind::TI: return "T_I";
        case SignalKind::TE: return "T_E";
        case SignalKind::TTOT: return "T_Tot";
        case SignalKind::VT: return "V_T";
        case SignalKind::TI_OVER_TTOT: return "T_I/T_Tot";
        case SignalKind::VT_OVER_TI: return "V_T/T_I";
        case SignalKind::F_OVER_VT: return "f/V_T";
    }
    throw Error("series", "invalid SignalKind");
}

std::string signal_file_stem(SignalKind kind) {
    switch (kind) {
        case SignalKind::RR: return "RR";
        case SignalKind::TI: return "TI";
        case SignalKind::TE: return "TE";
        case SignalKind::TTOT: return "TTOT";
        case SignalKind::VT: return "VT";
        case SignalKind::TI_OVER_TTOT: return "TI_TTOT";
        case SignalKind::VT_OVER_TI: return "VT_TI";
        case SignalKind::F_OVER_VT: return "F_VT";
    }
    throw Error("series", "invalid SignalKind");
}

SignalKind signal_kind_from_string(const std::string& token) {
    for (SignalKind k : all_signal_kinds()) {
        if (token == signal_label(k) || token == signal_file_stem(k)) return k;
    }
    throw Error("series", "unknown signal kind '" + token + "'");
}

void NonUniformSeries::validate(const std::string& stage) const {
    if (times.size() != values.size())
        throw Error(stage, "times/values length mismatch");
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (!(times[i] < times[i + 1]))
            throw Error(stage, "times must be strictly increasing (index " + std::to_string(i + 1) + ")");
    }
    for (double t : times) {
        if (!std::isfinite(t)) throw Error(stage, "non-finite time value");
    }
}

void WrangleConfig::validate() const {
    if (!(outlier_z_threshold > 0.0))
        throw Error("wrangle", "outlier_z_threshold must be > 0");
    if (neighbor_radius == 0)
        throw Error("wrangle", "neighbor_radius must be > 0");
    if (gap_threshold_s && !(*gap_threshold_s > 0.0))
        throw Error("wrangle", "gap_threshold_s must be > 0");
}

double WrangleConfig::effective_gap_threshold(const NonUniformSeries& series) const {
    if (gap_threshold_s) return *gap_threshold_s;
    if (series.size() < 2)
        throw Error("wrangle", "cannot derive gap threshold from a series with fewer than 2 samples");
    std::vector<double> intervals;
    intervals.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i)
        intervals.push_back(series.times[i] - series.times[i - 1]);
    return 5.0 * median_of(std::move(intervals));
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
    if (v.empty()) throw Error("series", "median of empty vector");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

NonUniformSeries remove_nulls(const NonUniformSeries& series) {
    series.validate("wrangle");
    NonUniformSeries out;
    out.kind = series.kind;
    out.times.reserve(series.size());
    out.values.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (std::isfinite(series.values[i])) {
            out.times.push_back(series.times[i]);
            out.values.push_back(series.values[i]);
        }
    }
    if (out.empty())
        throw Error("wrangle", "series is empty after null removal");
    return out;
}

NonUniformSeries replace_outliers(const NonUniformSeries& series, const WrangleConfig& cfg) {
    series.validate("wrangle");
    cfg.validate();
    if (series.size() < 2)
        throw Error("wrangle", "replace_outliers requires at least 2 samples");

    const double m = mean_of(series.values);
    const double sd = population_std(series.values);

    NonUniformSeries out = series;
    if (sd == 0.0) return out; // constant series bypasses the test

    const std::size_t n = series.size();
    std::vector<char> flagged(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        flagged[i] = std::abs(series.values[i] - m) / sd > cfg.outlier_z_threshold ? 1 : 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (!flagged[i]) continue;
        double sum = 0.0;
        std::size_t count = 0;
        // scan outward, collecting up to neighbor_radius non-flagged values per side
        std::size_t taken = 0;
        for (std::size_t j = i; j-- > 0 && taken < cfg.neighbor_radius;) {
            if (!flagged[j]) {
                sum += series.values[j];
                ++count;
                ++taken;
            }
        }
        taken = 0;
        for (std::size_t j = i + 1; j < n && taken < cfg.neighbor_radius; ++j) {
            if (!flagged[j]) {
                sum += series.values[j];
                ++count;
                ++taken;
            }
        }
        // all samples flagged: fall back to the global mean
        out.values[i] = count > 0 ? sum / static_cast<double>(count) : m;
    }
    return out;
}

std::vector<NonUniformSeries> segment_gaps(const NonUniformSeries& series, const WrangleConfig& cfg) {
    series.validate("wrangle");
    cfg.validate();
    if (series.empty())
        throw Error("wrangle", "segment_gaps requires a non-empty series");

    std::vector<NonUniformSeries> segments;
    if (series.size() == 1) {
        segments.push_back(series);
        return segments;
    }
    const double threshold = cfg.effective_gap_threshold(series);

    NonUniformSeries current;
    current.kind = series.kind;
    current.times.push_back(series.times[0]);
    current.values.push_back(series.values[0]);
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series.times[i] - series.times[i - 1] > threshold) {
            segments.push_back(std::move(current));
            current = NonUniformSeries{};
            current.kind = series.kind;
        }
        current.times.push_back(series.times[i]);
        current.values.push_back(series.values[i]);
    }
    segments.push_back(std::move(current));
    return segments;
}

NonUniformSeries longest_segment(const std::vector<NonUniformSeries>& segments) {
    if (segments.empty())
        throw Error("wrangle", "longest_segment requires a non-empty list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        const bool longer = segments[i].size() > segments[best].size();
        const bool earlier_tie = segments[i].size() == segments[best].size() &&
                                 segments[i].times.front() < segments[best].times.front();
        if (longer || earlier_tie) best = i;
    }
    return segments[best];
}

NonUniformSeries zscore_normalize(const NonUniformSeries& series) {
    series.validate("wrangle");
    if (series.size() < 2)
        throw Error("wrangle", "zscore_normalize requires at least 2 samples");
    const double m = mean_of(series.values);
    const double sd = population_std(series.values);
    if (sd == 0.0)
        throw Error("wrangle", "zscore_normalize: series has zero variance");
    NonUniformSeries out = series;
    for (double& v : out.values) v = (v - m) / sd;
    return out;
}

NonUniformSeries wrangle(const NonUniformSeries& series, const WrangleConfig& cfg) {
    const NonUniformSeries cleaned = remove_nulls(series);
    const NonUniformSeries despiked = replace_outliers(cleaned, cfg);
    const std::vector<NonUniformSeries> segments = segment_gaps(despiked, cfg);
    const NonUniformSeries longest = longest_segment(segments);
    return zscore_normalize(longest);
}

} // namespace nuwean
