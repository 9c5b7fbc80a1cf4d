#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nuwean/error.hpp"

namespace nuwean {

enum class RankTestMethod { Exact, NormalApprox };

struct RankTestResult {
    double u_statistic = 0.0; // min(U_a, U_b)
    double z_value = 0.0;     // 0 on the exact path
    double p_two_sided = 1.0;
    RankTestMethod method = RankTestMethod::Exact;
};

// Midranks for ties. Exact two-sided p (P(min(U_a,U_b) <= U_obs) over all
// C(n1+n2, n1) labelings) when the pooled sample is tie-free and has <= 20
// values; otherwise normal approximation with tie-corrected variance and 0.5
// continuity correction.
RankTestResult mann_whitney(const std::vector<double>& sample_a,
                            const std::vector<double>& sample_b);

struct SelectionResult {
    std::vector<std::size_t> kept_indices; // ascending by p-value
    std::vector<std::string> kept_names;
    std::vector<double> p_values; // per kept feature
    double threshold = 0.05;
    std::size_t k = 18;
};

struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<std::string> patient_ids;
    std::vector<int> labels; // 0 = success, 1 = failure
    std::vector<std::vector<double>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return names.size(); }
    void validate() const;
};

// Per-feature Mann-Whitney between the two classes; keep p < threshold,
// ascending by p, truncated to k.
SelectionResult select_features(const FeatureMatrix& matrix, double threshold = 0.05,
                                std::size_t k = 18);

// All per-feature two-sided p-values (no thresholding); used by the
// Table-1-style report.
std::vector<double> feature_p_values(const FeatureMatrix& matrix);

// Selection indices, falling back to the single smallest-p feature when
// nothing clears the threshold (a classifier needs at least one column).
std::vector<std::size_t> selection_mask_with_fallback(const FeatureMatrix& matrix,
                                                      double threshold, std::size_t k);

double normal_cdf(double z);

} // namespace nuwean
