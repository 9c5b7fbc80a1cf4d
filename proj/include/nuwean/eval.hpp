#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nuwean/stats.hpp"
#include "nuwean/svm.hpp"

namespace nuwean {

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::uint64_t total() const { return tp + fp + tn + fn; }
};

// Positive class is label 1 (weaning failure). Metrics with a zero
// denominator come back unset.
struct PointMetrics {
    std::optional<double> accuracy, precision, recall, f1, specificity;
};

PointMetrics confusion_metrics(const ConfusionCounts& counts);

// Tie-adjusted AUC as exact integers: value = numerator / denominator with
// numerator = 2*wins + ties over positive/negative pairs and denominator =
// 2 * n0 * n1. The trapezoidal sweep over the empirical ROC produces the
// same integers.
struct AucCounts {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 0;
    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

AucCounts auc_roc_counts(const std::vector<double>& scores, const std::vector<int>& labels);
double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded, per-class proportions preserved within +-1 sample.
SplitIndices stratified_split(const std::vector<int>& labels, double fraction, std::uint64_t seed);

// Disjoint folds covering all indices; per-class counts differ by <= 1.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels,
                                                       std::size_t k, std::uint64_t seed);

struct RepeatedCvConfig {
    std::size_t repetitions = 150;
    std::size_t folds = 4;
    std::uint64_t seed = 1;
    double selection_threshold = 0.05;
    std::size_t selection_k = 18;
};

// One held-out-fold evaluation.
struct CvEvaluation {
    std::size_t repetition = 0;
    std::size_t fold = 0;
    ConfusionCounts counts;
    PointMetrics metrics;
    double auc = 0.0;
    std::vector<std::size_t> selected_features; // mask fit on the training folds
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // population, over defined evaluations
    std::size_t defined = 0;
    std::size_t undefined = 0;
};

struct EvalReport {
    std::size_t folds = 0;
    std::size_t repetitions = 0;
    int positive_label = 1;
    MetricSummary accuracy, precision, recall, f1, specificity, auc;
    std::vector<CvEvaluation> evaluations;
};

// Seed for repetition r; exposed so tests can reconstruct fold layouts.
std::uint64_t repeated_cv_seed(std::uint64_t master_seed, std::size_t repetition);

// Repeated stratified k-fold protocol. Feature selection and normalization
// are refit inside the training folds of every evaluation; the held-out fold
// only ever sees the trained model.
EvalReport repeated_cv(const FeatureMatrix& matrix, const KernelSpec& spec,
                       const RepeatedCvConfig& cfg);

MetricSummary summarize(const std::vector<double>& values, std::size_t undefined);

} // namespace nuwean
