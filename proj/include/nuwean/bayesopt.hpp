#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nuwean/stats.hpp"
#include "nuwean/svm.hpp"

namespace nuwean {

struct BoxBounds {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    void validate() const;
};

// GP regression with a Matern-5/2 kernel on inputs scaled to the unit box.
// Constant mean = sample mean of the observations; observation noise 1e-6
// with x10 jitter escalation (up to 3 times) if the Cholesky fails.
class GaussianProcess {
public:
    GaussianProcess(const std::vector<std::vector<double>>& points,
                    const std::vector<double>& values, const BoxBounds& bounds);

    void predict(const std::vector<double>& point, double& mean, double& stddev) const;
    double length_scale() const { return length_scale_; }
    double prior_stddev() const { return signal_stddev_; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    double length_scale_ = 0.0;
    double signal_stddev_ = 0.0;
};

struct GpPrediction {
    std::vector<double> means;
    std::vector<double> stddevs;
};

GpPrediction gp_fit_predict(const std::vector<std::vector<double>>& observed_points,
                            const std::vector<double>& observed_values,
                            const std::vector<std::vector<double>>& query_points,
                            const BoxBounds& bounds);

// EI for maximization: (mu - best) Phi(z) + sigma phi(z), z = (mu - best)/sigma.
double expected_improvement(double mean, double stddev, double best);

struct BoConfig {
    std::size_t iterations = 100;
    std::size_t init_random = 10;
    std::uint64_t seed = 1;
    std::size_t candidates = 1024; // inner EI maximization samples
};

struct BoEvaluation {
    std::vector<double> point;
    double value = 0.0;
    bool ok = true; // false: objective failed, recorded as -inf and skipped by the GP
};

struct BoResult {
    std::vector<BoEvaluation> history;
    std::vector<double> best_point;
    double best_value = 0.0;
    std::size_t best_index = 0;
};

// Generic continuous-box maximizer: seeded Latin-hypercube initialization,
// then EI proposals (candidate sampling plus local refinement).
BoResult maximize(const std::function<double(const std::vector<double>&)>& objective,
                  const BoxBounds& bounds, const BoConfig& cfg);

// ---- SVM hyperparameter search ----

// Axes: kernel in [0,3) floored to {linear, polynomial, rbf}; log10 C in
// [-3,3]; log10 scale in [-3,2]; degree in [2,5] rounded.
BoxBounds svm_search_space();
KernelSpec decode_kernel_spec(const std::vector<double>& point);

struct HyperSearchResult {
    BoResult bo;
    std::vector<KernelSpec> specs; // decoded, aligned with bo.history
    KernelSpec best_spec;
};

// Objective for one spec: stratified 70/30 split (fixed per search), train on
// 70%, return the mean of train and test AUC.
double svm_split_objective(const FeatureMatrix& matrix, const KernelSpec& spec,
                           std::uint64_t split_seed);

HyperSearchResult optimize_hyperparameters(const FeatureMatrix& matrix, const BoConfig& cfg);

} // namespace nuwean
