#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nuwean/error.hpp"

namespace nuwean {

enum class KernelKind { Linear, Polynomial, Rbf };

std::string kernel_kind_name(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& token);

struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    double c = 1.0;     // regularization
    int degree = 3;     // polynomial only
    double scale = 1.0; // rbf and polynomial

    void validate() const;
};

// linear: x.y; polynomial: (x.y/scale + 1)^degree; rbf: exp(-|x-y|^2/(2 scale^2))
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

// Dual solution plus everything needed to score a raw patient vector:
// selection mask, then per-feature z-normalization, then the kernel expansion.
struct TrainedModel {
    KernelSpec kernel;
    std::array<double, 2> class_weights{1.0, 1.0}; // index by label
    std::vector<double> feature_means;             // per masked feature
    std::vector<double> feature_stds;              // zero-variance features stored as 1
    std::vector<std::size_t> selection_mask;       // empty = identity
    std::vector<std::vector<double>> support_vectors; // normalized rows
    std::vector<double> dual_coefs;                   // alpha_i * y_i
    double bias = 0.0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

struct TrainConfig {
    double tolerance = 1e-3;
    // pair-update budget = max(factor * n^2, 10000); one full sweep costs n
    std::size_t max_passes_factor = 10;
};

// w_c = n_total / (2 n_c)
std::array<double, 2> inverse_frequency_weights(const std::vector<int>& labels);

// Weighted soft-margin SMO on the dual; box constraints 0 <= alpha_i <=
// C * w_{y_i}. Features are z-normalized with training statistics that are
// frozen into the model. Throws on a single-class input or when the pass
// budget is exhausted without convergence.
TrainedModel train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                   const KernelSpec& spec, const std::array<double, 2>& class_weights,
                   const TrainConfig& cfg = {});

TrainedModel train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                   const KernelSpec& spec);

// Signed score; class 1 iff score > 0 (ties -> class 0). `row` is a raw
// vector in the space the selection mask indexes.
double decision_function(const TrainedModel& model, std::span<const double> row);
int predict(const TrainedModel& model, std::span<const double> row);

// Versioned little-endian flat file, magic "NUSVM1".
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

} // namespace nuwean
