#include "nuwean/svm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>


namespace nuwean {

std::string kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Linear: return "linear";
        case KernelKind::Polynomial: return "polynomial";
        case KernelKind::Rbf: return "rbf";
    }
    throw Error("svm", "invalid kernel kind");
}

KernelKind kernel_kind_from_string(const std::string& token) {
    if (token == "linear") return KernelKind::Linear;
    if (token == "polynomial" || token == "poly") return KernelKind::Polynomial;
    if (token == "rbf") return KernelKind::Rbf;
    throw Error("svm", "unknown kernel kind '" + token + "'");
}

void KernelSpec::validate() const {
    if (!(c > 0.0)) throw Error("svm", "C must be > 0");
    if (kind == KernelKind::Polynomial && degree < 2)
        throw Error("svm", "polynomial degree must be >= 2");
    if (kind != KernelKind::Linear && !(scale > 0.0))
        throw Error("svm", "kernel scale must be > 0");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error("svm", "kernel_eval: dimension mismatch");
    switch (spec.kind) {
        case KernelKind::Linear: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
            return dot;
        }
        case KernelKind::Polynomial: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
            return std::pow(dot / spec.scale + 1.0, spec.degree);
        }
        case KernelKind::Rbf: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - y[i];
                d2 += d * d;
            }
            return std::exp(-d2 / (2.0 * spec.scale * spec.scale));
        }
    }
    throw Error("svm", "invalid kernel kind");
}

std::array<double, 2> inverse_frequency_weights(const std::vector<int>& labels) {
    double n0 = 0.0, n1 = 0.0;
    for (int y : labels) (y == 0 ? n0 : n1) += 1.0;
    if (n0 == 0.0 || n1 == 0.0)
        throw Error("svm", "class weights require both classes");
    const double total = n0 + n1;
    return {total / (2.0 * n0), total / (2.0 * n1)};
}

namespace {

// SMO on the weighted dual, maximal-violating-pair selection: each step
// updates the pair with the largest feasible |E_i - E_j| gap, the gradient
// criterion that guarantees convergence. Deterministic (ties break toward
// the lower index). Small-n oriented: the full Gram matrix is cached.
class SmoSolver {
public:
    SmoSolver(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
              const std::vector<double>& box, const KernelSpec& spec, const TrainConfig& cfg)
        : y_(y), box_(box), tol_(cfg.tolerance) {
        n_ = x.size();
        alpha_.assign(n_, 0.0);
        // resid_[i] = y_i - sum_j alpha_j y_j K_ij (bias-free margin residual)
        resid_ = y;
        gram_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double k = kernel_eval(spec, x[i], x[j]);
                gram_[i * n_ + j] = k;
                gram_[j * n_ + i] = k;
            }
        }
        max_iterations_ = std::max<std::size_t>(cfg.max_passes_factor * n_ * n_, 10000);
    }

    void solve() {
        for (std::size_t iter = 0; iter < max_iterations_; ++iter) {
            // i maximizes resid over the up-feasible set, j minimizes it over
            // the down-feasible set; the optimality gap is resid_i - resid_j
            std::size_t i = n_, j = n_;
            double up = -std::numeric_limits<double>::infinity();
            double low = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n_; ++t) {
                const bool up_ok = y_[t] > 0.0 ? alpha_[t] < box_[t] : alpha_[t] > 0.0;
                const bool low_ok = y_[t] > 0.0 ? alpha_[t] > 0.0 : alpha_[t] < box_[t];
                if (up_ok && resid_[t] > up) {
                    up = resid_[t];
                    i = t;
                }
                if (low_ok && resid_[t] < low) {
                    low = resid_[t];
                    j = t;
                }
            }
            if (i == n_ || j == n_ || up - low <= tol_) {
                b_ = finalize_bias(up, low);
                return;
            }
            step(i, j);
        }
        throw Error("svm", "SMO did not converge within " +
                               std::to_string(max_iterations_) + " iterations");
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return b_; }

private:
    double k(std::size_t a, std::size_t b) const { return gram_[a * n_ + b]; }

    void step(std::size_t i, std::size_t j) {
        const double yi = y_[i], yj = y_[j];
        // maximize along the pair direction: d alpha_i = yi t, d alpha_j = -yj t
        const double eta =
            std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), 1e-12); // flat directions clipped
        double t = (resid_[i] - resid_[j]) / eta;

        // box limits for t on both coordinates
        const double ai = alpha_[i], aj = alpha_[j];
        double t_max = yi > 0.0 ? box_[i] - ai : ai;
        double t_min = 0.0;
        const double t_max_j = yj > 0.0 ? aj : box_[j] - aj;
        t_max = std::min(t_max, t_max_j);
        t = std::clamp(t, t_min, t_max);
        if (t <= 0.0) return;

        alpha_[i] = ai + yi * t;
        alpha_[j] = aj - yj * t;
        // snap to the box to keep the bound sets crisp
        if (alpha_[i] < 1e-12) alpha_[i] = 0.0;
        if (alpha_[i] > box_[i] - 1e-12) alpha_[i] = box_[i];
        if (alpha_[j] < 1e-12) alpha_[j] = 0.0;
        if (alpha_[j] > box_[j] - 1e-12) alpha_[j] = box_[j];

        const double di = (alpha_[i] - ai) * yi;
        const double dj = (alpha_[j] - aj) * yj;
        for (std::size_t t2 = 0; t2 < n_; ++t2)
            resid_[t2] -= di * k(i, t2) + dj * k(j, t2);
    }

    // average residual over free vectors, else the midpoint of the gap
    double finalize_bias(double up, double low) const {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            if (alpha_[t] > 0.0 && alpha_[t] < box_[t]) {
                acc += resid_[t];
                ++count;
            }
        }
        if (count > 0) return acc / static_cast<double>(count);
        if (std::isfinite(up) && std::isfinite(low)) return 0.5 * (up + low);
        return 0.0;
    }

    const std::vector<double>& y_;
    const std::vector<double>& box_;
    double tol_;
    std::size_t n_ = 0;
    std::size_t max_iterations_ = 0;
    std::vector<double> alpha_, resid_, gram_;
    double b_ = 0.0;
};

} // namespace

TrainedModel train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                   const KernelSpec& spec, const std::array<double, 2>& class_weights,
                   const TrainConfig& cfg) {
    spec.validate();
    if (rows.size() != labels.size())
        throw Error("svm", "row/label count mismatch");
    if (rows.empty())
        throw Error("svm", "empty training set");
    const std::size_t dim = rows[0].size();
    if (dim == 0)
        throw Error("svm", "zero-dimensional features");

    bool has0 = false, has1 = false;
    for (int y : labels) {
        if (y == 0) has0 = true;
        else if (y == 1) has1 = true;
        else throw Error("svm", "labels must be 0 or 1");
    }
    if (!has0 || !has1)
        throw Error("svm", "training requires at least one sample per class");

    // per-feature normalization statistics from the training data only
    std::vector<double> means(dim, 0.0), stds(dim, 0.0);
    for (const auto& row : rows) {
        if (row.size() != dim) throw Error("svm", "ragged feature rows");
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::isfinite(row[j])) throw Error("svm", "non-finite feature value");
            means[j] += row[j];
        }
    }
    for (double& m : means) m /= static_cast<double>(rows.size());
    for (const auto& row : rows)
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = row[j] - means[j];
            stds[j] += d * d;
        }
    for (double& s : stds) {
        s = std::sqrt(s / static_cast<double>(rows.size()));
        if (s == 0.0) s = 1.0;
    }

    std::vector<std::vector<double>> norm(rows.size(), std::vector<double>(dim));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j)
            norm[i][j] = (rows[i][j] - means[j]) / stds[j];

    std::vector<double> y(rows.size());
    std::vector<double> box(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        y[i] = labels[i] == 1 ? 1.0 : -1.0;
        box[i] = spec.c * class_weights[static_cast<std::size_t>(labels[i])];
    }

    SmoSolver solver(norm, y, box, spec, cfg);
    solver.solve();
    const std::vector<double>& alpha = solver.alphas();

    TrainedModel model;
    model.kernel = spec;
    model.class_weights = class_weights;
    model.feature_means = std::move(means);
    model.feature_stds = std::move(stds);
    model.bias = solver.bias();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (alpha[i] > 1e-12) {
            model.support_vectors.push_back(norm[i]);
            model.dual_coefs.push_back(alpha[i] * y[i]);
        }
    }
    return model;
}

TrainedModel train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                   const KernelSpec& spec) {
    return train(rows, labels, spec, inverse_frequency_weights(labels));
}

double decision_function(const TrainedModel& model, std::span<const double> row) {
    const std::size_t dim = model.feature_means.size();
    std::vector<double> x(dim);
    if (model.selection_mask.empty()) {
        if (row.size() != dim)
            throw Error("svm", "decision_function: dimension mismatch");
        for (std::size_t j = 0; j < dim; ++j) x[j] = row[j];
    } else {
        if (model.selection_mask.size() != dim)
            throw Error("svm", "model selection mask inconsistent with statistics");
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t src = model.selection_mask[j];
            if (src >= row.size())
                throw Error("svm", "decision_function: row too short for selection mask");
            x[j] = row[src];
        }
    }
    for (std::size_t j = 0; j < dim; ++j)
        x[j] = (x[j] - model.feature_means[j]) / model.feature_stds[j];

    double score = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        score += model.dual_coefs[i] * kernel_eval(model.kernel, model.support_vectors[i], x);
    return score;
}

int predict(const TrainedModel& model, std::span<const double> row) {
    return decision_function(model, row) > 0.0 ? 1 : 0;
}

// ---- persistence ----
//
// NUSVM1 layout, little-endian throughout:
//   magic "NUSVM1" (6 bytes), version u16
//   config_hash u64, seed u64
//   kernel kind u8 (0 linear, 1 polynomial, 2 rbf), degree u32, C f64, scale f64
//   class_weights f64[2], bias f64
//   dim u64, feature_means f64[dim], feature_stds f64[dim]
//   mask_len u64, selection_mask u64[mask_len]
//   n_sv u64, support_vectors f64[n_sv][dim], dual_coefs f64[n_sv]

namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");

constexpr char kMagic[6] = {'N', 'U', 'S', 'V', 'M', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("svm", "truncated model file " + path);
    return v;
}

} // namespace

void save_model(const std::string& path, const TrainedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("svm", "cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    put<std::uint16_t>(out, 1);
    put<std::uint64_t>(out, model.config_hash);
    put<std::uint64_t>(out, model.seed);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(model.kernel.kind));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.kernel.degree));
    put<double>(out, model.kernel.c);
    put<double>(out, model.kernel.scale);
    put<double>(out, model.class_weights[0]);
    put<double>(out, model.class_weights[1]);
    put<double>(out, model.bias);
    const std::uint64_t dim = model.feature_means.size();
    put<std::uint64_t>(out, dim);
    for (double v : model.feature_means) put(out, v);
    for (double v : model.feature_stds) put(out, v);
    put<std::uint64_t>(out, model.selection_mask.size());
    for (std::size_t idx : model.selection_mask) put<std::uint64_t>(out, idx);
    put<std::uint64_t>(out, model.support_vectors.size());
    for (const auto& sv : model.support_vectors)
        for (double v : sv) put(out, v);
    for (double v : model.dual_coefs) put(out, v);
    if (!out) throw Error("svm", "write failure on " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("svm", "cannot open model file " + path);
    char magic[6];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("svm", path + " is not a NUSVM1 model file");
    const auto version = get<std::uint16_t>(in, path);
    if (version != 1)
        throw Error("svm", "unsupported model version " + std::to_string(version));

    TrainedModel model;
    model.config_hash = get<std::uint64_t>(in, path);
    model.seed = get<std::uint64_t>(in, path);
    const auto kind = get<std::uint8_t>(in, path);
    if (kind > 2) throw Error("svm", "invalid kernel kind in " + path);
    model.kernel.kind = static_cast<KernelKind>(kind);
    model.kernel.degree = static_cast<int>(get<std::uint32_t>(in, path));
    model.kernel.c = get<double>(in, path);
    model.kernel.scale = get<double>(in, path);
    model.class_weights[0] = get<double>(in, path);
    model.class_weights[1] = get<double>(in, path);
    model.bias = get<double>(in, path);
    const auto dim = get<std::uint64_t>(in, path);
    model.feature_means.resize(dim);
    model.feature_stds.resize(dim);
    for (auto& v : model.feature_means) v = get<double>(in, path);
    for (auto& v : model.feature_stds) v = get<double>(in, path);
    const auto mask_len = get<std::uint64_t>(in, path);
    model.selection_mask.resize(mask_len);
    for (auto& v : model.selection_mask) v = static_cast<std::size_t>(get<std::uint64_t>(in, path));
    const auto n_sv = get<std::uint64_t>(in, path);
    model.support_vectors.assign(n_sv, std::vector<double>(dim));
    for (auto& sv : model.support_vectors)
        for (auto& v : sv) v = get<double>(in, path);
    model.dual_coefs.resize(n_sv);
    for (auto& v : model.dual_coefs) v = get<double>(in, path);
    return model;
}

} // namespace nuwean
