#include "nuwean/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <Eigen/Dense>

#include "nuwean/eval.hpp"
#include "nuwean/rng.hpp"
#include "nuwean/series.hpp"

namespace nuwean {

void BoxBounds::validate() const {
    if (lo.size() != hi.size() || lo.empty())
        throw Error("bayesopt", "invalid box bounds");
    for (std::size_t d = 0; d < lo.size(); ++d) {
        if (!(lo[d] < hi[d]))
            throw Error("bayesopt", "box bounds must satisfy lo < hi");
    }
}

namespace {

constexpr double kBaseNoise = 1e-6;
constexpr double kSqrt5 = 2.2360679774997896;

double matern52(double r, double length_scale) {
    const double a = kSqrt5 * r / length_scale;
    return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

double scaled_distance(const std::vector<double>& a, const std::vector<double>& b,
                       const BoxBounds& box) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < box.dim(); ++k) {
        const double scale = box.hi[k] - box.lo[k];
        const double d = (a[k] - b[k]) / scale;
        d2 += d * d;
    }
    return std::sqrt(d2);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

struct GaussianProcess::Impl {
    std::vector<std::vector<double>> points;
    BoxBounds bounds;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd weights; // (K + noise I)^-1 (y - mean)
    double mean = 0.0;
    double variance = 0.0; // sigma_f^2
    double length_scale = 0.0;
    double noise = kBaseNoise;
};

GaussianProcess::GaussianProcess(const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& values, const BoxBounds& bounds) {
    bounds.validate();
    if (points.empty() || points.size() != values.size())
        throw Error("bayesopt", "GP requires at least one observation");
    for (const auto& p : points) {
        if (p.size() != bounds.dim())
            throw Error("bayesopt", "GP point dimension mismatch");
    }

    const std::size_t n = points.size();
    auto impl = std::make_shared<Impl>();
    impl->points = points;
    impl->bounds = bounds;
    impl->mean = mean_of(values);
    double var = 0.0;
    for (double v : values) var += (v - impl->mean) * (v - impl->mean);
    var /= static_cast<double>(n);
    impl->variance = var;

    Eigen::VectorXd centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[static_cast<Eigen::Index>(i)] = values[i] - impl->mean;

    Eigen::MatrixXd dist(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double r = scaled_distance(points[i], points[j], bounds);
            dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
            dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
        }
    }

    // isotropic length scale from a fixed grid by max log marginal likelihood
    static constexpr double kGrid[] = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double ell : kGrid) {
        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
                k(i, j) = var * matern52(dist(i, j), ell);

        double noise = kBaseNoise;
        Eigen::LLT<Eigen::MatrixXd> llt;
        bool ok = false;
        for (int attempt = 0; attempt <= 3; ++attempt) {
            Eigen::MatrixXd kn = k;
            kn.diagonal().array() += noise;
            llt.compute(kn);
            if (llt.info() == Eigen::Success) {
                ok = true;
                break;
            }
            noise *= 10.0;
        }
        if (!ok) continue;

        const Eigen::VectorXd w = llt.solve(centered);
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
            log_det += 2.0 * std::log(llt.matrixL()(i, i));
        const double ll = -0.5 * centered.dot(w) - 0.5 * log_det -
                          0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        if (ll > best_ll) {
            best_ll = ll;
            impl->length_scale = ell;
            impl->noise = noise;
            impl->llt = llt;
            impl->weights = w;
        }
    }
    if (!std::isfinite(best_ll))
        throw Error("bayesopt", "GP covariance is singular even after jitter escalation");

    length_scale_ = impl->length_scale;
    signal_stddev_ = std::sqrt(impl->variance);
    impl_ = std::move(impl);
}

void GaussianProcess::predict(const std::vector<double>& point, double& mean,
                              double& stddev) const {
    const Impl& im = *impl_;
    if (point.size() != im.bounds.dim())
        throw Error("bayesopt", "GP query dimension mismatch");
    const std::size_t n = im.points.size();
    Eigen::VectorXd kstar(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = scaled_distance(point, im.points[i], im.bounds);
        kstar[static_cast<Eigen::Index>(i)] = im.variance * matern52(r, im.length_scale);
    }
    mean = im.mean + kstar.dot(im.weights);
    const Eigen::VectorXd v = im.llt.solve(kstar);
    double var = im.variance - kstar.dot(v);
    if (var < 0.0) var = 0.0;
    stddev = std::sqrt(var);
}

GpPrediction gp_fit_predict(const std::vector<std::vector<double>>& observed_points,
                            const std::vector<double>& observed_values,
                            const std::vector<std::vector<double>>& query_points,
                            const BoxBounds& bounds) {
    const GaussianProcess gp(observed_points, observed_values, bounds);
    GpPrediction out;
    out.means.resize(query_points.size());
    out.stddevs.resize(query_points.size());
    for (std::size_t i = 0; i < query_points.size(); ++i)
        gp.predict(query_points[i], out.means[i], out.stddevs[i]);
    return out;
}

double expected_improvement(double mean, double stddev, double best) {
    if (stddev < 0.0)
        throw Error("bayesopt", "expected_improvement: negative stddev");
    const double gain = mean - best;
    if (stddev == 0.0) return std::max(gain, 0.0);
    const double z = gain / stddev;
    return gain * normal_cdf(z) + stddev * normal_pdf(z);
}

namespace {

std::vector<std::vector<double>> latin_hypercube(const BoxBounds& box, std::size_t count,
                                                 Rng& rng) {
    const std::size_t dim = box.dim();
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<std::size_t> strata(count);
        for (std::size_t i = 0; i < count; ++i) strata[i] = i;
        shuffle(strata, rng);
        for (std::size_t i = 0; i < count; ++i) {
            const double u = (static_cast<double>(strata[i]) + rng.uniform()) /
                             static_cast<double>(count);
            pts[i][d] = box.lo[d] + u * (box.hi[d] - box.lo[d]);
        }
    }
    return pts;
}

std::vector<double> random_point(const BoxBounds& box, Rng& rng) {
    std::vector<double> p(box.dim());
    for (std::size_t d = 0; d < box.dim(); ++d) p[d] = rng.uniform(box.lo[d], box.hi[d]);
    return p;
}

} // namespace

BoResult maximize(const std::function<double(const std::vector<double>&)>& objective,
                  const BoxBounds& bounds, const BoConfig& cfg) {
    bounds.validate();
    if (cfg.iterations < cfg.init_random || cfg.init_random == 0)
        throw Error("bayesopt", "iterations must be >= init_random >= 1");

    BoResult res;
    res.best_value = -std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(cfg.seed, 0xB0));

    auto evaluate = [&](const std::vector<double>& point) {
        BoEvaluation ev;
        ev.point = point;
        try {
            ev.value = objective(point);
            ev.ok = std::isfinite(ev.value);
            if (!ev.ok) ev.value = -std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
            ev.ok = false;
            ev.value = -std::numeric_limits<double>::infinity();
        }
        if (ev.ok && ev.value > res.best_value) {
            res.best_value = ev.value;
            res.best_point = ev.point;
            res.best_index = res.history.size();
        }
        res.history.push_back(ev);
    };

    for (const auto& p : latin_hypercube(bounds, cfg.init_random, rng)) evaluate(p);

    for (std::size_t it = cfg.init_random; it < cfg.iterations; ++it) {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (const BoEvaluation& ev : res.history) {
            if (ev.ok) {
                xs.push_back(ev.point);
                ys.push_back(ev.value);
            }
        }
        if (xs.size() < 2) {
            evaluate(random_point(bounds, rng));
            continue;
        }

        const GaussianProcess gp(xs, ys, bounds);
        const double incumbent = res.best_value;

        std::vector<double> best_cand;
        double best_ei = -1.0;
        for (std::size_t c = 0; c < cfg.candidates; ++c) {
            const std::vector<double> cand = random_point(bounds, rng);
            double mu, sigma;
            gp.predict(cand, mu, sigma);
            const double ei = expected_improvement(mu, sigma, incumbent);
            if (ei > best_ei) {
                best_ei = ei;
                best_cand = cand;
            }
        }

        // local refinement around the winning candidate
        double step = 0.05;
        for (std::size_t r = 0; r < 64; ++r) {
            std::vector<double> probe = best_cand;
            for (std::size_t d = 0; d < bounds.dim(); ++d) {
                const double width = bounds.hi[d] - bounds.lo[d];
                probe[d] = std::clamp(probe[d] + rng.normal() * step * width, bounds.lo[d],
                                      bounds.hi[d]);
            }
            double mu, sigma;
            gp.predict(probe, mu, sigma);
            const double ei = expected_improvement(mu, sigma, incumbent);
            if (ei > best_ei) {
                best_ei = ei;
                best_cand = probe;
            }
            if ((r + 1) % 16 == 0) step *= 0.7;
        }
        evaluate(best_cand);
    }

    if (!std::isfinite(res.best_value))
        throw Error("bayesopt", "every objective evaluation failed");
    return res;
}

// ---- SVM hyperparameter search ----

BoxBounds svm_search_space() {
    BoxBounds box;
    box.lo = {0.0, -3.0, -3.0, 2.0};
    box.hi = {3.0, 3.0, 2.0, 5.0};
    return box;
}

KernelSpec decode_kernel_spec(const std::vector<double>& point) {
    if (point.size() != 4)
        throw Error("bayesopt", "kernel point must have 4 coordinates");
    KernelSpec spec;
    const int kind = std::min(2, std::max(0, static_cast<int>(std::floor(point[0]))));
    spec.kind = static_cast<KernelKind>(kind);
    spec.c = std::pow(10.0, std::clamp(point[1], -3.0, 3.0));
    spec.scale = std::pow(10.0, std::clamp(point[2], -3.0, 2.0));
    spec.degree = static_cast<int>(std::llround(std::clamp(point[3], 2.0, 5.0)));
    return spec;
}

double svm_split_objective(const FeatureMatrix& matrix, const KernelSpec& spec,
                           std::uint64_t split_seed) {
    matrix.validate();
    const SplitIndices split = stratified_split(matrix.labels, 0.7, split_seed);
    if (split.train.empty() || split.test.empty())
        throw Error("bayesopt", "degenerate 70/30 split");

    auto gather = [&](const std::vector<std::size_t>& idx, std::vector<std::vector<double>>& x,
                      std::vector<int>& y) {
        for (std::size_t i : idx) {
            x.push_back(matrix.rows[i]);
            y.push_back(matrix.labels[i]);
        }
    };
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<int> train_y, test_y;
    gather(split.train, train_x, train_y);
    gather(split.test, test_x, test_y);

    const bool train_both = std::count(train_y.begin(), train_y.end(), 1) > 0 &&
                            std::count(train_y.begin(), train_y.end(), 0) > 0;
    const bool test_both = std::count(test_y.begin(), test_y.end(), 1) > 0 &&
                           std::count(test_y.begin(), test_y.end(), 0) > 0;
    if (!train_both || !test_both)
        throw Error("bayesopt", "70/30 split left a side without both classes");

    const TrainedModel model = train(train_x, train_y, spec, inverse_frequency_weights(train_y));

    auto score_all = [&](const std::vector<std::vector<double>>& x) {
        std::vector<double> s;
        s.reserve(x.size());
        for (const auto& row : x) s.push_back(decision_function(model, row));
        return s;
    };
    const double auc_train = auc_roc(score_all(train_x), train_y);
    const double auc_test = auc_roc(score_all(test_x), test_y);
    return 0.5 * (auc_train + auc_test);
}

HyperSearchResult optimize_hyperparameters(const FeatureMatrix& matrix, const BoConfig& cfg) {
    const std::uint64_t split_seed = derive_seed(cfg.seed, 0x5B117);
    const auto objective = [&](const std::vector<double>& point) {
        return svm_split_objective(matrix, decode_kernel_spec(point), split_seed);
    };

    HyperSearchResult out;
    out.bo = maximize(objective, svm_search_space(), cfg);
    out.specs.reserve(out.bo.history.size());
    for (const BoEvaluation& ev : out.bo.history) out.specs.push_back(decode_kernel_spec(ev.point));
    out.best_spec = decode_kernel_spec(out.bo.best_point);
    return out;
}

} // namespace nuwean
