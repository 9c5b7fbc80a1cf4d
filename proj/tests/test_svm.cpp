#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "nuwean/rng.hpp"
#include "nuwean/svm.hpp"

using namespace nuwean;

TEST_CASE("kernel_eval: closed forms") {
    const KernelSpec lin{KernelKind::Linear, 1.0, 3, 1.0};
    CHECK(kernel_eval(lin, std::vector<double>{1, 2}, std::vector<double>{3, 4}) ==
          doctest::Approx(11.0));

    KernelSpec rbf;
    rbf.kind = KernelKind::Rbf;
    rbf.scale = 2.828; // the published winning scale
    const std::vector<double> x{0.0, 0.0};
    CHECK(kernel_eval(rbf, x, x) == doctest::Approx(1.0));
    const std::vector<double> y{2.828, 0.0}; // |x-y| == scale -> exp(-1/2)
    CHECK(kernel_eval(rbf, x, y) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
    CHECK(kernel_eval(rbf, x, y) == doctest::Approx(0.60653).epsilon(1e-4));

    KernelSpec poly;
    poly.kind = KernelKind::Polynomial;
    poly.degree = 2;
    poly.scale = 2.0;
    CHECK(kernel_eval(poly, std::vector<double>{1, 1}, std::vector<double>{1, 1}) ==
          doctest::Approx(4.0)); // (2/2 + 1)^2

    CHECK_THROWS_AS(kernel_eval(lin, std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("train: 1-D two-point problem matches the analytic QP solution") {
    const std::vector<std::vector<double>> x{{-1.0}, {1.0}};
    const std::vector<int> y{0, 1};
    KernelSpec spec;
    spec.kind = KernelKind::Linear;
    spec.c = 10.0;
    const auto model = train(x, y, spec, {1.0, 1.0});

    // analytic: alpha = 0.5 each, w = 1, b = 0; boundary at 0
    CHECK(model.support_vectors.size() == 2);
    CHECK(std::abs(decision_function(model, std::vector<double>{0.0})) <= 1e-6);
    CHECK(decision_function(model, std::vector<double>{1.0}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(decision_function(model, std::vector<double>{-1.0}) ==
          doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(model.bias) <= 1e-6);

    double sum_alpha_y = 0.0;
    for (double c : model.dual_coefs) sum_alpha_y += c;
    CHECK(std::abs(sum_alpha_y) <= 1e-6);

    CHECK(predict(model, std::vector<double>{2.0}) == 1);
    CHECK(predict(model, std::vector<double>{-2.0}) == 0);
    CHECK(predict(model, std::vector<double>{0.0}) == 0); // tie -> class 0
}

TEST_CASE("train: XOR with RBF reaches 100% training accuracy") {
    const std::vector<std::vector<double>> x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const std::vector<int> y{0, 0, 1, 1};
    KernelSpec spec;
    spec.kind = KernelKind::Rbf;
    spec.scale = 1.0;
    spec.c = 10.0;
    const auto model = train(x, y, spec, {1.0, 1.0});
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(predict(model, x[i]) == y[i]);
}

TEST_CASE("train: duplicating every sample leaves the decision function unchanged") {
    const std::vector<std::vector<double>> x{{-1.0}, {1.0}};
    const std::vector<int> y{0, 1};
    KernelSpec spec;
    spec.kind = KernelKind::Linear;
    spec.c = 10.0;
    const auto base = train(x, y, spec, {1.0, 1.0});

    const std::vector<std::vector<double>> x2{{-1.0}, {1.0}, {-1.0}, {1.0}};
    const std::vector<int> y2{0, 1, 0, 1};
    const auto doubled = train(x2, y2, spec, {1.0, 1.0});

    for (double probe : {-1.5, -0.5, 0.0, 0.25, 1.5}) {
        CHECK(decision_function(doubled, std::vector<double>{probe}) ==
              doctest::Approx(decision_function(base, std::vector<double>{probe}))
                  .epsilon(1e-6));
    }
}

TEST_CASE("train: linearly separable data has zero training errors at large C") {
    Rng rng(113);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2;
        x.push_back({rng.normal() + (label ? 4.0 : -4.0), rng.normal()});
        y.push_back(label);
    }
    KernelSpec spec;
    spec.kind = KernelKind::Linear;
    spec.c = 1e3;
    const auto model = train(x, y, spec, {1.0, 1.0});
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(predict(model, x[i]) == y[i]);
}

TEST_CASE("train: dual feasibility and KKT spot checks on random problems") {
    Rng rng(127);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 16 + rng.integer(24);
        const std::size_t dim = 2 + rng.integer(3);
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (std::size_t i = 0; i < n; ++i) {
            const int label = static_cast<int>(rng.integer(2));
            std::vector<double> row(dim);
            for (double& v : row) v = rng.normal() + (label ? 1.0 : -1.0);
            x.push_back(std::move(row));
            y.push_back(label);
        }
        if (std::count(y.begin(), y.end(), 0) == 0 || std::count(y.begin(), y.end(), 1) == 0)
            continue;

        KernelSpec spec;
        const int kki = static_cast<int>(rng.integer(3));
        spec.kind = static_cast<KernelKind>(kki);
        spec.c = std::pow(10.0, rng.uniform(-1.0, 2.0));
        spec.scale = std::pow(10.0, rng.uniform(-0.5, 0.7));
        spec.degree = 2 + static_cast<int>(rng.integer(3));
        const auto weights = inverse_frequency_weights(y);
        const auto model = train(x, y, spec, weights);

        double sum_alpha_y = 0.0;
        for (std::size_t i = 0; i < model.dual_coefs.size(); ++i) {
            const double coef = model.dual_coefs[i];
            const double alpha = std::abs(coef);
            const int label = coef > 0.0 ? 1 : 0;
            const double box = spec.c * weights[static_cast<std::size_t>(label)];
            CHECK(alpha <= box + 1e-9);
            sum_alpha_y += coef;

            // non-bound vectors sit on the margin within 1e-2
            if (alpha > 1e-6 * box && alpha < box * (1.0 - 1e-6)) {
                double score = model.bias;
                for (std::size_t j = 0; j < model.support_vectors.size(); ++j)
                    score += model.dual_coefs[j] *
                             kernel_eval(spec, model.support_vectors[j],
                                         model.support_vectors[i]);
                const double ysign = coef > 0.0 ? 1.0 : -1.0;
                CHECK(std::abs(ysign * score - 1.0) <= 1e-2);
            }
        }
        CHECK(std::abs(sum_alpha_y) <= 1e-6);
    }
}

TEST_CASE("train: determinism and error paths") {
    Rng rng(131);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        x.push_back({rng.normal(), rng.normal()});
        y.push_back(i % 2);
    }
    KernelSpec spec;
    const auto a = train(x, y, spec, {1.0, 1.0});
    const auto b = train(x, y, spec, {1.0, 1.0});
    CHECK(a.dual_coefs == b.dual_coefs);
    CHECK(a.bias == b.bias);

    CHECK_THROWS_AS(train({{1.0}, {2.0}}, {1, 1}, spec, {1.0, 1.0}), Error);

    KernelSpec bad;
    bad.c = 0.0;
    CHECK_THROWS_AS(train(x, y, bad, {1.0, 1.0}), Error);
}

TEST_CASE("train: non-convergence is reported, not silent") {
    Rng rng(139);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) {
        x.push_back({rng.normal(), rng.normal()});
        y.push_back(i % 2);
    }
    TrainConfig cfg;
    cfg.tolerance = -1.0; // unreachable gap target forces the budget path
    CHECK_THROWS_AS(train(x, y, KernelSpec{}, {1.0, 1.0}, cfg), Error);
}

TEST_CASE("decision_function: continuity and dimension checks") {
    const std::vector<std::vector<double>> x{{-1.0}, {1.0}};
    const std::vector<int> y{0, 1};
    KernelSpec spec;
    spec.kind = KernelKind::Rbf;
    spec.c = 5.0;
    spec.scale = 1.0;
    const auto model = train(x, y, spec, {1.0, 1.0});
    const double s0 = decision_function(model, std::vector<double>{0.4});
    const double s1 = decision_function(model, std::vector<double>{0.4 + 1e-9});
    CHECK(std::abs(s1 - s0) < 1e-6);
    CHECK_THROWS_AS(decision_function(model, std::vector<double>{1.0, 2.0}), Error);
}

TEST_CASE("inverse_frequency_weights") {
    const auto w = inverse_frequency_weights({0, 0, 0, 1});
    CHECK(w[0] == doctest::Approx(4.0 / 6.0));
    CHECK(w[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(inverse_frequency_weights({0, 0}), Error);
}

TEST_CASE("model persistence round-trips through NUSVM1") {
    Rng rng(137);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 24; ++i) {
        x.push_back({rng.normal(), rng.normal(), rng.normal()});
        y.push_back(i % 2);
    }
    KernelSpec spec;
    spec.kind = KernelKind::Rbf;
    spec.c = 0.25036;
    spec.scale = 2.828;
    auto model = train(x, y, spec, inverse_frequency_weights(y));
    model.selection_mask = {4, 9, 17};
    model.config_hash = 0xDEADBEEFCAFEF00Dull;
    model.seed = 77;

    const auto path = std::filesystem::temp_directory_path() / "nuwean_model_test.nusvm";
    save_model(path.string(), model);
    const auto loaded = load_model(path.string());

    CHECK(loaded.kernel.kind == model.kernel.kind);
    CHECK(loaded.kernel.c == model.kernel.c);
    CHECK(loaded.kernel.scale == model.kernel.scale);
    CHECK(loaded.class_weights == model.class_weights);
    CHECK(loaded.feature_means == model.feature_means);
    CHECK(loaded.feature_stds == model.feature_stds);
    CHECK(loaded.selection_mask == model.selection_mask);
    CHECK(loaded.support_vectors == model.support_vectors);
    CHECK(loaded.dual_coefs == model.dual_coefs);
    CHECK(loaded.bias == model.bias);
    CHECK(loaded.config_hash == model.config_hash);
    CHECK(loaded.seed == model.seed);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_model("/nonexistent/model.nusvm"), Error);
}
