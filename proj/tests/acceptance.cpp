// Acceptance suite: one numbered criterion per invocation (--criterion N),
// each printing a single PASS/FAIL line. Run through ctest as acceptance_1..11.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nuwean/pipeline.hpp"
#include "nuwean/rng.hpp"
#include "oracles.hpp"

using namespace nuwean;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path; // set from --cli for the determinism criterion

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double wall_seconds(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

NonUniformSeries jittered_tone(double f0, double noise_amp, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    NonUniformSeries s;
    s.kind = SignalKind::F_OVER_VT;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += rng.uniform(0.7, 1.3); // +-30% of a 1 s nominal interval
        s.times.push_back(t);
        s.values.push_back(std::sin(2.0 * std::numbers::pi * f0 * t) +
                           noise_amp * rng.normal());
    }
    return s;
}

// ---- criteria -------------------------------------------------------------

// NUDFT equals a reference DFT on uniform grids, relative error <= 1e-9.
Check criterion_1() {
    Check c;
    const double elapsed = wall_seconds([&] {
        for (std::size_t n : {8u, 64u, 256u, 1024u}) {
            Rng rng(n);
            NonUniformSeries s;
            s.kind = SignalKind::RR;
            for (std::size_t i = 0; i < n; ++i) {
                s.times.push_back(static_cast<double>(i));
                s.values.push_back(rng.normal());
            }
            std::vector<double> freqs;
            for (std::size_t k = 1; k <= n / 2; ++k)
                freqs.push_back(static_cast<double>(k) / static_cast<double>(n));
            const auto spec = nudft(s, FrequencyGrid(std::move(freqs)));
            double err2 = 0.0, ref2 = 0.0;
            for (std::size_t k = 0; k < spec.grid.size(); ++k) {
                const auto ref = oracles::dft_reference(s.times, s.values, spec.grid[k]);
                err2 += std::norm(spec.complex_values[k] - ref);
                ref2 += std::norm(ref);
            }
            const double rel = std::sqrt(err2 / ref2);
            c.require(rel <= 1e-9, "N=" + std::to_string(n) + " rel err " + std::to_string(rel));
        }
    });
    c.require(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
    return c;
}

// PSD argmax within one grid bin of the tone for 20 random (f0, seed) pairs.
// 256 samples against a 128-bin grid keeps the bin width at the Rayleigh
// resolution, so a tone straddling two bins still clears the leakage floor.
Check criterion_2() {
    Check c;
    Rng meta(0xF0);
    for (int trial = 0; trial < 20; ++trial) {
        const double f0 = meta.uniform(0.1, 0.4);
        const std::uint64_t seed = meta.raw();
        const auto s = jittered_tone(f0, 0.0, 256, seed);
        const auto grid = make_grid(s, 128);
        const auto spec = nudft(s, grid);
        std::size_t best = 0;
        for (std::size_t k = 1; k < spec.psd.size(); ++k)
            if (spec.psd[k] > spec.psd[best]) best = k;
        c.require(std::abs(grid[best] - f0) <= grid.spacing() + 1e-12,
                  "trial " + std::to_string(trial) + ": argmax " +
                      std::to_string(grid[best]) + " vs f0 " + std::to_string(f0));
    }
    return c;
}

// Interpolation baselines show the artifact signature; the direct transform
// does not. The signal is a baseline offset plus a tone, sampled by a
// strongly jittered renewal process and resampled at the mean sampling rate:
// the uniform-grid transform aliases the baseline into a spurious line at fs
// regardless of jitter, while the direct transform's sampling comb decoheres.
Check criterion_3() {
    Check c;
    int linear_hits = 0, cubic_hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        NonUniformSeries s;
        s.kind = SignalKind::F_OVER_VT;
        double t = 0.0;
        for (int i = 0; i < 512; ++i) {
            t += rng.uniform(0.5, 1.5);
            s.times.push_back(t);
            s.values.push_back(2.5 + std::sin(2.0 * std::numbers::pi * 0.09 * t) +
                               0.5 * rng.normal());
        }
        const double fs =
            static_cast<double>(s.size() - 1) / (s.times.back() - s.times.front());
        std::vector<double> freqs(250);
        for (std::size_t k = 0; k < freqs.size(); ++k)
            freqs[k] = 1.25 * fs * static_cast<double>(k + 1) / 250.0;
        const auto cmp = compare_interpolation(s, fs, FrequencyGrid(std::move(freqs)));
        c.require(cmp.linear.defined && cmp.cubic.defined, "diagnostics undefined");

        if (cmp.linear.artifact_ratio > 3.0 && cmp.linear.attenuation_ratio < 1.0)
            ++linear_hits;
        if (cmp.cubic.artifact_ratio > 3.0 && cmp.cubic.attenuation_ratio < 1.0)
            ++cubic_hits;

        // the direct transform shows no sampling-frequency peak: its mean PSD
        // in the fs band stays below 3x its own mid-band background
        double band = 0.0, back = 0.0;
        std::size_t band_n = 0, back_n = 0;
        for (std::size_t k = 0; k < cmp.frequencies.size(); ++k) {
            const double f = cmp.frequencies[k];
            if (std::abs(f - fs) <= 0.05 * fs) {
                band += cmp.psd_nudft[k];
                ++band_n;
            } else if (f > 0.3 * fs && f < 0.9 * fs) {
                back += cmp.psd_nudft[k];
                ++back_n;
            }
        }
        const double nudft_peak = (band / static_cast<double>(band_n)) /
                                  (back / static_cast<double>(back_n));
        c.require(nudft_peak < 3.0,
                  "direct transform shows an fs peak: " + std::to_string(nudft_peak));
    }
    c.require(linear_hits >= 8, "linear artifact signature in " + std::to_string(linear_hits) +
                                    "/10 cases");
    c.require(cubic_hits >= 8,
              "cubic artifact signature in " + std::to_string(cubic_hits) + "/10 cases");
    return c;
}

// Exact Mann-Whitney p equals full enumeration for every n1, n2 <= 6.
Check criterion_4() {
    Check c;
    const double elapsed = wall_seconds([&] {
        Rng rng(0x4A);
        for (std::size_t n1 = 1; n1 <= 6; ++n1) {
            for (std::size_t n2 = 1; n2 <= 6; ++n2) {
                for (int rep = 0; rep < 3; ++rep) {
                    std::vector<double> a(n1), b(n2);
                    for (double& x : a) x = rng.uniform();
                    for (double& x : b) x = rng.uniform();
                    const auto got = mann_whitney(a, b);
                    const double ref = oracles::mann_whitney_exact_enumeration(a, b);
                    c.require(got.method == RankTestMethod::Exact, "not the exact path");
                    c.require(got.p_two_sided == ref,
                              "p mismatch at n1=" + std::to_string(n1) +
                                  " n2=" + std::to_string(n2));
                }
            }
        }
    });
    c.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
    return c;
}

// Trapezoidal AUC equals the tie-adjusted pairwise statistic on 1000 sets.
Check criterion_5() {
    Check c;
    Rng rng(0xA0C);
    int done = 0;
    while (done < 1000) {
        const std::size_t n = 4 + rng.integer(60);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.bernoulli(0.4) ? std::round(rng.uniform(0.0, 5.0)) : rng.uniform();
            labels[i] = static_cast<int>(rng.integer(2));
            (labels[i] ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;
        ++done;
        const auto counts = auc_roc_counts(scores, labels);
        c.require(counts.numerator == oracles::auc_pairwise_numerator(scores, labels),
                  "pairwise mismatch on set " + std::to_string(done));
        c.require(auc_roc(scores, labels) == counts.value(), "double form mismatch");
    }
    return c;
}

// SVM: KKT suite on 50 random datasets, XOR, and the 2-point analytic QP.
Check criterion_6() {
    Check c;
    Rng rng(0x57);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 14 + rng.integer(26);
        const std::size_t dim = 2 + rng.integer(4);
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            const int label = static_cast<int>(rng.integer(2));
            (label ? has1 : has0) = true;
            std::vector<double> row(dim);
            for (double& v : row) v = rng.normal() + (label ? 0.8 : -0.8);
            x.push_back(std::move(row));
            y.push_back(label);
        }
        if (!has0 || !has1) {
            x[0] = std::vector<double>(dim, 0.0);
            y[0] = has0 ? 1 : 0;
        }
        KernelSpec spec;
        spec.kind = static_cast<KernelKind>(rng.integer(3));
        spec.c = std::pow(10.0, rng.uniform(-1.0, 2.0));
        spec.scale = std::pow(10.0, rng.uniform(-0.5, 0.7));
        spec.degree = 2 + static_cast<int>(rng.integer(3));
        const auto weights = inverse_frequency_weights(y);
        const auto model = train(x, y, spec, weights);

        double sum_ay = 0.0;
        for (std::size_t i = 0; i < model.dual_coefs.size(); ++i) {
            const double coef = model.dual_coefs[i];
            const double alpha = std::abs(coef);
            const double box = spec.c * weights[coef > 0.0 ? 1 : 0];
            c.require(alpha <= box + 1e-9, "alpha outside its box");
            sum_ay += coef;
            if (alpha > 1e-6 * box && alpha < box * (1.0 - 1e-6)) {
                double score = model.bias;
                for (std::size_t j = 0; j < model.support_vectors.size(); ++j)
                    score += model.dual_coefs[j] * kernel_eval(spec, model.support_vectors[j],
                                                               model.support_vectors[i]);
                const double ysign = coef > 0.0 ? 1.0 : -1.0;
                c.require(std::abs(ysign * score - 1.0) <= 1e-2,
                          "KKT margin residual " + std::to_string(ysign * score - 1.0));
            }
        }
        c.require(std::abs(sum_ay) <= 1e-6, "sum alpha_i y_i = " + std::to_string(sum_ay));
    }

    // XOR with RBF
    {
        KernelSpec spec;
        spec.kind = KernelKind::Rbf;
        spec.scale = 1.0;
        spec.c = 10.0;
        const std::vector<std::vector<double>> x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
        const std::vector<int> y{0, 0, 1, 1};
        const auto model = train(x, y, spec, {1.0, 1.0});
        for (std::size_t i = 0; i < x.size(); ++i)
            c.require(predict(model, x[i]) == y[i], "XOR training accuracy below 100%");
    }

    // 2-point analytic QP within 1e-6
    {
        KernelSpec spec;
        spec.kind = KernelKind::Linear;
        spec.c = 10.0;
        const auto model = train({{-1.0}, {1.0}}, {0, 1}, spec, {1.0, 1.0});
        c.require(std::abs(decision_function(model, std::vector<double>{0.0})) <= 1e-6,
                  "2-point boundary off zero");
        c.require(std::abs(decision_function(model, std::vector<double>{1.0}) - 1.0) <= 1e-6,
                  "2-point margin score");
        c.require(std::abs(model.bias) <= 1e-6, "2-point bias");
    }
    return c;
}

// BO finds the 1-D analytic optimum; best-so-far monotone in every run.
Check criterion_7() {
    Check c;
    const auto objective = [](const std::vector<double>& p) {
        return -(p[0] - 0.3) * (p[0] - 0.3);
    };
    BoxBounds box;
    box.lo = {0.0};
    box.hi = {1.0};
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        BoConfig cfg;
        cfg.iterations = 30;
        cfg.init_random = 10;
        cfg.seed = seed;
        const auto res = maximize(objective, box, cfg);
        if (std::abs(res.best_point[0] - 0.3) <= 0.05) ++hits;

        double best = -1e300;
        for (const auto& ev : res.history) {
            if (!ev.ok) continue;
            if (ev.value > best) best = ev.value;
            c.require(ev.value <= res.best_value, "best-so-far not an upper bound");
        }
        c.require(res.best_value == best, "best-so-far mismatch");
    }
    c.require(hits >= 18, "optimum located in only " + std::to_string(hits) + "/20 seeds");
    return c;
}

// Structural fidelity: the published constants are the defaults.
Check criterion_8() {
    Check c;
    const RunConfig cfg;
    c.require(feature_names().size() == 448, "feature vector size");
    c.require(cfg.spectrogram.window_s == 100.0, "window seconds");
    c.require(cfg.spectrogram.overlap_fraction == 0.75, "overlap fraction");
    c.require(cfg.selection_threshold == 0.05, "selection threshold");
    c.require(cfg.selection_k == 18, "selection k");
    c.require(cfg.bo_iterations == 100, "BO iterations");
    c.require(cfg.bo_init_random == 10, "BO initial random samples");
    c.require(cfg.cv_repetitions == 150, "CV repetitions");
    c.require(cfg.cv_folds == 4, "CV folds");
    c.require(cfg.synth_success == 94 && cfg.synth_failure == 60, "cohort class counts");

    // the canonical config echo carries the same constants
    const std::string echo = cfg.canonical();
    for (const char* needle :
         {"spectrogram.window_s=100", "spectrogram.overlap_fraction=0.75",
          "selection.threshold=0.05", "selection.k=18", "bo.iterations=100",
          "bo.init_random=10", "cv.repetitions=150", "cv.folds=4"}) {
        c.require(echo.find(needle) != std::string::npos,
                  std::string("config echo missing ") + needle);
    }

    // a patient vector really has 448 named entries
    const auto cohort = synth_cohort(1, 1, 8, 0.0);
    const auto fv = patient_features(cohort[0], cfg);
    c.require(fv.values.size() == 448, "assembled vector size");
    return c;
}

// End-to-end discrimination at the CI profile (15 repetitions).
Check criterion_9() {
    Check c;
    RunConfig cfg;
    cfg.cv_repetitions = 15; // CI profile, same thresholds
    cfg.seed = 20240604;

    const fs::path out = fs::temp_directory_path() / "nuwean_acceptance_9";
    fs::remove_all(out);

    RunArtifacts art;
    const double elapsed = wall_seconds([&] {
        const auto cohort = synth_cohort(94, 60, cfg.seed, 0.0);
        art = run_pipeline(cohort, cfg, out.string());
    });
    c.require(art.report.auc.mean >= 0.9,
              "difficulty-0 AUC " + std::to_string(art.report.auc.mean));
    c.require(elapsed < 600.0, "runtime " + std::to_string(elapsed) + " s");

    // label-permuted variant: repeated CV with the winning spec near chance
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        FeatureMatrix permuted = art.matrix;
        Rng perm(seed);
        shuffle(permuted.labels, perm);
        RepeatedCvConfig cv;
        cv.repetitions = 3;
        cv.folds = 4;
        cv.seed = seed;
        acc += repeated_cv(permuted, art.search.best_spec, cv).auc.mean;
    }
    const double mean_auc = acc / 10.0;
    c.require(std::abs(mean_auc - 0.5) <= 0.1,
              "label-permuted AUC " + std::to_string(mean_auc));
    fs::remove_all(out);
    return c;
}

// Leakage sentinel: a validation-fold-only label feature gives no lift.
Check criterion_10() {
    Check c;
    const std::size_t n = 120, dim = 40;
    Rng rng(0x1EAC);
    FeatureMatrix m;
    for (std::size_t j = 0; j < dim; ++j) m.names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(dim);
        for (double& v : row) v = rng.normal();
        m.patient_ids.push_back("p" + std::to_string(i));
        m.labels.push_back(static_cast<int>(i % 2));
        m.rows.push_back(std::move(row));
    }
    RepeatedCvConfig cv;
    cv.repetitions = 1;
    cv.folds = 4;
    cv.seed = 31;

    KernelSpec spec; // rbf defaults
    const auto base = repeated_cv(m, spec, cv);

    const auto folds = stratified_kfold(m.labels, cv.folds, repeated_cv_seed(cv.seed, 0));
    FeatureMatrix leaky = m;
    leaky.names.push_back("sentinel");
    std::vector<char> in_fold0(n, 0);
    for (std::size_t i : folds[0]) in_fold0[i] = 1;
    for (std::size_t i = 0; i < n; ++i)
        leaky.rows[i].push_back(in_fold0[i] ? static_cast<double>(leaky.labels[i])
                                            : rng.uniform(-1.0, 1.0));

    const auto report = repeated_cv(leaky, spec, cv);
    for (const auto& ev : report.evaluations) {
        if (ev.fold != 0) continue;
        for (std::size_t j : ev.selected_features)
            c.require(j != dim, "sentinel selected for its own validation fold");
    }
    c.require(report.auc.mean <= base.auc.mean + 0.1,
              "sentinel lifted AUC from " + std::to_string(base.auc.mean) + " to " +
                  std::to_string(report.auc.mean));
    c.require(report.auc.mean <= 0.65, "sentinel AUC " + std::to_string(report.auc.mean));
    return c;
}

// Two CLI runs with identical inputs/seed produce byte-identical reports.
Check criterion_11() {
    Check c;
    if (g_cli_path.empty()) {
        c.require(false, "pass --cli <path to the nuwean binary>");
        return c;
    }
    const fs::path base = fs::temp_directory_path() / "nuwean_acceptance_11";
    fs::remove_all(base);
    fs::create_directories(base);
    const auto cfg_path = base / "cfg.txt";
    write_text_file(cfg_path.string(),
                    "cv.repetitions = 2\nbo.iterations = 8\nbo.init_random = 4\n"
                    "synth.success = 8\nsynth.failure = 6\nseed = 77\n");

    for (const char* run : {"run_a", "run_b"}) {
        const std::string cmd = "\"" + g_cli_path + "\" run --config \"" + cfg_path.string() +
                                "\" --out \"" + (base / run).string() + "\" > \"" +
                                (base / run).string() + ".log\" 2>&1";
        const int rc = std::system(cmd.c_str());
        c.require(rc == 0, std::string("CLI run failed: ") + run);
    }
    if (!c.ok) return c;

    const std::vector<std::string> files = {"features.csv",    "selection.csv",
                                            "bo_trace.csv",    "eval_report.csv",
                                            "eval_report.json", "config_echo.txt",
                                            "model.nusvm"};
    for (const std::string& name : files) {
        const auto a = read_text_file((base / "run_a" / name).string());
        const auto b = read_text_file((base / "run_b" / name).string());
        c.require(a == b, name + " differs between identical runs");
        c.require(!a.empty(), name + " is empty");
    }
    fs::remove_all(base);
    return c;
}

} // namespace

int main(int argc, char** argv) {
    int criterion = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            criterion = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc)
            g_cli_path = argv[++i];
    }

    using CriterionFn = Check (*)();
    const std::vector<std::pair<const char*, CriterionFn>> criteria = {
        {"NUDFT-DFT equivalence", criterion_1},
        {"frequency recovery under jitter", criterion_2},
        {"interpolation artifact reproduction", criterion_3},
        {"Mann-Whitney exactness", criterion_4},
        {"AUC trapezoid == pairwise oracle", criterion_5},
        {"SVM correctness (KKT, XOR, analytic QP)", criterion_6},
        {"BO sanity on the analytic objective", criterion_7},
        {"structural fidelity of the published constants", criterion_8},
        {"end-to-end discrimination", criterion_9},
        {"leakage sentinel", criterion_10},
        {"CLI determinism", criterion_11},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (criterion != 0 && criterion != static_cast<int>(i + 1)) continue;
        Check result;
        try {
            result = criteria[i].second();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %zu: %s%s%s\n", result.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, result.ok ? "" : " — ",
                    result.ok ? "" : result.detail.c_str());
        std::fflush(stdout);
        if (!result.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
