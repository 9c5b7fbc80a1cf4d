#include "nuwean/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nuwean/rng.hpp"
#include "nuwean/series.hpp"

namespace nuwean {

PointMetrics confusion_metrics(const ConfusionCounts& c) {
    PointMetrics m;
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    if (c.total() > 0) m.accuracy = (tp + tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) m.precision = tp / (tp + fp);
    if (c.tp + c.fn > 0) m.recall = tp / (tp + fn);
    if (c.tn + c.fp > 0) m.specificity = tn / (tn + fp);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    return m;
}

AucCounts auc_roc_counts(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw Error("eval", "auc_roc: score/label count mismatch");
    std::uint64_t n0 = 0, n1 = 0;
    for (int y : labels) {
        if (y == 0) ++n0;
        else if (y == 1) ++n1;
        else throw Error("eval", "auc_roc: labels must be 0 or 1");
    }
    if (n0 == 0 || n1 == 0)
        throw Error("eval", "auc_roc requires both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    // trapezoidal sweep over the empirical ROC, grouped by tied score;
    // integer accumulation keeps it exactly equal to the pairwise statistic
    AucCounts out;
    out.denominator = 2 * n0 * n1;
    std::uint64_t tp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t dtp = 0, dfp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? dtp : dfp) += 1;
            ++j;
        }
        out.numerator += dfp * (2 * tp + dtp);
        tp += dtp;
        i = j;
    }
    return out;
}

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    return auc_roc_counts(scores, labels).value();
}

namespace {

std::array<std::vector<std::size_t>, 2> indices_by_class(const std::vector<int>& labels,
                                                         const char* op) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw Error("eval", std::string(op) + ": labels must be 0 or 1");
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty())
        throw Error("eval", std::string(op) + ": both classes must be present");
    return by_class;
}

} // namespace

SplitIndices stratified_split(const std::vector<int>& labels, double fraction,
                              std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw Error("eval", "split fraction must be in [0, 1]");
    auto by_class = indices_by_class(labels, "stratified_split");

    SplitIndices out;
    Rng rng(seed);
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        shuffle(idx, rng);
        const auto n_train = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? out.train : out.test).push_back(idx[i]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels,
                                                       std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw Error("eval", "stratified_kfold: k must be >= 2");
    auto by_class = indices_by_class(labels, "stratified_kfold");
    for (std::size_t c = 0; c < 2; ++c) {
        if (by_class[c].size() < k)
            throw Error("eval", "stratified_kfold: class " + std::to_string(c) +
                                    " has fewer than k members");
    }

    std::vector<std::vector<std::size_t>> folds(k);
    Rng rng(seed);
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        shuffle(idx, rng);
        for (std::size_t i = 0; i < idx.size(); ++i) folds[i % k].push_back(idx[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

std::uint64_t repeated_cv_seed(std::uint64_t master_seed, std::size_t repetition) {
    return derive_seed(master_seed, 0xCF01, repetition);
}

MetricSummary summarize(const std::vector<double>& values, std::size_t undefined) {
    MetricSummary s;
    s.defined = values.size();
    s.undefined = undefined;
    if (values.empty()) return s;
    s.mean = mean_of(values);
    s.stddev = population_std(values);
    return s;
}

EvalReport repeated_cv(const FeatureMatrix& matrix, const KernelSpec& spec,
                       const RepeatedCvConfig& cfg) {
    matrix.validate();
    spec.validate();
    if (cfg.repetitions == 0)
        throw Error("eval", "repeated_cv: repetitions must be >= 1");

    EvalReport report;
    report.folds = cfg.folds;
    report.repetitions = cfg.repetitions;

    std::vector<double> acc, prec, rec, f1, specif, aucs;
    std::size_t undef_acc = 0, undef_prec = 0, undef_rec = 0, undef_f1 = 0, undef_spec = 0;

    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const auto folds =
            stratified_kfold(matrix.labels, cfg.folds, repeated_cv_seed(cfg.seed, rep));
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<char> in_val(matrix.n_rows(), 0);
            for (std::size_t i : folds[f]) in_val[i] = 1;

            FeatureMatrix train_m;
            train_m.names = matrix.names;
            std::vector<std::size_t> val_rows;
            for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
                if (in_val[i]) {
                    val_rows.push_back(i);
                } else {
                    train_m.rows.push_back(matrix.rows[i]);
                    train_m.labels.push_back(matrix.labels[i]);
                    train_m.patient_ids.push_back(matrix.patient_ids[i]);
                }
            }

            // selection refit on the training folds only
            const std::vector<std::size_t> mask =
                selection_mask_with_fallback(train_m, cfg.selection_threshold, cfg.selection_k);

            std::vector<std::vector<double>> train_x(train_m.n_rows());
            for (std::size_t i = 0; i < train_m.n_rows(); ++i) {
                train_x[i].reserve(mask.size());
                for (std::size_t j : mask) train_x[i].push_back(train_m.rows[i][j]);
            }
            TrainedModel model =
                train(train_x, train_m.labels, spec, inverse_frequency_weights(train_m.labels));
            model.selection_mask = mask;

            CvEvaluation ev;
            ev.repetition = rep;
            ev.fold = f;
            ev.selected_features = mask;
            std::vector<double> scores;
            std::vector<int> val_labels;
            for (std::size_t i : val_rows) {
                const double score = decision_function(model, matrix.rows[i]);
                const int truth = matrix.labels[i];
                const int pred = score > 0.0 ? 1 : 0;
                scores.push_back(score);
                val_labels.push_back(truth);
                if (truth == 1 && pred == 1) ++ev.counts.tp;
                else if (truth == 0 && pred == 1) ++ev.counts.fp;
                else if (truth == 0 && pred == 0) ++ev.counts.tn;
                else ++ev.counts.fn;
            }
            ev.metrics = confusion_metrics(ev.counts);
            ev.auc = auc_roc(scores, val_labels);

            auto push = [](std::vector<double>& dst, const std::optional<double>& v,
                           std::size_t& undef) {
                if (v) dst.push_back(*v);
                else ++undef;
            };
            push(acc, ev.metrics.accuracy, undef_acc);
            push(prec, ev.metrics.precision, undef_prec);
            push(rec, ev.metrics.recall, undef_rec);
            push(f1, ev.metrics.f1, undef_f1);
            push(specif, ev.metrics.specificity, undef_spec);
            aucs.push_back(ev.auc);

            report.evaluations.push_back(std::move(ev));
        }
    }

    report.accuracy = summarize(acc, undef_acc);
    report.precision = summarize(prec, undef_prec);
    report.recall = summarize(rec, undef_rec);
    report.f1 = summarize(f1, undef_f1);
    report.specificity = summarize(specif, undef_spec);
    report.auc = summarize(aucs, 0);
    return report;
}

} // namespace nuwean
