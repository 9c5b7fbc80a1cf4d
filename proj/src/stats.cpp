#include "nuwean/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nuwean {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// midranks of the pooled sample; also reports sum(t^3 - t) over tie groups
// and whether any tie exists
struct PooledRanks {
    std::vector<double> ranks;
    double tie_cubes = 0.0;
    bool has_ties = false;
};

PooledRanks pooled_midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

    PooledRanks out;
    out.ranks.assign(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double t = static_cast<double>(j - i + 1);
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = midrank;
        if (t > 1.0) {
            out.has_ties = true;
            out.tie_cubes += t * t * t - t;
        }
        i = j + 1;
    }
    return out;
}

// Number of size-n1 subsets of ranks {1..n} with rank sum r, for every r.
// Mathematically the same distribution as enumerating all labelings.
std::vector<std::uint64_t> rank_sum_counts(std::size_t n, std::size_t n1) {
    const std::size_t max_sum = n1 * (2 * n - n1 + 1) / 2;
    std::vector<std::vector<std::uint64_t>> dp(n1 + 1,
                                               std::vector<std::uint64_t>(max_sum + 1, 0));
    dp[0][0] = 1;
    for (std::size_t rank = 1; rank <= n; ++rank) {
        for (std::size_t k = std::min(rank, n1); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= rank; --s) {
                dp[k][s] += dp[k - 1][s - rank];
            }
        }
    }
    return dp[n1];
}

} // namespace

RankTestResult mann_whitney(const std::vector<double>& sample_a,
                            const std::vector<double>& sample_b) {
    if (sample_a.empty() || sample_b.empty())
        throw Error("stats", "mann_whitney: both samples must be non-empty");

    const std::size_t n1 = sample_a.size();
    const std::size_t n2 = sample_b.size();
    const std::size_t n = n1 + n2;

    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), sample_a.begin(), sample_a.end());
    pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
    const PooledRanks pr = pooled_midranks(pooled);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < n1; ++i) rank_sum_a += pr.ranks[i];

    const double nn = static_cast<double>(n1) * static_cast<double>(n2);
    const double u_a = rank_sum_a - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
    const double u_b = nn - u_a;
    const double u = std::min(u_a, u_b);

    RankTestResult res;
    res.u_statistic = u;

    if (!pr.has_ties && n <= 20) {
        res.method = RankTestMethod::Exact;
        const auto counts = rank_sum_counts(n, n1);
        const double m1 = static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
        std::uint64_t favorable = 0, total = 0;
        for (std::size_t r = 0; r < counts.size(); ++r) {
            if (counts[r] == 0) continue;
            total += counts[r];
            const double ua = static_cast<double>(r) - m1;
            if (std::min(ua, nn - ua) <= u + 1e-9) favorable += counts[r];
        }
        res.p_two_sided = static_cast<double>(favorable) / static_cast<double>(total);
        res.z_value = 0.0;
    } else {
        res.method = RankTestMethod::NormalApprox;
        const double mu = nn / 2.0;
        const double dn = static_cast<double>(n);
        double var = nn / 12.0 * (dn + 1.0);
        if (pr.has_ties && n > 1)
            var = nn / 12.0 * ((dn + 1.0) - pr.tie_cubes / (dn * (dn - 1.0)));
        if (var <= 0.0) {
            res.z_value = 0.0;
            res.p_two_sided = 1.0;
            return res;
        }
        const double diff = std::max(std::abs(u - mu) - 0.5, 0.0); // continuity correction
        res.z_value = diff / std::sqrt(var);
        res.p_two_sided = std::min(1.0, 2.0 * (1.0 - normal_cdf(res.z_value)));
    }
    if (res.p_two_sided > 1.0) res.p_two_sided = 1.0;
    return res;
}

void FeatureMatrix::validate() const {
    if (rows.size() != labels.size() || rows.size() != patient_ids.size())
        throw Error("stats", "feature matrix row/label/id count mismatch");
    for (const auto& row : rows) {
        if (row.size() != names.size())
            throw Error("stats", "feature matrix row width mismatch");
    }
    for (int label : labels) {
        if (label != 0 && label != 1)
            throw Error("stats", "labels must be 0 or 1");
    }
}

std::vector<double> feature_p_values(const FeatureMatrix& matrix) {
    matrix.validate();
    const std::size_t n0 = static_cast<std::size_t>(
        std::count(matrix.labels.begin(), matrix.labels.end(), 0));
    const std::size_t n1 = matrix.n_rows() - n0;
    if (n0 == 0 || n1 == 0)
        throw Error("stats", "feature selection requires both classes");

    std::vector<double> p(matrix.n_cols());
    std::vector<double> a, b;
    a.reserve(n0);
    b.reserve(n1);
    for (std::size_t j = 0; j < matrix.n_cols(); ++j) {
        a.clear();
        b.clear();
        for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
            (matrix.labels[i] == 0 ? a : b).push_back(matrix.rows[i][j]);
        }
        p[j] = mann_whitney(a, b).p_two_sided;
    }
    return p;
}

SelectionResult select_features(const FeatureMatrix& matrix, double threshold, std::size_t k) {
    if (k == 0)
        throw Error("stats", "select_features: k must be >= 1");
    const std::vector<double> p = feature_p_values(matrix);

    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] < threshold) candidates.push_back(j);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    if (candidates.size() > k) candidates.resize(k);

    SelectionResult res;
    res.threshold = threshold;
    res.k = k;
    for (std::size_t j : candidates) {
        res.kept_indices.push_back(j);
        res.kept_names.push_back(j < matrix.names.size() ? matrix.names[j] : "");
        res.p_values.push_back(p[j]);
    }
    return res;
}

std::vector<std::size_t> selection_mask_with_fallback(const FeatureMatrix& matrix,
                                                      double threshold, std::size_t k) {
    const SelectionResult sel = select_features(matrix, threshold, k);
    if (!sel.kept_indices.empty()) return sel.kept_indices;
    const auto p = feature_p_values(matrix);
    return {static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin())};
}

} // namespace nuwean
