#pragma once

#include "hdrvqa/features.hpp"
#include "hdrvqa/svr.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace hdrvqa {

/// Spearman rank correlation (mid-rank ties). Throws std::invalid_argument
/// on fewer than 3 points or a constant vector.
double srocc(std::span<const double> pred, std::span<const double> mos);

/// Pearson correlation. Same degenerate-input contract as srocc.
double pearson(std::span<const double> a, std::span<const double> b);

struct LogisticFit {
    std::array<double, 4> beta{}; // l(s) = b2 + (b1-b2) / (1 + exp(-(s-b3)/|b4|))
    bool linear_fallback = false; // non-convergence or degenerate predictions
    std::vector<double> mapped;
};

/// Fit the monotonic 4-parameter logistic by simplex search on squared
/// error; falls back to a linear least-squares map when the search cannot
/// converge.
LogisticFit logistic_fit(std::span<const double> pred, std::span<const double> mos);

/// Pearson correlation and root-mean-square error of mapped predictions.
std::pair<double, double> lcc_rmse(std::span<const double> mapped, std::span<const double> mos);

struct SplitSpec {
    uint64_t seed = 0;
    std::vector<std::string> train_contents;
    std::vector<std::string> test_contents;
};

struct SplitMetrics {
    int split_index = 0;
    SplitSpec spec;
    double best_c = 1.0;
    double srocc = 0.0;
    double lcc = 0.0;
    double rmse = 0.0;
    std::array<double, 4> logistic_beta{};
    bool logistic_fallback = false;
};

struct EvalReport {
    uint64_t seed = 0;
    std::vector<SplitMetrics> per_split;
    double median_srocc = 0.0, median_lcc = 0.0, median_rmse = 0.0;
    double std_srocc = 0.0, std_lcc = 0.0, std_rmse = 0.0;
};

struct ProtocolOptions {
    int n_splits = 100;
    uint64_t seed = 7;
    double test_fraction = 0.2; // of contents, round-to-nearest, min 1
    SvrParams svr;
    std::vector<double> c_grid{std::begin(kDefaultCGrid), std::end(kDefaultCGrid)};
    bool tune_c = true; // 5-fold CV per split; otherwise svr.c as-is
    int jobs = 1;
};

/// Draw a seeded content-separated 80:20 split.
SplitSpec make_split(std::span<const std::string> contents, uint64_t seed,
                     double test_fraction);

/// The full train/test protocol: for each seeded split, pick C by
/// content-grouped cross-validation on the training side only, train, predict
/// the held-out contents, and report SROCC plus logistic-mapped LCC/RMSE;
/// medians and standard deviations aggregate over splits.
EvalReport run_protocol(std::span<const FeatureVector> features,
                        std::span<const ScoreRecord> scores, const ProtocolOptions &opt);

/// One-sided Welch's t-test: 1 if a significantly exceeds b at `alpha`,
/// -1 for the reverse, 0 otherwise. welch_ttest(a,b) == -welch_ttest(b,a).
int welch_ttest(std::span<const double> a, std::span<const double> b, double alpha = 0.05,
                bool one_sided = true);

void write_report_json(const std::string &path, const EvalReport &report);
EvalReport read_report_json(const std::string &path);

} // namespace hdrvqa
