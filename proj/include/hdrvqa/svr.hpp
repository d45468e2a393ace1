#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hdrvqa {

struct Standardization {
    std::vector<double> means;
    std::vector<double> stds;            // zero-variance columns get 1
    std::vector<uint8_t> zero_variance;  // flags per column
};

/// Per-feature mean and population std of the training rows.
/// Throws on an empty training set or fewer than 2 rows.
Standardization standardize_fit(std::span<const std::vector<double>> rows);

struct SvrModel {
    std::vector<double> weights; // on standardized features
    double bias = 0.0;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    std::vector<uint8_t> zero_variance;
    double hyper_c = 1.0;
    double epsilon = 0.1;
    uint64_t seed = 0;
    std::string layout_version;
};

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;   // on z-scored targets
    uint64_t seed = 1;
    double gap_tol = 1e-4;  // duality gap tolerance
    int max_epochs = 10000;
};

/// Linear epsilon-insensitive SVR trained by dual coordinate descent
/// (random permutation per epoch, seeded; stops on duality gap or the epoch
/// cap). Targets are z-scored internally and un-scaled into the stored
/// weights/bias. Throws on non-finite inputs or fewer than 2 rows.
SvrModel train_svr(std::span<const std::vector<double>> rows, std::span<const double> scores,
                   const SvrParams &params, const std::string &layout_version);

/// dot(weights, standardized features) + bias. Throws DataError on a
/// feature-count or layout_version mismatch.
double predict(const SvrModel &model, std::span<const double> features,
               const std::string &layout_version);

inline constexpr double kDefaultCGrid[] = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};

/// 5-fold content-grouped cross-validation over the C grid; best C maximizes
/// mean fold SROCC, ties toward smaller C. Throws DataError with fewer
/// contents than folds.
double cross_validate_c(std::span<const std::vector<double>> rows,
                        std::span<const double> scores,
                        std::span<const std::string> content_ids,
                        std::span<const double> grid, const SvrParams &params,
                        std::string *note = nullptr);

/// Versioned little-endian binary (plus a JSON sidecar of hyperparameters
/// at path + ".json").
void save_model(const SvrModel &model, const std::string &path);
SvrModel load_model(const std::string &path);

} // namespace hdrvqa
