#include "hdrvqa/svr.hpp"
#include "hdrvqa/errors.hpp"
#include "hdrvqa/eval.hpp"
#include "hdrvqa/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>

namespace hdrvqa {

Standardization standardize_fit(std::span<const std::vector<double>> rows) {
    if (rows.size() < 2)
        throw std::invalid_argument("standardize_fit: need at least 2 rows");
    const size_t n = rows[0].size();
    Standardization st;
    st.means.assign(n, 0.0);
    st.stds.assign(n, 0.0);
    st.zero_variance.assign(n, 0);
    for (const auto &r : rows) {
        if (r.size() != n)
            throw std::invalid_argument("standardize_fit: ragged rows");
        for (size_t j = 0; j < n; ++j)
            st.means[j] += r[j];
    }
    for (size_t j = 0; j < n; ++j)
        st.means[j] /= static_cast<double>(rows.size());
    for (const auto &r : rows)
        for (size_t j = 0; j < n; ++j) {
            double d = r[j] - st.means[j];
            st.stds[j] += d * d;
        }
    for (size_t j = 0; j < n; ++j) {
        st.stds[j] = std::sqrt(st.stds[j] / static_cast<double>(rows.size()));
        if (st.stds[j] <= 0.0) {
            st.stds[j] = 1.0;
            st.zero_variance[j] = 1;
        }
    }
    return st;
}

namespace {

// Dual coordinate descent for the L1-loss epsilon-SVR dual:
//   min_b  0.5 b^T Q b + eps sum|b_i| - sum y_i b_i,  -C <= b_i <= C,
// with w = sum b_i x_i (liblinear's SVR solver without shrinking).
// Rows carry an appended bias feature. Stops when the primal-dual gap
// drops below tol * max(1, primal).
std::vector<double> solve_svr_dual(const std::vector<std::vector<double>> &x,
                                   const std::vector<double> &y, double c, double eps,
                                   uint64_t seed, double gap_tol, int max_epochs) {
    const size_t l = x.size();
    const size_t n = x[0].size();
    std::vector<double> w(n, 0.0), beta(l, 0.0), qd(l);
    for (size_t i = 0; i < l; ++i) {
        double s = 0.0;
        for (double v : x[i])
            s += v * v;
        qd[i] = s;
    }

    std::vector<size_t> order(l);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);

    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        fisher_yates_shuffle(order, rng);
        for (size_t s = 0; s < l; ++s) {
            size_t i = order[s];
            const double *xi = x[i].data();
            double g = -y[i];
            for (size_t j = 0; j < n; ++j)
                g += w[j] * xi[j];
            double gp = g + eps, gn = g - eps;
            double d;
            if (qd[i] <= 0.0)
                continue;
            if (gp < qd[i] * beta[i])
                d = -gp / qd[i];
            else if (gn > qd[i] * beta[i])
                d = -gn / qd[i];
            else
                d = -beta[i];
            if (std::fabs(d) < 1e-14)
                continue;
            double old = beta[i];
            beta[i] = std::clamp(old + d, -c, c);
            d = beta[i] - old;
            if (d != 0.0)
                for (size_t j = 0; j < n; ++j)
                    w[j] += d * xi[j];
        }

        double wtw = 0.0;
        for (double v : w)
            wtw += v * v;
        double primal = 0.5 * wtw, dual = -0.5 * wtw;
        for (size_t i = 0; i < l; ++i) {
            const double *xi = x[i].data();
            double wx = 0.0;
            for (size_t j = 0; j < n; ++j)
                wx += w[j] * xi[j];
            primal += c * std::max(0.0, std::fabs(wx - y[i]) - eps);
            dual += y[i] * beta[i] - eps * std::fabs(beta[i]);
        }
        if (primal - dual <= gap_tol * std::max(1.0, std::fabs(primal)))
            break;
    }
    return w;
}

} // namespace

SvrModel train_svr(std::span<const std::vector<double>> rows, std::span<const double> scores,
                   const SvrParams &params, const std::string &layout_version) {
    if (rows.size() < 2 || rows.size() != scores.size())
        throw std::invalid_argument("train_svr: need >= 2 rows with matching scores");
    for (double s : scores)
        if (!std::isfinite(s))
            throw std::invalid_argument("train_svr: non-finite score");
    for (const auto &r : rows)
        for (double v : r)
            if (!std::isfinite(v))
                throw std::invalid_argument("train_svr: non-finite feature");

    const size_t n = rows[0].size();
    Standardization st = standardize_fit(rows);

    double y_mean = 0.0;
    for (double s : scores)
        y_mean += s;
    y_mean /= static_cast<double>(scores.size());
    double y_var = 0.0;
    for (double s : scores)
        y_var += (s - y_mean) * (s - y_mean);
    double y_std = std::sqrt(y_var / static_cast<double>(scores.size()));
    if (y_std <= 0.0)
        y_std = 1.0;

    // zero-variance columns standardize to 0 everywhere; drop them from the
    // solve and keep their weights at 0
    std::vector<size_t> live;
    for (size_t j = 0; j < n; ++j)
        if (!st.zero_variance[j])
            live.push_back(j);

    std::vector<std::vector<double>> xs(rows.size());
    std::vector<double> yz(scores.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        xs[i].resize(live.size() + 1);
        for (size_t k = 0; k < live.size(); ++k)
            xs[i][k] = (rows[i][live[k]] - st.means[live[k]]) / st.stds[live[k]];
        xs[i][live.size()] = 1.0; // bias feature
        yz[i] = (scores[i] - y_mean) / y_std;
    }

    std::vector<double> w = solve_svr_dual(xs, yz, params.c, params.epsilon, params.seed,
                                           params.gap_tol, params.max_epochs);

    SvrModel m;
    m.weights.assign(n, 0.0);
    for (size_t k = 0; k < live.size(); ++k)
        m.weights[live[k]] = w[k] * y_std;
    m.bias = w[live.size()] * y_std + y_mean;
    m.feature_means = std::move(st.means);
    m.feature_stds = std::move(st.stds);
    m.zero_variance = std::move(st.zero_variance);
    m.hyper_c = params.c;
    m.epsilon = params.epsilon;
    m.seed = params.seed;
    m.layout_version = layout_version;
    return m;
}

double predict(const SvrModel &model, std::span<const double> features,
               const std::string &layout_version) {
    if (features.size() != model.weights.size())
        throw DataError("predict: feature count mismatch");
    if (layout_version != model.layout_version)
        throw DataError("predict: layout_version mismatch (model " + model.layout_version +
                        ", features " + layout_version + ")");
    double s = model.bias;
    for (size_t j = 0; j < features.size(); ++j)
        s += model.weights[j] * (features[j] - model.feature_means[j]) / model.feature_stds[j];
    return s;
}

double cross_validate_c(std::span<const std::vector<double>> rows,
                        std::span<const double> scores,
                        std::span<const std::string> content_ids,
                        std::span<const double> grid, const SvrParams &params,
                        std::string *note) {
    constexpr int kFolds = 5;
    if (rows.size() < 10)
        throw DataError("cross_validate_c: need at least 10 rows");
    if (rows.size() != scores.size() || rows.size() != content_ids.size())
        throw DataError("cross_validate_c: row/score/content count mismatch");
    if (grid.empty())
        throw DataError("cross_validate_c: empty grid");

    std::vector<std::string> contents;
    std::map<std::string, int> content_fold; // content -> fold
    for (const auto &c : content_ids)
        if (!content_fold.count(c)) {
            content_fold[c] = -1;
            contents.push_back(c);
        }
    if (contents.size() < kFolds)
        throw DataError("cross_validate_c: cannot form 5 content-separated folds");

    SplitMix64 rng(params.seed ^ 0x5u);
    fisher_yates_shuffle(contents, rng);
    for (size_t i = 0; i < contents.size(); ++i)
        content_fold[contents[i]] = static_cast<int>(i % kFolds);

    std::vector<double> sorted_grid(grid.begin(), grid.end());
    std::sort(sorted_grid.begin(), sorted_grid.end());

    double best_c = sorted_grid[0];
    double best_score = -2.0;
    bool any_valid = false;
    for (double c : sorted_grid) {
        double fold_sum = 0.0;
        int fold_count = 0;
        for (int fold = 0; fold < kFolds; ++fold) {
            std::vector<std::vector<double>> tr;
            std::vector<double> try_, tes;
            std::vector<std::vector<double>> te;
            for (size_t i = 0; i < rows.size(); ++i) {
                if (content_fold[content_ids[i]] == fold) {
                    te.push_back(rows[i]);
                    tes.push_back(scores[i]);
                } else {
                    tr.push_back(rows[i]);
                    try_.push_back(scores[i]);
                }
            }
            if (tr.size() < 2 || te.size() < 3)
                continue;
            SvrParams p = params;
            p.c = c;
            try {
                SvrModel m = train_svr(tr, try_, p, "cv");
                std::vector<double> preds(te.size());
                for (size_t i = 0; i < te.size(); ++i)
                    preds[i] = predict(m, te[i], "cv");
                fold_sum += srocc(preds, tes);
                ++fold_count;
            } catch (const std::exception &) {
                // constant predictions or degenerate fold: skip
            }
        }
        if (fold_count == 0)
            continue;
        any_valid = true;
        double mean_srocc = fold_sum / fold_count;
        if (mean_srocc > best_score) { // strict: ties keep the smaller c
            best_score = mean_srocc;
            best_c = c;
        }
    }
    if (!any_valid && note)
        *note = "no fold produced a usable rank correlation; defaulting to smallest C";
    return best_c;
}

namespace {

constexpr uint32_t kModelMagic = 0x4d515648; // "HVQM" little-endian
constexpr uint32_t kModelVersion = 1;

template <typename T>
void put_le(std::ofstream &f, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::endian::native == std::endian::big) {
        auto *p = reinterpret_cast<unsigned char *>(&v);
        std::reverse(p, p + sizeof(T));
    }
    f.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get_le(std::ifstream &f) {
    T v{};
    f.read(reinterpret_cast<char *>(&v), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto *p = reinterpret_cast<unsigned char *>(&v);
        std::reverse(p, p + sizeof(T));
    }
    return v;
}

void put_vec(std::ofstream &f, const std::vector<double> &v) {
    put_le<uint64_t>(f, v.size());
    for (double x : v)
        put_le(f, x);
}

std::vector<double> get_vec(std::ifstream &f) {
    uint64_t n = get_le<uint64_t>(f);
    std::vector<double> v(n);
    for (auto &x : v)
        x = get_le<double>(f);
    return v;
}

} // namespace

void save_model(const SvrModel &model, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot create " + path);
    put_le(f, kModelMagic);
    put_le(f, kModelVersion);
    put_le<uint32_t>(f, static_cast<uint32_t>(model.layout_version.size()));
    f.write(model.layout_version.data(),
            static_cast<std::streamsize>(model.layout_version.size()));
    put_vec(f, model.weights);
    put_le(f, model.bias);
    put_vec(f, model.feature_means);
    put_vec(f, model.feature_stds);
    put_le<uint64_t>(f, model.zero_variance.size());
    f.write(reinterpret_cast<const char *>(model.zero_variance.data()),
            static_cast<std::streamsize>(model.zero_variance.size()));
    put_le(f, model.hyper_c);
    put_le(f, model.epsilon);
    put_le(f, model.seed);
    if (!f)
        throw DataError("write failure on " + path);

    nlohmann::json j{{"layout_version", model.layout_version},
                     {"features", model.weights.size()},
                     {"svr.c", model.hyper_c},
                     {"svr.eps", model.epsilon},
                     {"seed", model.seed}};
    std::ofstream side(path + ".json");
    side << j.dump(2) << "\n";
}

SvrModel load_model(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot open " + path);
    if (get_le<uint32_t>(f) != kModelMagic)
        throw DataError(path + ": not a model file");
    if (get_le<uint32_t>(f) != kModelVersion)
        throw DataError(path + ": unsupported model version");
    SvrModel m;
    uint32_t len = get_le<uint32_t>(f);
    m.layout_version.resize(len);
    f.read(m.layout_version.data(), len);
    m.weights = get_vec(f);
    m.bias = get_le<double>(f);
    m.feature_means = get_vec(f);
    m.feature_stds = get_vec(f);
    uint64_t zn = get_le<uint64_t>(f);
    m.zero_variance.resize(zn);
    f.read(reinterpret_cast<char *>(m.zero_variance.data()), static_cast<std::streamsize>(zn));
    m.hyper_c = get_le<double>(f);
    m.epsilon = get_le<double>(f);
    m.seed = get_le<uint64_t>(f);
    if (!f)
        throw DataError(path + ": truncated model file");
    return m;
}

} // namespace hdrvqa
