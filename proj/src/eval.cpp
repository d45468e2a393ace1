#include "hdrvqa/eval.hpp"
#include "hdrvqa/errors.hpp"
#include "hdrvqa/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <thread>

namespace hdrvqa {

namespace {

std::vector<double> midranks(std::span<const double> v) {
    const size_t n = v.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]])
            ++j;
        double r = 0.5 * (i + j) + 1.0; // average rank, 1-based
        for (size_t k = i; k <= j; ++k)
            ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson: need equal lengths >= 2");
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw std::invalid_argument("pearson: constant input vector");
    return sab / std::sqrt(saa * sbb);
}

double srocc(std::span<const double> pred, std::span<const double> mos) {
    if (pred.size() != mos.size() || pred.size() < 3)
        throw std::invalid_argument("srocc: need equal lengths >= 3");
    std::vector<double> ra = midranks(pred);
    std::vector<double> rb = midranks(mos);
    return pearson(ra, rb);
}

namespace {

double logistic4(double s, const std::array<double, 4> &b) {
    double denom_scale = std::fabs(b[3]);
    if (denom_scale < 1e-12)
        denom_scale = 1e-12;
    double z = -(s - b[2]) / denom_scale;
    z = std::clamp(z, -700.0, 700.0);
    return b[1] + (b[0] - b[1]) / (1.0 + std::exp(z));
}

double sse_objective(const std::array<double, 4> &b, std::span<const double> pred,
                     std::span<const double> mos) {
    double sse = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double d = logistic4(pred[i], b) - mos[i];
        sse += d * d;
    }
    return sse;
}

// Nelder-Mead on 4 parameters; returns iterations used.
int nelder_mead(std::array<double, 4> &best, std::span<const double> pred,
                std::span<const double> mos, int max_iter, bool *converged) {
    constexpr int kDim = 4;
    using Point = std::array<double, 4>;
    std::array<Point, kDim + 1> simplex;
    std::array<double, kDim + 1> fv;

    simplex[0] = best;
    for (int i = 0; i < kDim; ++i) {
        Point p = best;
        double step = p[i] != 0.0 ? 0.1 * std::fabs(p[i]) : 0.05;
        p[i] += step;
        simplex[i + 1] = p;
    }
    for (int i = 0; i <= kDim; ++i)
        fv[i] = sse_objective(simplex[i], pred, mos);

    int iter = 0;
    *converged = false;
    while (iter < max_iter) {
        std::array<int, kDim + 1> ord;
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        double fbest = fv[ord[0]], fworst = fv[ord[kDim]];
        if (fworst - fbest <= 1e-12 * (std::fabs(fbest) + 1e-12)) {
            *converged = true;
            break;
        }
        ++iter;

        Point centroid{};
        for (int k = 0; k < kDim; ++k)
            for (int d = 0; d < kDim; ++d)
                centroid[d] += simplex[ord[k]][d] / kDim;

        auto blend = [&](double t) {
            Point p;
            for (int d = 0; d < kDim; ++d)
                p[d] = centroid[d] + t * (simplex[ord[kDim]][d] - centroid[d]);
            return p;
        };

        Point refl = blend(-1.0);
        double frefl = sse_objective(refl, pred, mos);
        if (frefl < fv[ord[0]]) {
            Point exp_ = blend(-2.0);
            double fexp = sse_objective(exp_, pred, mos);
            if (fexp < frefl) {
                simplex[ord[kDim]] = exp_;
                fv[ord[kDim]] = fexp;
            } else {
                simplex[ord[kDim]] = refl;
                fv[ord[kDim]] = frefl;
            }
        } else if (frefl < fv[ord[kDim - 1]]) {
            simplex[ord[kDim]] = refl;
            fv[ord[kDim]] = frefl;
        } else {
            Point contr = blend(frefl < fv[ord[kDim]] ? -0.5 : 0.5);
            double fcontr = sse_objective(contr, pred, mos);
            if (fcontr < std::min(frefl, fv[ord[kDim]])) {
                simplex[ord[kDim]] = contr;
                fv[ord[kDim]] = fcontr;
            } else { // shrink toward the best vertex
                for (int k = 1; k <= kDim; ++k) {
                    for (int d = 0; d < kDim; ++d)
                        simplex[ord[k]][d] =
                            0.5 * (simplex[ord[k]][d] + simplex[ord[0]][d]);
                    fv[ord[k]] = sse_objective(simplex[ord[k]], pred, mos);
                }
            }
        }
    }
    int best_i = 0;
    for (int i = 1; i <= kDim; ++i)
        if (fv[i] < fv[best_i])
            best_i = i;
    best = simplex[best_i];
    return iter;
}

} // namespace

LogisticFit logistic_fit(std::span<const double> pred, std::span<const double> mos) {
    if (pred.size() != mos.size() || pred.size() < 2)
        throw std::invalid_argument("logistic_fit: need equal lengths >= 2");
    LogisticFit out;

    std::vector<double> pv(pred.begin(), pred.end());
    double pred_std = stddev_of(pv);
    bool converged = false;
    constexpr int kMaxIter = 10000;
    const bool enough = pred.size() >= 5; // 4 parameters need at least 5 points

    if (enough && pred_std > 0.0) {
        double mos_max = *std::max_element(mos.begin(), mos.end());
        double mos_min = *std::min_element(mos.begin(), mos.end());
        std::array<double, 4> beta{mos_max, mos_min, mean_of(pv), pred_std / 4.0};
        int used = 0;
        // a couple of restarts from the incumbent make the simplex robust to
        // early stalls on near-affine data
        for (int attempt = 0; attempt < 3 && used < kMaxIter; ++attempt) {
            bool conv = false;
            used += nelder_mead(beta, pred, mos, kMaxIter - used, &conv);
            converged = conv;
        }
        out.beta = beta;
        if (converged) {
            // a saturated sigmoid can collapse every input to one plateau
            // value; that is a degenerate map, not a fit
            double lo = logistic4(pred[0], beta), hi = lo;
            for (double s : pred) {
                double v = logistic4(s, beta);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(hi > lo))
                converged = false;
        }
    }

    if (!converged || !enough || pred_std <= 0.0) {
        // linear least-squares fallback
        out.linear_fallback = true;
        double n = static_cast<double>(pred.size());
        double sp = 0, sm = 0, spp = 0, spm = 0;
        for (size_t i = 0; i < pred.size(); ++i) {
            sp += pred[i];
            sm += mos[i];
            spp += pred[i] * pred[i];
            spm += pred[i] * mos[i];
        }
        double denom = n * spp - sp * sp;
        double slope = denom != 0.0 ? (n * spm - sp * sm) / denom : 0.0;
        double inter = (sm - slope * sp) / n;
        out.mapped.resize(pred.size());
        for (size_t i = 0; i < pred.size(); ++i)
            out.mapped[i] = slope * pred[i] + inter;
        return out;
    }

    out.mapped.resize(pred.size());
    for (size_t i = 0; i < pred.size(); ++i)
        out.mapped[i] = logistic4(pred[i], out.beta);
    return out;
}

std::pair<double, double> lcc_rmse(std::span<const double> mapped,
                                   std::span<const double> mos) {
    if (mapped.size() != mos.size() || mapped.empty())
        throw std::invalid_argument("lcc_rmse: need equal nonempty lengths");
    double sse = 0.0;
    for (size_t i = 0; i < mapped.size(); ++i) {
        double d = mapped[i] - mos[i];
        sse += d * d;
    }
    double rmse = std::sqrt(sse / static_cast<double>(mapped.size()));
    double lcc = pearson(mapped, mos);
    return {lcc, rmse};
}

SplitSpec make_split(std::span<const std::string> contents, uint64_t seed,
                     double test_fraction) {
    if (contents.size() < 2)
        throw DataError("make_split: need at least 2 contents");
    std::vector<std::string> shuffled(contents.begin(), contents.end());
    std::sort(shuffled.begin(), shuffled.end()); // canonical order before shuffling
    SplitMix64 rng(seed);
    fisher_yates_shuffle(shuffled, rng);
    size_t n_test = static_cast<size_t>(std::llround(test_fraction * shuffled.size()));
    n_test = std::clamp<size_t>(n_test, 1, shuffled.size() - 1);
    SplitSpec spec;
    spec.seed = seed;
    spec.test_contents.assign(shuffled.begin(), shuffled.begin() + n_test);
    spec.train_contents.assign(shuffled.begin() + n_test, shuffled.end());
    return spec;
}

namespace {

struct JoinedRow {
    const FeatureVector *features;
    std::string content_id;
    double mos;
};

std::vector<JoinedRow> join_rows(std::span<const FeatureVector> features,
                                 std::span<const ScoreRecord> scores) {
    std::map<std::string, const FeatureVector *> by_id;
    for (const FeatureVector &f : features)
        by_id[f.video_id] = &f;
    std::vector<JoinedRow> rows;
    for (const ScoreRecord &s : scores) {
        auto it = by_id.find(s.video_id);
        if (it == by_id.end())
            throw DataError("run_protocol: no features for video " + s.video_id);
        rows.push_back({it->second, s.content_id, s.mos});
    }
    return rows;
}

SplitMetrics evaluate_split(const std::vector<JoinedRow> &rows, const SplitSpec &spec,
                            const ProtocolOptions &opt, int split_index) {
    std::set<std::string> train_set(spec.train_contents.begin(), spec.train_contents.end());
    std::set<std::string> test_set(spec.test_contents.begin(), spec.test_contents.end());
    for (const auto &c : test_set)
        if (train_set.count(c))
            throw DataError("split leaks content " + c + " into both sides");

    std::vector<std::vector<double>> xtr, xte;
    std::vector<double> ytr, yte;
    std::vector<std::string> ctr;
    for (const JoinedRow &r : rows) {
        std::vector<double> v(r.features->values.begin(), r.features->values.end());
        if (train_set.count(r.content_id)) {
            xtr.push_back(std::move(v));
            ytr.push_back(r.mos);
            ctr.push_back(r.content_id);
        } else if (test_set.count(r.content_id)) {
            xte.push_back(std::move(v));
            yte.push_back(r.mos);
        } else {
            throw DataError("content " + r.content_id + " missing from split");
        }
    }

    SplitMetrics m;
    m.split_index = split_index;
    m.spec = spec;

    SvrParams params = opt.svr;
    if (opt.tune_c)
        params.c = cross_validate_c(xtr, ytr, ctr, opt.c_grid, params);
    m.best_c = params.c;

    SvrModel model = train_svr(xtr, ytr, params, kLayoutVersion);
    std::vector<double> preds(xte.size());
    for (size_t i = 0; i < xte.size(); ++i)
        preds[i] = predict(model, xte[i], kLayoutVersion);

    // a collapsed model (constant predictions) carries no rank information;
    // score it as uncorrelated rather than aborting the whole protocol
    try {
        m.srocc = srocc(preds, yte);
    } catch (const std::invalid_argument &) {
        m.srocc = 0.0;
    }
    LogisticFit lf = logistic_fit(preds, yte);
    m.logistic_beta = lf.beta;
    m.logistic_fallback = lf.linear_fallback;
    try {
        auto [lcc, rmse] = lcc_rmse(lf.mapped, yte);
        m.lcc = lcc;
        m.rmse = rmse;
    } catch (const std::invalid_argument &) {
        m.lcc = 0.0;
        double sse = 0.0;
        for (size_t i = 0; i < preds.size(); ++i)
            sse += (lf.mapped[i] - yte[i]) * (lf.mapped[i] - yte[i]);
        m.rmse = std::sqrt(sse / static_cast<double>(preds.size()));
    }
    return m;
}

double sample_std(const std::vector<double> &v) {
    if (v.size() < 2)
        return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace

EvalReport run_protocol(std::span<const FeatureVector> features,
                        std::span<const ScoreRecord> scores, const ProtocolOptions &opt) {
    std::vector<JoinedRow> rows = join_rows(features, scores);
    std::set<std::string> content_set;
    for (const JoinedRow &r : rows)
        content_set.insert(r.content_id);
    if (content_set.size() < 5)
        throw DataError("run_protocol: need at least 5 contents");
    std::vector<std::string> contents(content_set.begin(), content_set.end());

    SplitMix64 seeder(opt.seed);
    std::vector<uint64_t> split_seeds(opt.n_splits);
    for (auto &s : split_seeds)
        s = seeder.next();

    EvalReport report;
    report.seed = opt.seed;
    report.per_split.resize(opt.n_splits);

    const int jobs = std::max(1, opt.jobs);
    for (int k0 = 0; k0 < opt.n_splits; k0 += jobs) {
        int count = std::min(jobs, opt.n_splits - k0);
        auto work = [&](int idx) {
            SplitSpec spec = make_split(contents, split_seeds[idx], opt.test_fraction);
            report.per_split[idx] = evaluate_split(rows, spec, opt, idx);
        };
        if (count == 1) {
            work(k0);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(count);
            for (int t = 0; t < count; ++t)
                pool.emplace_back([&, t] {
                    try {
                        work(k0 + t);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            for (auto &th : pool)
                th.join();
            for (auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
        }
    }

    std::vector<double> ss, ls, rs;
    for (const SplitMetrics &m : report.per_split) {
        ss.push_back(m.srocc);
        ls.push_back(m.lcc);
        rs.push_back(m.rmse);
    }
    report.median_srocc = median_of(ss);
    report.median_lcc = median_of(ls);
    report.median_rmse = median_of(rs);
    report.std_srocc = sample_std(ss);
    report.std_lcc = sample_std(ls);
    report.std_rmse = sample_std(rs);
    return report;
}

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 200;
    constexpr double kEps = 3e-14, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin)
        d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// P(T <= t) for Student's t with dof nu; cdf(-t) == 1 - cdf(t) exactly.
double student_cdf(double t, double nu) {
    double x = nu / (nu + t * t);
    double half_tail = 0.5 * betai(0.5 * nu, 0.5, x);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

} // namespace

int welch_ttest(std::span<const double> a, std::span<const double> b, double alpha,
                bool one_sided) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_ttest: need at least 2 samples per side");
    auto mean_var = [](std::span<const double> v) {
        double m = 0.0;
        for (double x : v)
            m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v)
            s += (x - m) * (x - m);
        return std::pair<double, double>(m, s / static_cast<double>(v.size() - 1));
    };
    auto [ma, va] = mean_var(a);
    auto [mb, vb] = mean_var(b);
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());

    if (va == 0.0 && vb == 0.0)
        return ma == mb ? 0 : (ma > mb ? 1 : -1);

    double sea = va / na, seb = vb / nb;
    double se2 = sea + seb;
    double t = (ma - mb) / std::sqrt(se2);
    double dof = se2 * se2 / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));

    double threshold = one_sided ? alpha : 0.5 * alpha;
    double p_greater = 1.0 - student_cdf(t, dof); // H1: mean(a) > mean(b)
    double p_less = student_cdf(t, dof);
    if (p_greater < threshold)
        return 1;
    if (p_less < threshold)
        return -1;
    return 0;
}

void write_report_json(const std::string &path, const EvalReport &report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["splits"] = report.per_split.size();
    j["median_srocc"] = report.median_srocc;
    j["median_lcc"] = report.median_lcc;
    j["median_rmse"] = report.median_rmse;
    j["std_srocc"] = report.std_srocc;
    j["std_lcc"] = report.std_lcc;
    j["std_rmse"] = report.std_rmse;
    j["per_split"] = nlohmann::json::array();
    for (const SplitMetrics &m : report.per_split) {
        nlohmann::json e;
        e["split"] = m.split_index;
        e["seed"] = m.spec.seed;
        e["train_contents"] = m.spec.train_contents;
        e["test_contents"] = m.spec.test_contents;
        e["best_c"] = m.best_c;
        e["srocc"] = m.srocc;
        e["lcc"] = m.lcc;
        e["rmse"] = m.rmse;
        e["logistic_beta"] = m.logistic_beta;
        e["logistic_fallback"] = m.logistic_fallback;
        j["per_split"].push_back(std::move(e));
    }
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot create " + path);
    f << j.dump(2) << "\n";
    if (!f)
        throw DataError("write failure on " + path);
}

EvalReport read_report_json(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open " + path);
    nlohmann::json j;
    f >> j;
    EvalReport r;
    r.seed = j.value("seed", 0ull);
    r.median_srocc = j.value("median_srocc", 0.0);
    r.median_lcc = j.value("median_lcc", 0.0);
    r.median_rmse = j.value("median_rmse", 0.0);
    r.std_srocc = j.value("std_srocc", 0.0);
    r.std_lcc = j.value("std_lcc", 0.0);
    r.std_rmse = j.value("std_rmse", 0.0);
    for (const auto &e : j.at("per_split")) {
        SplitMetrics m;
        m.split_index = e.value("split", 0);
        m.spec.seed = e.value("seed", 0ull);
        if (e.contains("train_contents"))
            m.spec.train_contents = e["train_contents"].get<std::vector<std::string>>();
        if (e.contains("test_contents"))
            m.spec.test_contents = e["test_contents"].get<std::vector<std::string>>();
        m.best_c = e.value("best_c", 1.0);
        m.srocc = e.value("srocc", 0.0);
        m.lcc = e.value("lcc", 0.0);
        m.rmse = e.value("rmse", 0.0);
        m.logistic_fallback = e.value("logistic_fallback", false);
        if (e.contains("logistic_beta")) {
            auto v = e["logistic_beta"].get<std::vector<double>>();
            for (size_t i = 0; i < v.size() && i < 4; ++i)
                m.logistic_beta[i] = v[i];
        }
        r.per_split.push_back(std::move(m));
    }
    return r;
}

} // namespace hdrvqa
