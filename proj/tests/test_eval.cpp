#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdrvqa/errors.hpp"
#include "hdrvqa/eval.hpp"
#include "test_util.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace hdrvqa;
using namespace hdrvqa::test;
namespace fs = std::filesystem;

TEST_CASE("srocc endpoints and the hand-computed case") {
    std::vector<double> a{1, 2, 3, 4, 5};
    std::vector<double> rev{5, 4, 3, 2, 1};
    std::vector<double> mixed{1, 3, 2, 5, 4};
    CHECK(srocc(a, a) == doctest::Approx(1.0));
    CHECK(srocc(a, rev) == doctest::Approx(-1.0));
    CHECK(srocc(a, mixed) == doctest::Approx(0.8));

    std::vector<double> flat{2, 2, 2, 2, 2};
    CHECK_THROWS_AS(srocc(a, flat), std::invalid_argument);
    std::vector<double> two{1, 2};
    CHECK_THROWS_AS(srocc(two, two), std::invalid_argument);
}

TEST_CASE("srocc is invariant to strictly monotone transforms") {
    auto x = normal_samples(200, 4);
    auto y = normal_samples(200, 5);
    double base = srocc(x, y);
    std::vector<double> ex(x.size()), cy(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        ex[i] = std::exp(x[i]);
        cy[i] = y[i] * y[i] * y[i] + 2.0 * y[i];
    }
    CHECK(srocc(ex, cy) == base);
}

TEST_CASE("logistic fit on identity data does not worsen the error") {
    std::vector<double> mos(40), pred(40);
    for (int i = 0; i < 40; ++i) {
        double s = -3.0 + 6.0 * i / 39.0;
        mos[i] = 50.0 + 40.0 / (1.0 + std::exp(-s));
        pred[i] = mos[i];
    }
    LogisticFit f = logistic_fit(pred, mos);
    double before = 0.0, after = 0.0;
    for (int i = 0; i < 40; ++i) {
        before += (pred[i] - mos[i]) * (pred[i] - mos[i]);
        after += (f.mapped[i] - mos[i]) * (f.mapped[i] - mos[i]);
    }
    CHECK(after <= before + 1e-9);
}

TEST_CASE("logistic fit nests near-affine data") {
    auto mos = normal_samples(60, 6, 50.0, 10.0);
    std::vector<double> pred(mos.size());
    for (size_t i = 0; i < mos.size(); ++i)
        pred[i] = 0.1 * mos[i] - 2.0;
    LogisticFit f = logistic_fit(pred, mos);
    auto [lcc, rmse] = lcc_rmse(f.mapped, mos);
    CHECK(lcc > 1.0 - 1e-3);
    (void)rmse;
}

TEST_CASE("constant predictions trigger the linear fallback") {
    std::vector<double> pred(10, 1.0);
    auto mos = normal_samples(10, 7, 50.0, 10.0);
    LogisticFit f = logistic_fit(pred, mos);
    CHECK(f.linear_fallback);
    CHECK(f.mapped.size() == 10);
}

TEST_CASE("lcc and rmse basics") {
    std::vector<double> mos{10, 20, 30, 40};
    auto [lcc, rmse] = lcc_rmse(mos, mos);
    CHECK(lcc == doctest::Approx(1.0));
    CHECK(rmse == 0.0);

    std::vector<double> a{1, -1, 1, -1};
    std::vector<double> b{1, 1, -1, -1};
    auto [lcc2, rmse2] = lcc_rmse(a, b);
    CHECK(std::fabs(lcc2) < 1e-12);
    (void)rmse2;

    std::vector<double> p{0.0, 1.0};
    std::vector<double> m{0.0, 2.0};
    auto [lcc3, rmse3] = lcc_rmse(p, m);
    CHECK(rmse3 == doctest::Approx(std::sqrt(0.5)));
    (void)lcc3;
}

TEST_CASE("splits are reproducible and content-separated") {
    std::vector<std::string> contents;
    for (int i = 0; i < 31; ++i)
        contents.push_back("c" + std::to_string(i));
    SplitSpec a = make_split(contents, 12345, 0.2);
    SplitSpec b = make_split(contents, 12345, 0.2);
    CHECK(a.train_contents == b.train_contents);
    CHECK(a.test_contents == b.test_contents);
    CHECK(a.test_contents.size() == 6); // round(0.2 * 31)
    for (const auto &t : a.test_contents)
        for (const auto &tr : a.train_contents)
            CHECK(t != tr);
    SplitSpec c = make_split(contents, 54321, 0.2);
    CHECK(a.test_contents != c.test_contents);
}

namespace {

// synthetic dataset: n_contents contents x versions_each videos
void synth_dataset(int n_contents, int versions, uint64_t seed, bool informative,
                   std::vector<FeatureVector> &features, std::vector<ScoreRecord> &scores) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    features.clear();
    scores.clear();
    for (int c = 0; c < n_contents; ++c)
        for (int v = 0; v < versions; ++v) {
            double mos = 20.0 + 60.0 * v / std::max(1, versions - 1) + 0.5 * noise(rng);
            FeatureVector f;
            f.video_id = "c" + std::to_string(c) + "_v" + std::to_string(v);
            for (int j = 0; j < kVideoFeatureCount; ++j)
                f.values[j] = 0.0;
            if (informative) {
                f.values[0] = std::exp(0.05 * mos); // monotone transform of mos
            } else {
                for (int j = 0; j < 8; ++j)
                    f.values[j] = noise(rng);
            }
            features.push_back(f);
            scores.push_back({f.video_id, "content" + std::to_string(c), mos});
        }
}

} // namespace

TEST_CASE("perfect predictor reaches median SROCC 1.0") {
    std::vector<FeatureVector> features;
    std::vector<ScoreRecord> scores;
    synth_dataset(10, 5, 3, true, features, scores);
    ProtocolOptions opt;
    opt.n_splits = 20;
    opt.seed = 11;
    opt.tune_c = true;
    EvalReport r = run_protocol(features, scores, opt);
    CHECK(r.median_srocc == doctest::Approx(1.0));
    CHECK(r.per_split.size() == 20);
    for (const auto &m : r.per_split) {
        CHECK(m.spec.test_contents.size() == 2); // round(0.2 * 10)
        for (const auto &t : m.spec.test_contents)
            for (const auto &tr : m.spec.train_contents)
                CHECK(t != tr);
    }
}

TEST_CASE("noise features stay near zero rank correlation") {
    std::vector<FeatureVector> features;
    std::vector<ScoreRecord> scores;
    synth_dataset(30, 3, 17, false, features, scores);
    ProtocolOptions opt;
    opt.n_splits = 30;
    opt.seed = 19;
    opt.tune_c = false; // pure-noise CV is meaningless; keep default C
    EvalReport r = run_protocol(features, scores, opt);
    CHECK(r.median_srocc > -0.25);
    CHECK(r.median_srocc < 0.25);
}

TEST_CASE("protocol results are independent of split execution order") {
    std::vector<FeatureVector> features;
    std::vector<ScoreRecord> scores;
    synth_dataset(8, 4, 23, true, features, scores);
    ProtocolOptions opt;
    opt.n_splits = 8;
    opt.seed = 5;
    opt.jobs = 1;
    EvalReport a = run_protocol(features, scores, opt);
    opt.jobs = 4;
    EvalReport b = run_protocol(features, scores, opt);
    REQUIRE(a.per_split.size() == b.per_split.size());
    for (size_t i = 0; i < a.per_split.size(); ++i) {
        CHECK(a.per_split[i].srocc == b.per_split[i].srocc);
        CHECK(a.per_split[i].rmse == b.per_split[i].rmse);
    }
}

TEST_CASE("welch t-test verdicts") {
    auto a = normal_samples(100, 31, 0.825, 0.059);
    CHECK(welch_ttest(a, a) == 0);

    auto b = normal_samples(100, 32, 0.744, 0.090);
    CHECK(welch_ttest(a, b) == 1);
    CHECK(welch_ttest(b, a) == -1);

    for (uint64_t seed = 0; seed < 10; ++seed) {
        auto x = normal_samples(40, 100 + seed, 0.5, 0.1);
        auto y = normal_samples(40, 200 + seed, 0.5 + 0.01 * seed, 0.1);
        CHECK(welch_ttest(x, y) == -welch_ttest(y, x));
    }

    std::vector<double> flat1{1.0, 1.0, 1.0};
    std::vector<double> flat2{1.0, 1.0, 1.0};
    CHECK(welch_ttest(flat1, flat2) == 0);
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(welch_ttest(one, flat1), std::invalid_argument);
}

TEST_CASE("report json round-trips the per-split metrics") {
    std::vector<FeatureVector> features;
    std::vector<ScoreRecord> scores;
    synth_dataset(6, 4, 29, true, features, scores);
    ProtocolOptions opt;
    opt.n_splits = 5;
    opt.seed = 77;
    EvalReport r = run_protocol(features, scores, opt);

    fs::path tmp = fs::temp_directory_path() / "hdrvqa_report_rt.json";
    write_report_json(tmp.string(), r);
    EvalReport back = read_report_json(tmp.string());
    REQUIRE(back.per_split.size() == r.per_split.size());
    CHECK(back.median_srocc == r.median_srocc);
    for (size_t i = 0; i < r.per_split.size(); ++i) {
        CHECK(back.per_split[i].srocc == r.per_split[i].srocc);
        CHECK(back.per_split[i].spec.test_contents == r.per_split[i].spec.test_contents);
    }
    fs::remove(tmp);
}

TEST_CASE("run_protocol validates its inputs") {
    std::vector<FeatureVector> features;
    std::vector<ScoreRecord> scores;
    synth_dataset(3, 3, 31, true, features, scores);
    ProtocolOptions opt;
    opt.n_splits = 2;
    CHECK_THROWS_AS(run_protocol(features, scores, opt), DataError); // < 5 contents

    synth_dataset(6, 3, 32, true, features, scores);
    scores.push_back({"missing_video", "content0", 10.0});
    CHECK_THROWS_AS(run_protocol(features, scores, opt), DataError);
}
