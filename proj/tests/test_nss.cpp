#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdrvqa/nss.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace hdrvqa;
using namespace hdrvqa::test;

TEST_CASE("moment ratio is strictly increasing over the shape range") {
    double prev = ggd_moment_ratio(0.05);
    for (int i = 1; i <= 1000; ++i) {
        double alpha = 0.05 + (10.0 - 0.05) * i / 1000.0;
        double r = ggd_moment_ratio(alpha);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("ggd fit recovers a Gaussian") {
    double alpha_sum = 0.0, sigma2_sum = 0.0;
    const int seeds = 3;
    for (int s = 0; s < seeds; ++s) {
        auto x = normal_samples(1000000, 100 + s);
        GgdFit f = fit_ggd(x);
        alpha_sum += f.alpha;
        sigma2_sum += f.sigma2;
    }
    CHECK(alpha_sum / seeds == doctest::Approx(2.0).epsilon(0.01));
    CHECK(sigma2_sum / seeds == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("ggd fit recovers a Laplacian") {
    std::mt19937_64 rng(7);
    std::exponential_distribution<double> exp_dist(1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> x(1000000);
    for (auto &v : x)
        v = (coin(rng) ? 1.0 : -1.0) * exp_dist(rng);
    GgdFit f = fit_ggd(x);
    CHECK(f.alpha > 0.97);
    CHECK(f.alpha < 1.03);
}

TEST_CASE("ggd fit rejects degenerate samples") {
    std::vector<double> x(1000, 3.25);
    CHECK_THROWS_AS(fit_ggd(x), std::invalid_argument);
    std::vector<double> few{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_ggd(few), std::invalid_argument);
}

TEST_CASE("ggd fit clamps an unattainable moment ratio") {
    // Rademacher data: (mean |x|)^2 / mean x^2 = 1, beyond the shape range.
    std::vector<double> x(1000);
    for (size_t i = 0; i < x.size(); ++i)
        x[i] = i % 2 ? 1.0 : -1.0;
    GgdFit f = fit_ggd(x);
    CHECK(f.alpha == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(f.clamped);
}

TEST_CASE("ggd fit is scale-equivariant") {
    auto x = ggd_samples(200000, 1.4, 1.0, 11);
    GgdFit base = fit_ggd(x);
    for (double a : {0.5, 2.0, 4.0}) {
        std::vector<double> scaled(x.size());
        for (size_t i = 0; i < x.size(); ++i)
            scaled[i] = a * x[i];
        GgdFit f = fit_ggd(scaled);
        CHECK(std::fabs(f.alpha - base.alpha) < 1e-6);
        CHECK(f.sigma2 == doctest::Approx(a * a * base.sigma2).epsilon(1e-12));
    }
}

TEST_CASE("ggd fit recovers shapes across the sweep set") {
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
        auto x = ggd_samples(1000000, alpha, 2.0, 31 + static_cast<uint64_t>(10 * alpha));
        GgdFit f = fit_ggd(x);
        CHECK(std::fabs(f.alpha - alpha) < 0.05);
        CHECK(std::fabs(f.sigma2 - 2.0) / 2.0 < 0.02);
    }
}

TEST_CASE("aggd fit on symmetric Gaussian data is balanced") {
    auto x = normal_samples(1000000, 42);
    AggdFit f = fit_aggd(x);
    CHECK(std::fabs(f.eta) < 0.01);
    CHECK(std::fabs(f.sigma_l2 - f.sigma_r2) < 0.02);
    CHECK(f.nu == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("aggd fit recovers a two-sided Gaussian mixture") {
    auto x = aggd_samples(1000000, 2.0, 1.0, 2.0, 99);
    AggdFit f = fit_aggd(x);
    CHECK(std::fabs(f.sigma_l2 - 1.0) < 0.03);
    CHECK(std::fabs(f.sigma_r2 - 4.0) / 4.0 < 0.03);
    CHECK(std::fabs(f.nu - 2.0) / 2.0 < 0.05);
}

TEST_CASE("aggd fit rejects one-sided data") {
    std::vector<double> x(1000);
    for (size_t i = 0; i < x.size(); ++i)
        x[i] = 1.0 + static_cast<double>(i % 17);
    CHECK_THROWS_AS(fit_aggd(x), std::invalid_argument);
}

TEST_CASE("aggd fit under sign flip swaps the sides") {
    auto x = aggd_samples(200000, 1.5, 0.8, 1.7, 123);
    AggdFit f = fit_aggd(x);
    std::vector<double> neg(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        neg[i] = -x[i];
    AggdFit g = fit_aggd(neg);
    CHECK(std::fabs(g.sigma_l2 - f.sigma_r2) < 1e-6);
    CHECK(std::fabs(g.sigma_r2 - f.sigma_l2) < 1e-6);
    CHECK(std::fabs(g.eta + f.eta) < 1e-6);
}

TEST_CASE("entropy ratio is small for Gaussian data with its own fit") {
    auto x = normal_samples(1000000, 5);
    GgdFit f = fit_ggd(x);
    EntropyDiagnostic d = entropy_ratio(x, f);
    CHECK(d.h_empirical > 0.0);
    CHECK(d.ratio < 0.02);
}

TEST_CASE("entropy ratio rejects degenerate histograms") {
    std::vector<double> x(2000, 1.0);
    CHECK_THROWS_AS(entropy_ratio(x, GgdFit{2.0, 1.0, false}), std::invalid_argument);
}

TEST_CASE("ggd entropy matches the Gaussian closed form at alpha 2") {
    double h = ggd_entropy(2.0, 1.0);
    CHECK(h == doctest::Approx(0.5 * std::log(2.0 * M_PI * M_E)).epsilon(1e-12));
}

TEST_CASE("streaming moments match whole-array fits") {
    auto x = ggd_samples(50000, 1.2, 0.5, 77);
    GgdMoments m;
    for (double v : x)
        m.add(v);
    GgdFit a = m.fit();
    GgdFit b = fit_ggd(x);
    CHECK(a.alpha == b.alpha);
    CHECK(a.sigma2 == b.sigma2);
}
