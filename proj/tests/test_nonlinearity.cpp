#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdrvqa/mscn.hpp"
#include "hdrvqa/nonlinearity.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace hdrvqa;
using namespace hdrvqa::test;

namespace {

// O(N * W^2) reference: per-pixel min/max over the reflected window.
void naive_extrema(const Plane &p, int window, Array2D &lo, Array2D &hi) {
    int r = window / 2;
    for (int i = 0; i < p.height; ++i)
        for (int j = 0; j < p.width; ++j) {
            double mn = p.at(i, j), mx = p.at(i, j);
            for (int a = -r; a <= r; ++a)
                for (int b = -r; b <= r; ++b) {
                    double v = p.at(reflect_index(i + a, p.height),
                                    reflect_index(j + b, p.width));
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                }
            lo.at(i, j) = mn;
            hi.at(i, j) = mx;
        }
}

} // namespace

TEST_CASE("nonlinearity fixed point and endpoints") {
    CHECK(expansive_nonlinearity(0.0, 4.0) == 0.0);
    CHECK(std::fabs(expansive_nonlinearity(1.0, 4.0) - (std::exp(4.0) - 1.0)) < 1e-12);
    CHECK(std::fabs(expansive_nonlinearity(-1.0, 4.0) - (1.0 - std::exp(4.0))) < 1e-12);
}

TEST_CASE("nonlinearity is odd and strictly increasing") {
    const int n = 100000;
    double prev = expansive_nonlinearity(-1.0, 4.0);
    for (int k = 1; k <= n; ++k) {
        double x = -1.0 + 2.0 * k / n;
        double y = expansive_nonlinearity(x, 4.0);
        CHECK(y > prev);
        prev = y;
        CHECK(expansive_nonlinearity(-x, 4.0) == -y);
    }
}

TEST_CASE("window extrema match the brute-force oracle") {
    for (int window : {9, 17, 31}) {
        Plane p = uniform_plane(64, 64, 1000 + window);
        WindowExtrema e = window_extrema(p, window);
        Array2D lo(64, 64), hi(64, 64);
        naive_extrema(p, window, lo, hi);
        for (size_t i = 0; i < p.size(); ++i) {
            CHECK(e.lo.data[i] == lo.data[i]);
            CHECK(e.hi.data[i] == hi.data[i]);
        }
    }
}

TEST_CASE("window extrema handle non-square and tiny planes") {
    for (auto [w, h] : {std::pair{37, 11}, {5, 64}, {4, 4}, {1, 9}, {9, 1}}) {
        Plane p = uniform_plane(w, h, static_cast<uint64_t>(w * 131 + h));
        WindowExtrema e = window_extrema(p, 9);
        Array2D lo(w, h), hi(w, h);
        naive_extrema(p, 9, lo, hi);
        for (size_t i = 0; i < p.size(); ++i) {
            CHECK(e.lo.data[i] == lo.data[i]);
            CHECK(e.hi.data[i] == hi.data[i]);
        }
    }
}

TEST_CASE("local unit map of a constant plane is zero") {
    Plane p(32, 32);
    for (auto &v : p.data)
        v = 0.6;
    Array2D m = local_unit_map(p, 17);
    for (double v : m.data)
        CHECK(v == 0.0);
}

TEST_CASE("window extrema map to the interval endpoints") {
    Plane p = uniform_plane(48, 48, 5, 0.2, 0.8);
    p.at(20, 20) = 0.95; // strict window max
    p.at(30, 30) = 0.05; // strict window min
    Array2D m = local_unit_map(p, 17);
    CHECK(m.at(20, 20) == doctest::Approx(1.0));
    CHECK(m.at(30, 30) == doctest::Approx(-1.0));
}

TEST_CASE("local unit map matches brute force exactly") {
    Plane p = uniform_plane(64, 64, 9);
    Array2D m = local_unit_map(p, 17);
    Array2D lo(64, 64), hi(64, 64);
    naive_extrema(p, 17, lo, hi);
    for (size_t i = 0; i < p.size(); ++i) {
        double expect =
            hi.data[i] > lo.data[i]
                ? 2.0 * (p.data[i] - lo.data[i]) / (hi.data[i] - lo.data[i]) - 1.0
                : 0.0;
        CHECK(m.data[i] == expect);
    }
}

TEST_CASE("local unit map is invariant to affine rescaling") {
    Plane p = uniform_plane(40, 40, 12);
    Plane q(40, 40);
    for (size_t i = 0; i < p.size(); ++i)
        q.data[i] = 2.0 * p.data[i] + 0.25;
    Array2D mp = local_unit_map(p, 9);
    Array2D mq = local_unit_map(q, 9);
    for (size_t i = 0; i < p.size(); ++i)
        CHECK(std::fabs(mp.data[i] - mq.data[i]) < 1e-12);
}

TEST_CASE("hdr_sensitize of a constant plane gives zero mscn") {
    Plane p(64, 64);
    for (auto &v : p.data)
        v = 0.3;
    Plane s = hdr_sensitize(p, {});
    CHECK(s.nonlinear);
    for (double v : s.data)
        CHECK(v == 0.0);
    MscnField f = mscn(s, kStabilizerNonlinear);
    for (double v : f.data.data)
        CHECK(v == 0.0);
}

TEST_CASE("hdr_sensitize concentrates energy at a step edge") {
    Plane p(32, 32);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            p.at(i, j) = j < 16 ? 0.2 : 0.8;
    NonlinearityConfig cfg; // delta 4, window 17
    Plane s = hdr_sensitize(p, cfg);
    // direct evaluation: windows that straddle the edge see both levels
    Array2D mapped = local_unit_map(p, cfg.window);
    for (size_t i = 0; i < p.size(); ++i)
        CHECK(s.data[i] == expansive_nonlinearity(mapped.data[i], cfg.delta));
    double edge_energy = 0.0, flat_energy = 0.0;
    for (int i = 0; i < 32; ++i) {
        edge_energy += s.at(i, 15) * s.at(i, 15) + s.at(i, 16) * s.at(i, 16);
        flat_energy += s.at(i, 2) * s.at(i, 2) + s.at(i, 29) * s.at(i, 29);
    }
    CHECK(edge_energy > flat_energy);
}

TEST_CASE("monotone ramp compresses midtones") {
    Plane p(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            p.at(i, j) = j / 63.0;
    NonlinearityConfig cfg;
    cfg.window = 0; // global mapping spans the whole ramp
    Plane s = hdr_sensitize(p, cfg);
    double mid = std::fabs(s.at(32, 31));
    double lo = std::fabs(s.at(32, 1));
    double hi = std::fabs(s.at(32, 62));
    CHECK(mid < lo);
    CHECK(mid < hi);
}

TEST_CASE("small delta linearizes the map") {
    Plane p = uniform_plane(48, 48, 21);
    NonlinearityConfig cfg;
    cfg.delta = 1e-6;
    Array2D mapped = local_unit_map(p, cfg.window);
    Plane s = hdr_sensitize(p, cfg);
    for (size_t i = 0; i < p.size(); ++i)
        CHECK(std::fabs(s.data[i] / cfg.delta - mapped.data[i]) < 1e-4);
}

TEST_CASE("global unit map spans the frame range") {
    Plane p = uniform_plane(16, 16, 30, 0.25, 0.75);
    Array2D m = global_unit_map(p);
    double mn = 2.0, mx = -2.0;
    for (double v : m.data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    CHECK(mn == doctest::Approx(-1.0));
    CHECK(mx == doctest::Approx(1.0));
}

TEST_CASE("window validation") {
    Plane p = uniform_plane(8, 8, 2);
    CHECK_THROWS_AS(local_unit_map(p, 4), std::invalid_argument);
    CHECK_THROWS_AS(local_unit_map(p, 1), std::invalid_argument);
}
