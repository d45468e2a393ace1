#include "hdrvqa/nonlinearity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hdrvqa {

namespace {

// exp(y) - 1 for y >= 0: Cody-Waite reduction + degree-12 Taylor core.
// Relative error a few 1e-15; ~4x faster than libm and vectorization-friendly.
inline double expm1_pos(double y) {
    constexpr double kLog2e = 1.4426950408889634074;
    constexpr double kLn2Hi = 6.93147180369123816490e-01;
    constexpr double kLn2Lo = 1.90821492927058770002e-10;
    if (y > 700.0) // keep the exponent scaling in range; not a hot case
        return std::expm1(y);
    double kd = std::nearbyint(y * kLog2e);
    int64_t k = static_cast<int64_t>(kd);
    double r = (y - kd * kLn2Hi) - kd * kLn2Lo;
    // e^r, |r| <= 0.3466
    double p = 1.0 / 479001600.0; // 1/12!
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    double scale = std::bit_cast<double>(static_cast<uint64_t>(1023 + k) << 52);
    return p * scale - 1.0;
}

struct MinOp {
    static double pick(double a, double b) { return a < b ? a : b; }
};
struct MaxOp {
    static double pick(double a, double b) { return a > b ? a : b; }
};

// Running-extrema (van Herk style) over centered windows of size 2r+1 along
// a contiguous row. Windows are clamped to [0, n), which matches symmetric
// reflection for extrema.
template <typename Op>
void sliding_1d(const double *in, double *out, int n, int r, std::vector<double> &fwd,
                std::vector<double> &bwd) {
    const int w = 2 * r + 1;
    if (n <= w) { // every window reaches a border; cumulative scans suffice
        double run = in[0];
        for (int i = 0; i < n; ++i) {
            run = i ? Op::pick(run, in[i]) : in[0];
            fwd[i] = run;
        }
        run = in[n - 1];
        for (int i = n - 1; i >= 0; --i) {
            run = i < n - 1 ? Op::pick(run, in[i]) : in[n - 1];
            bwd[i] = run;
        }
        for (int i = 0; i < n; ++i) {
            int a = std::max(0, i - r), b = std::min(n - 1, i + r);
            out[i] = a == 0 ? (b == n - 1 ? fwd[n - 1] : fwd[b]) : bwd[a];
        }
        return;
    }
    for (int i = 0; i < n; ++i)
        fwd[i] = (i % w == 0) ? in[i] : Op::pick(fwd[i - 1], in[i]);
    for (int i = n - 1; i >= 0; --i)
        bwd[i] = (i == n - 1 || (i + 1) % w == 0) ? in[i] : Op::pick(bwd[i + 1], in[i]);
    for (int i = r; i < n - r; ++i)
        out[i] = Op::pick(bwd[i - r], fwd[i + r]);
    for (int i = 0; i < r; ++i)
        out[i] = fwd[i + r]; // window start clamps to 0; block 0 covers it
    for (int i = n - r; i < n; ++i) {
        // clamped tail windows may straddle an aligned block end; scan directly
        double v = in[i - r];
        for (int k = i - r + 1; k < n; ++k)
            v = Op::pick(v, in[k]);
        out[i] = v;
    }
}

// Column-direction streaming combine: visits the row-pass fields once,
// keeping only a window-sized backward strip, and hands each output row's
// extrema to `emit(i, lo_row, hi_row)`.
template <typename Emit>
void column_extrema_stream(const double *tmin, const double *tmax, int width, int height,
                           int r, Emit &&emit) {
    const int w = 2 * r + 1;
    const size_t stride = static_cast<size_t>(width);

    std::vector<double> lo_row(width), hi_row(width);
    if (height <= w) {
        // small planes: cumulative scans from both ends
        std::vector<double> top_min(stride * height), top_max(stride * height);
        std::vector<double> bot_min(stride * height), bot_max(stride * height);
        for (int i = 0; i < height; ++i)
            for (int j = 0; j < width; ++j) {
                size_t p = i * stride + j;
                top_min[p] = i ? std::min(top_min[p - stride], tmin[p]) : tmin[p];
                top_max[p] = i ? std::max(top_max[p - stride], tmax[p]) : tmax[p];
            }
        for (int i = height - 1; i >= 0; --i)
            for (int j = 0; j < width; ++j) {
                size_t p = i * stride + j;
                bot_min[p] = i < height - 1 ? std::min(bot_min[p + stride], tmin[p]) : tmin[p];
                bot_max[p] = i < height - 1 ? std::max(bot_max[p + stride], tmax[p]) : tmax[p];
            }
        for (int i = 0; i < height; ++i) {
            int a = std::max(0, i - r), b = std::min(height - 1, i + r);
            for (int j = 0; j < width; ++j) {
                if (a == 0) {
                    lo_row[j] = top_min[b * stride + j];
                    hi_row[j] = top_max[b * stride + j];
                } else {
                    lo_row[j] = bot_min[a * stride + j];
                    hi_row[j] = bot_max[a * stride + j];
                }
            }
            emit(i, lo_row.data(), hi_row.data());
        }
        return;
    }

    std::vector<double> fwd_min(width), fwd_max(width);
    std::vector<double> strip_min(stride * w), strip_max(stride * w);
    int strip_block = -1;

    auto build_strip = [&](int q) { // backward sweep over block q
        int start = q * w, end = std::min(height, start + w);
        for (int i = end - 1; i >= start; --i) {
            double *sm = strip_min.data() + static_cast<size_t>(i - start) * stride;
            double *sx = strip_max.data() + static_cast<size_t>(i - start) * stride;
            const double *rm = tmin + i * stride;
            const double *rx = tmax + i * stride;
            if (i == end - 1) {
                std::copy(rm, rm + width, sm);
                std::copy(rx, rx + width, sx);
            } else {
                const double *pm = sm + stride, *px = sx + stride;
                for (int j = 0; j < width; ++j) {
                    sm[j] = std::min(pm[j], rm[j]);
                    sx[j] = std::max(px[j], rx[j]);
                }
            }
        }
        strip_block = q;
    };

    for (int s = 0; s < height; ++s) {
        const double *rm = tmin + s * stride;
        const double *rx = tmax + s * stride;
        if (s % w == 0) {
            std::copy(rm, rm + width, fwd_min.data());
            std::copy(rx, rx + width, fwd_max.data());
        } else {
            for (int j = 0; j < width; ++j) {
                fwd_min[j] = std::min(fwd_min[j], rm[j]);
                fwd_max[j] = std::max(fwd_max[j], rx[j]);
            }
        }
        int i = s - r;
        if (i < 0)
            continue;
        if (i < r) { // head: window clamps to row 0; block 0 covers it
            emit(i, fwd_min.data(), fwd_max.data());
            continue;
        }
        if (i + r >= height)
            break; // tail handled below
        int a = i - r;
        int q = a / w;
        if (strip_block != q)
            build_strip(q);
        const double *bm = strip_min.data() + static_cast<size_t>(a - q * w) * stride;
        const double *bx = strip_max.data() + static_cast<size_t>(a - q * w) * stride;
        for (int j = 0; j < width; ++j) {
            lo_row[j] = std::min(bm[j], fwd_min[j]);
            hi_row[j] = std::max(bx[j], fwd_max[j]);
        }
        emit(i, lo_row.data(), hi_row.data());
    }

    for (int i = std::max(r, height - r); i < height; ++i) {
        int a = i - r;
        std::copy(tmin + a * stride, tmin + a * stride + width, lo_row.data());
        std::copy(tmax + a * stride, tmax + a * stride + width, hi_row.data());
        for (int k = a + 1; k < height; ++k) {
            const double *rm = tmin + k * stride;
            const double *rx = tmax + k * stride;
            for (int j = 0; j < width; ++j) {
                lo_row[j] = std::min(lo_row[j], rm[j]);
                hi_row[j] = std::max(hi_row[j], rx[j]);
            }
        }
        emit(i, lo_row.data(), hi_row.data());
    }
}

// Shared per-thread scratch for the row-pass fields; avoids refaulting
// hundreds of megabytes per plane at 4K.
std::vector<double> &scratch_buffer(int which, size_t n) {
    thread_local std::vector<double> bufs[2];
    if (bufs[which].size() < n)
        bufs[which].resize(n);
    return bufs[which];
}

} // namespace

WindowExtrema window_extrema(const Plane &plane, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("window_extrema: window must be odd and >= 3");
    if (plane.width <= 0 || plane.height <= 0)
        throw std::invalid_argument("window_extrema: empty plane");
    const int r = window / 2;
    const size_t n = plane.size();
    std::vector<double> &tmin = scratch_buffer(0, n);
    std::vector<double> &tmax = scratch_buffer(1, n);
    {
        const int w = plane.width;
        std::vector<double> fwd(std::max(w, 1)), bwd(std::max(w, 1));
        for (int i = 0; i < plane.height; ++i) {
            const double *src = plane.row(i);
            sliding_1d<MinOp>(src, tmin.data() + static_cast<size_t>(i) * w, w, r, fwd, bwd);
            sliding_1d<MaxOp>(src, tmax.data() + static_cast<size_t>(i) * w, w, r, fwd, bwd);
        }
    }
    WindowExtrema e{Array2D(plane.width, plane.height), Array2D(plane.width, plane.height)};
    column_extrema_stream(tmin.data(), tmax.data(), plane.width, plane.height, r,
                          [&](int i, const double *lo, const double *hi) {
                              std::copy(lo, lo + plane.width,
                                        e.lo.data.data() + static_cast<size_t>(i) * plane.width);
                              std::copy(hi, hi + plane.width,
                                        e.hi.data.data() + static_cast<size_t>(i) * plane.width);
                          });
    return e;
}

Array2D local_unit_map(const Plane &plane, int window) {
    WindowExtrema e = window_extrema(plane, window);
    Array2D out(plane.width, plane.height);
    const size_t n = plane.size();
    for (size_t i = 0; i < n; ++i) {
        double lo = e.lo.data[i], hi = e.hi.data[i];
        out.data[i] = hi > lo ? 2.0 * (plane.data[i] - lo) / (hi - lo) - 1.0 : 0.0;
    }
    return out;
}

Array2D global_unit_map(const Plane &plane) {
    if (plane.width <= 0 || plane.height <= 0)
        throw std::invalid_argument("global_unit_map: empty plane");
    double lo = plane.data[0], hi = plane.data[0];
    for (double v : plane.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Array2D out(plane.width, plane.height);
    const size_t n = plane.size();
    for (size_t i = 0; i < n; ++i)
        out.data[i] = hi > lo ? 2.0 * (plane.data[i] - lo) / (hi - lo) - 1.0 : 0.0;
    return out;
}

double expansive_nonlinearity(double x, double delta) {
    if (x > 0.0)
        return expm1_pos(delta * x);
    if (x < 0.0)
        return -expm1_pos(-delta * x);
    return 0.0;
}

Array2D expansive_nonlinearity(const Array2D &mapped, double delta) {
    Array2D out(mapped.width, mapped.height);
    const size_t n = mapped.data.size();
    for (size_t i = 0; i < n; ++i)
        out.data[i] = expansive_nonlinearity(mapped.data[i], delta);
    return out;
}

Plane hdr_sensitize(const Plane &plane, const NonlinearityConfig &cfg) {
    Plane out(plane.width, plane.height, plane.channel);
    out.scale_level = plane.scale_level;
    out.nonlinear = true;

    if (cfg.window == 0) {
        Array2D mapped = global_unit_map(plane);
        for (size_t i = 0; i < mapped.data.size(); ++i)
            out.data[i] = expansive_nonlinearity(mapped.data[i], cfg.delta);
        return out;
    }
    if (cfg.window < 3 || cfg.window % 2 == 0)
        throw std::invalid_argument("hdr_sensitize: window must be odd and >= 3 (or 0)");

    // one streaming pipeline: row extrema -> column combine -> map -> f
    const int r = cfg.window / 2;
    const int w = plane.width;
    const size_t n = plane.size();
    std::vector<double> &tmin = scratch_buffer(0, n);
    std::vector<double> &tmax = scratch_buffer(1, n);
    {
        std::vector<double> fwd(std::max(w, 1)), bwd(std::max(w, 1));
        for (int i = 0; i < plane.height; ++i) {
            const double *src = plane.row(i);
            sliding_1d<MinOp>(src, tmin.data() + static_cast<size_t>(i) * w, w, r, fwd, bwd);
            sliding_1d<MaxOp>(src, tmax.data() + static_cast<size_t>(i) * w, w, r, fwd, bwd);
        }
    }
    const double delta = cfg.delta;
    column_extrema_stream(
        tmin.data(), tmax.data(), plane.width, plane.height, r,
        [&](int i, const double *lo, const double *hi) {
            const double *v = plane.row(i);
            double *o = out.row(i);
            for (int j = 0; j < w; ++j) {
                double mapped =
                    hi[j] > lo[j] ? 2.0 * (v[j] - lo[j]) / (hi[j] - lo[j]) - 1.0 : 0.0;
                o[j] = mapped > 0.0 ? expm1_pos(delta * mapped)
                       : mapped < 0.0 ? -expm1_pos(-delta * mapped)
                                      : 0.0;
            }
        });
    return out;
}

} // namespace hdrvqa
