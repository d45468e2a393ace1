#include "hdrvqa/mscn.hpp"
#include "stream7.hpp"

#include <array>
#include <climits>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace hdrvqa {

namespace {

constexpr int kHalf = 3; // K = L = 3

std::array<double, 7> make_window() {
    std::array<double, 7> w{};
    const double sigma = 7.0 / 6.0;
    double sum = 0.0;
    for (int k = -kHalf; k <= kHalf; ++k) {
        w[k + kHalf] = std::exp(-0.5 * k * k / (sigma * sigma));
        sum += w[k + kHalf];
    }
    for (double &x : w)
        x /= sum;
    return w;
}

const std::array<double, 7> kWindow = make_window();

} // namespace

const double *gaussian_window7() { return kWindow.data(); }

Array2D gaussian_smooth7(const Plane &plane) {
    const int w = plane.width, h = plane.height;
    Array2D out(w, h);
    std::vector<double> tmp(plane.size());
    for (int i = 0; i < h; ++i)
        detail::hconv7_row(plane.row(i), tmp.data() + static_cast<size_t>(i) * w, w);
    const double *g = kWindow.data();
    for (int i = 0; i < h; ++i) {
        const double *rows[7];
        for (int k = -kHalf; k <= kHalf; ++k)
            rows[k + kHalf] = tmp.data() + static_cast<size_t>(reflect_index(i + k, h)) * w;
        double *o = out.data.data() + static_cast<size_t>(i) * w;
        for (int j = 0; j < w; ++j)
            o[j] = g[0] * rows[0][j] + g[1] * rows[1][j] + g[2] * rows[2][j] +
                   g[3] * rows[3][j] + g[4] * rows[4][j] + g[5] * rows[5][j] +
                   g[6] * rows[6][j];
    }
    return out;
}

LocalStats local_stats(const Plane &plane) {
    if (plane.width <= 0 || plane.height <= 0)
        throw std::invalid_argument("local_stats: empty plane");
    LocalStats st{Array2D(plane.width, plane.height), Array2D(plane.width, plane.height)};
    detail::streamed_local_stats(plane, [&](int i, const double *mu, const double *sig) {
        std::memcpy(st.mu.data.data() + static_cast<size_t>(i) * plane.width, mu,
                    sizeof(double) * plane.width);
        std::memcpy(st.sigma.data.data() + static_cast<size_t>(i) * plane.width, sig,
                    sizeof(double) * plane.width);
    });
    return st;
}

MscnField mscn(const Plane &plane, double c) {
    if (c <= 0.0)
        throw std::invalid_argument("mscn: stabilizer must be positive");
    if (plane.width <= 0 || plane.height <= 0)
        throw std::invalid_argument("mscn: empty plane");
    MscnField f;
    f.data = Array2D(plane.width, plane.height);
    f.source_channel = plane.channel;
    f.stabilizer_c = c;
    f.scale_level = plane.scale_level;
    detail::streamed_local_stats(plane, [&](int i, const double *mu, const double *sig) {
        const double *v = plane.row(i);
        double *out = f.data.data.data() + static_cast<size_t>(i) * plane.width;
        for (int j = 0; j < plane.width; ++j)
            out[j] = (v[j] - mu[j]) / (sig[j] + c);
    });
    return f;
}

PairedProducts paired_products(const MscnField &field) {
    const Array2D &v = field.data;
    if (v.width < 2 || v.height < 2)
        throw std::invalid_argument("paired_products: field must be at least 2x2");
    PairedProducts p;
    p.horizontal = Array2D(v.width - 1, v.height);
    p.vertical = Array2D(v.width, v.height - 1);
    p.diag_main = Array2D(v.width - 1, v.height - 1);
    p.diag_anti = Array2D(v.width - 1, v.height - 1);
    for (int i = 0; i < v.height; ++i) {
        for (int j = 0; j + 1 < v.width; ++j)
            p.horizontal.at(i, j) = v.at(i, j) * v.at(i, j + 1);
    }
    for (int i = 0; i + 1 < v.height; ++i) {
        for (int j = 0; j < v.width; ++j)
            p.vertical.at(i, j) = v.at(i, j) * v.at(i + 1, j);
        for (int j = 0; j + 1 < v.width; ++j)
            p.diag_main.at(i, j) = v.at(i, j) * v.at(i + 1, j + 1);
        for (int j = 1; j < v.width; ++j)
            p.diag_anti.at(i, j - 1) = v.at(i, j) * v.at(i + 1, j - 1);
    }
    return p;
}

Plane downscale2(const Plane &plane) {
    // Gaussian smooth + decimate, computing only surviving samples:
    // horizontal taps at even columns, column taps at even rows.
    const int w = plane.width, h = plane.height;
    const int ow = (w + 1) / 2, oh = (h + 1) / 2;
    Plane out(ow, oh, plane.channel);
    out.scale_level = 1;
    out.nonlinear = plane.nonlinear;

    const double *g = kWindow.data();
    std::vector<double> ring(7 * static_cast<size_t>(ow));
    int slot_row[7];
    for (int &s : slot_row)
        s = INT_MIN;

    auto fill_slot = [&](int row) {
        int slot = ((row % 7) + 7) % 7;
        if (slot_row[slot] == row)
            return slot;
        const double *src = plane.row(reflect_index(row, h));
        double *dst = ring.data() + static_cast<size_t>(slot) * ow;
        for (int jo = 0; jo < ow; ++jo) {
            int j = 2 * jo;
            if (j >= kHalf && j < w - kHalf) {
                const double *p = src + j - kHalf;
                dst[jo] = g[0] * p[0] + g[1] * p[1] + g[2] * p[2] + g[3] * p[3] +
                          g[4] * p[4] + g[5] * p[5] + g[6] * p[6];
            } else {
                double s = 0.0;
                for (int k = -kHalf; k <= kHalf; ++k)
                    s += g[k + kHalf] * src[reflect_index(j + k, w)];
                dst[jo] = s;
            }
        }
        slot_row[slot] = row;
        return slot;
    };

    for (int io = 0; io < oh; ++io) {
        int i = 2 * io;
        const double *rows[7];
        for (int k = -kHalf; k <= kHalf; ++k)
            rows[k + kHalf] = ring.data() + static_cast<size_t>(fill_slot(i + k)) * ow;
        double *o = out.row(io);
        for (int jo = 0; jo < ow; ++jo)
            o[jo] = g[0] * rows[0][jo] + g[1] * rows[1][jo] + g[2] * rows[2][jo] +
                    g[3] * rows[3][jo] + g[4] * rows[4][jo] + g[5] * rows[5][jo] +
                    g[6] * rows[6][jo];
    }
    return out;
}

} // namespace hdrvqa
