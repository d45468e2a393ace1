// Internal: streaming 7x7 Gaussian window machinery shared by the MSCN
// module and the fused feature engine. One pass over the plane, a 7-row ring
// of horizontally convolved rows, nothing frame-sized materialized.
#pragma once

#include "hdrvqa/mscn.hpp"
#include "hdrvqa/plane.hpp"

#include <climits>
#include <cmath>
#include <vector>

namespace hdrvqa::detail {

inline void hconv7_row(const double *in, double *out, int width) {
    const double *g = gaussian_window7();
    int lo = 3, hi = width - 3;
    if (width < 7)
        lo = hi = 0;
    for (int j = 0; j < lo; ++j) {
        double s = 0.0;
        for (int k = -3; k <= 3; ++k)
            s += g[k + 3] * in[reflect_index(j + k, width)];
        out[j] = s;
    }
    for (int j = lo; j < hi; ++j) {
        const double *p = in + j - 3;
        out[j] = g[0] * p[0] + g[1] * p[1] + g[2] * p[2] + g[3] * p[3] + g[4] * p[4] +
                 g[5] * p[5] + g[6] * p[6];
    }
    for (int j = std::max(hi, lo); j < width; ++j) {
        double s = 0.0;
        for (int k = -3; k <= 3; ++k)
            s += g[k + 3] * in[reflect_index(j + k, width)];
        out[j] = s;
    }
}

/// Calls fn(i, mu_row, sigma_row) for every row; the rows are scratch owned
/// by this function and valid only during the call.
template <typename Fn>
void streamed_local_stats(const Plane &plane, Fn &&fn) {
    const int w = plane.width, h = plane.height;
    const double *g = gaussian_window7();
    std::vector<double> ring_v(7 * static_cast<size_t>(w));
    std::vector<double> ring_s(7 * static_cast<size_t>(w));
    std::vector<double> sq(w), mu(w), sig(w);
    int slot_row[7];
    for (int &s : slot_row)
        s = INT_MIN;

    auto fill_slot = [&](int row) {
        int slot = ((row % 7) + 7) % 7;
        if (slot_row[slot] == row)
            return;
        const double *src = plane.row(reflect_index(row, h));
        hconv7_row(src, ring_v.data() + static_cast<size_t>(slot) * w, w);
        for (int j = 0; j < w; ++j)
            sq[j] = src[j] * src[j];
        hconv7_row(sq.data(), ring_s.data() + static_cast<size_t>(slot) * w, w);
        slot_row[slot] = row;
    };

    for (int r = -3; r <= 3; ++r)
        fill_slot(r);

    for (int i = 0; i < h; ++i) {
        fill_slot(i + 3);
        const double *rv[7], *rs[7];
        for (int k = -3; k <= 3; ++k) {
            int slot = (((i + k) % 7) + 7) % 7;
            rv[k + 3] = ring_v.data() + static_cast<size_t>(slot) * w;
            rs[k + 3] = ring_s.data() + static_cast<size_t>(slot) * w;
        }
        for (int j = 0; j < w; ++j) {
            double m = g[0] * rv[0][j] + g[1] * rv[1][j] + g[2] * rv[2][j] +
                       g[3] * rv[3][j] + g[4] * rv[4][j] + g[5] * rv[5][j] +
                       g[6] * rv[6][j];
            double m2 = g[0] * rs[0][j] + g[1] * rs[1][j] + g[2] * rs[2][j] +
                        g[3] * rs[3][j] + g[4] * rs[4][j] + g[5] * rs[5][j] +
                        g[6] * rs[6][j];
            double var = m2 - m * m;
            mu[j] = m;
            sig[j] = var > 0.0 ? std::sqrt(var) : 0.0;
        }
        fn(i, mu.data(), sig.data());
    }
}

} // namespace hdrvqa::detail
