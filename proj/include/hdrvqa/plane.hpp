#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdrvqa {

enum class Channel { Y, Cb, Cr, R, G, B };

const char *channel_name(Channel c);

/// One 2-D plane of real-valued samples, row-major.
/// Code-value planes are normalized to [0,1]; planes that went through the
/// expansive nonlinearity carry `nonlinear = true` and a wider range.
struct Plane {
    std::vector<double> data;
    int width = 0;
    int height = 0;
    Channel channel = Channel::Y;
    int scale_level = 0; // 0 = full resolution, 1 = half
    bool nonlinear = false;

    Plane() = default;
    Plane(int w, int h, Channel ch = Channel::Y)
        : data(static_cast<size_t>(w) * h, 0.0), width(w), height(h), channel(ch) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("plane dimensions must be positive");
    }

    double &at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }
    double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
    const double *row(int r) const { return data.data() + static_cast<size_t>(r) * width; }
    double *row(int r) { return data.data() + static_cast<size_t>(r) * width; }
    size_t size() const { return data.size(); }
};

/// Mirror an out-of-range index back into [0, n) (symmetric half-sample
/// reflection: -1 -> 0, -2 -> 1, n -> n-1).
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0)
            i = -i - 1;
        if (i >= n)
            i = 2 * n - 1 - i;
    }
    return i;
}

} // namespace hdrvqa
