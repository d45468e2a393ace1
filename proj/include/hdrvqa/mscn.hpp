#pragma once

#include "hdrvqa/plane.hpp"

namespace hdrvqa {

/// Stabilizer for MSCN of code-value planes in [0,1]: 4 on the 0-1023
/// digital scale.
inline constexpr double kStabilizerLinear = 4.0 / 1023.0;
/// Stabilizer for MSCN of nonlinearly mapped planes.
inline constexpr double kStabilizerNonlinear = 0.001;

/// Simple 2-D array for derived fields whose dimensions differ from any
/// source plane.
struct Array2D {
    std::vector<double> data;
    int width = 0;
    int height = 0;

    Array2D() = default;
    Array2D(int w, int h) : data(static_cast<size_t>(w) * h, 0.0), width(w), height(h) {}
    double &at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
};

struct LocalStats {
    Array2D mu;
    Array2D sigma;
};

/// Local mean-subtracted contrast-normalized coefficients.
struct MscnField {
    Array2D data;
    Channel source_channel = Channel::Y;
    double stabilizer_c = kStabilizerLinear;
    int scale_level = 0;
};

struct PairedProducts {
    Array2D horizontal; // v[i,j] * v[i,j+1]
    Array2D vertical;   // v[i,j] * v[i+1,j]
    Array2D diag_main;  // v[i,j] * v[i+1,j+1]
    Array2D diag_anti;  // v[i,j] * v[i+1,j-1]
};

/// The 7-tap 1-D Gaussian window (sigma = 7/6, sampled to 3 sigma, unit sum).
/// The 2-D window is its outer product.
const double *gaussian_window7();

/// Local weighted mean and standard deviation over the 7x7 Gaussian window,
/// symmetric reflection at borders.
LocalStats local_stats(const Plane &plane);

/// Convolve with the 7x7 unit-volume Gaussian (reflection padding).
Array2D gaussian_smooth7(const Plane &plane);

/// (V - mu) / (sigma + c). Throws std::invalid_argument if c <= 0.
MscnField mscn(const Plane &plane, double c);

/// Products of neighboring coefficient pairs. Throws if the field is
/// smaller than 2x2.
PairedProducts paired_products(const MscnField &field);

/// Gaussian-smooth then decimate by 2 in each axis (samples 0, 2, 4, ...).
Plane downscale2(const Plane &plane);

} // namespace hdrvqa
