#pragma once

#include "hdrvqa/mscn.hpp"
#include "hdrvqa/plane.hpp"

namespace hdrvqa {

struct NonlinearityConfig {
    double delta = 4.0;
    int window = 17; // odd, >= 3; 0 selects whole-frame (global) mapping
};

/// Per-pixel window min and max over a WxW neighborhood (clamped at frame
/// borders, which is equivalent to symmetric reflection for extrema).
/// O(N) two-pass running-extrema implementation.
struct WindowExtrema {
    Array2D lo;
    Array2D hi;
};
WindowExtrema window_extrema(const Plane &plane, int window);

/// Map each sample to [-1,1] against its WxW window min/max; flat windows
/// (hi == lo) map to 0. W odd, >= 3.
Array2D local_unit_map(const Plane &plane, int window);

/// Whole-frame variant of the [-1,1] mapping.
Array2D global_unit_map(const Plane &plane);

/// f(x; delta) = exp(delta x) - 1 for x > 0, 1 - exp(-delta x) for x < 0,
/// 0 at 0. Odd and strictly increasing.
double expansive_nonlinearity(double x, double delta);

/// Elementwise f over a mapped field.
Array2D expansive_nonlinearity(const Array2D &mapped, double delta);

/// local_unit_map (or global when cfg.window == 0) followed by f. The result
/// keeps the source channel and is tagged nonlinear; downstream MSCN should
/// use kStabilizerNonlinear.
Plane hdr_sensitize(const Plane &plane, const NonlinearityConfig &cfg);

} // namespace hdrvqa
