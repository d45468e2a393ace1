#pragma once

#include "hdrvqa/mscn.hpp"
#include "hdrvqa/nss.hpp"
#include "hdrvqa/plane.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace hdrvqa {

struct ChipConfig {
    int temporal_extent = 5;          // frames per chip volume
    int chip_size = 5;                // spatial slice side
    int num_angles = 6;               // uniform in [0, pi)
    bool abs_kurtosis = true;         // |excess| criterion vs signed minimum
};

/// Default temporal decorrelation taps: zero-DC antisymmetric derivative,
/// unit L2 norm.
std::vector<double> default_temporal_taps();

/// Space-time slice samples gathered along the selected direction.
struct ChipSampleSet {
    std::vector<double> samples; // concatenated chip_size x chip_size slices
    int chip_size = 5;
    double chosen_angle = 0.0;            // radians, in [0, pi)
    double excess_kurtosis = 0.0;         // pooled m4/m2^2 - 3 of `samples`
    std::vector<double> per_angle_excess; // pooled excess per candidate angle
    std::vector<double> per_angle_score;  // selection criterion per angle
};

/// Sobel gradient magnitude with reflection padding. Plane must be >= 3x3.
Array2D gradient_magnitude(const Plane &plane);

/// Zero-DC FIR along time (true convolution, output aligned to the window
/// center): out[i] = sum_k taps[k] * fields[i + K - 1 - k]. Requires at
/// least K fields and taps summing to zero.
std::vector<Array2D> temporal_filter(std::span<const Array2D> fields,
                                     std::span<const double> taps);

/// Per-frame nearest-pixel displacement of a chip swept along `angle` at one
/// pixel per frame, centered on the middle frame. Returns (dx, dy) per frame.
std::vector<std::pair<int, int>> chip_offsets(double angle, int temporal_extent);

/// Sweep non-overlapping chip_size x chip_size blocks through the volume
/// along each candidate angle, pick the direction whose per-chip excess
/// kurtosis stays closest to Gaussian, and gather that direction's slices.
/// Throws DataError if the volume cannot hold a single swept chip.
ChipSampleSet extract_chips(std::span<const Array2D> volume, const ChipConfig &cfg);

/// GGD (2) + paired-product AGGD (4x4) features of one scale's chip samples.
/// Degenerate statistics yield a zeroed block and a warning instead of
/// aborting.
std::array<double, 18> chip_scale_features(const ChipSampleSet &set,
                                           std::vector<std::string> *warnings = nullptr);

/// Streaming equivalent of extract_chips followed by chip_scale_features,
/// without materializing the sample set. Produces identical features.
std::array<double, 18> chip_volume_features(std::span<const Array2D> volume,
                                            const ChipConfig &cfg,
                                            std::vector<std::string> *warnings = nullptr,
                                            double *chosen_angle = nullptr);

/// Full 36-feature chip block: full-scale features followed by half-scale.
std::array<double, 36> chip_features36(const ChipSampleSet &full_scale,
                                       const ChipSampleSet &half_scale,
                                       std::vector<std::string> *warnings = nullptr);

} // namespace hdrvqa
