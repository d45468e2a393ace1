#pragma once

#include "hdrvqa/chips.hpp"
#include "hdrvqa/nonlinearity.hpp"
#include "hdrvqa/video_io.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace hdrvqa {

inline constexpr int kFrameFeatureCount = 288;
inline constexpr int kVideoFeatureCount = 612;
inline constexpr int kStdPoolWindow = 5;
inline constexpr const char *kLayoutVersion = "hdrvqa-612/1";

struct FeatureConfig {
    NonlinearityConfig nl;
    ChipConfig chips;
    std::vector<double> temporal_taps = default_temporal_taps();
    int jobs = 1;
};

/// Contiguous half-open index ranges of the feature vector.
struct FeatureBlock {
    std::string name;
    int begin;
    int end;
};

/// Block map of the 612-dimensional layout. Order: luma, nonlinear luma,
/// R'G'B', nonlinear R'G'B', the matching per-5-frame std blocks, then the
/// space-time gradient chip block.
const std::vector<FeatureBlock> &feature_layout();

/// Cross-checks the block map against the fixed index ranges; throws
/// std::logic_error on any drift. Cheap; called at CLI startup and in tests.
void verify_layout();

struct FrameFeatures {
    std::array<double, kFrameFeatureCount> values{};
    int frame_index = 0;
};

struct FeatureVector {
    std::array<double, kVideoFeatureCount> values{};
    std::string layout_version = kLayoutVersion;
    std::string video_id;
};

/// 36 features of one channel plane: per scale (full, then half) a GGD fit
/// of the MSCN field followed by AGGD fits of the four paired products.
/// Degenerate fits zero-fill their slots and append a diagnostic.
std::array<double, 36> channel_features36(const Plane &plane, double c,
                                          std::vector<std::string> *warnings = nullptr);

/// The 288 per-frame features: luma, sensitized luma, R'G'B', sensitized
/// R'G'B' (chroma upsampled and converted via the configured gamut).
FrameFeatures frame_features(const Plane &y, const Plane &cb, const Plane &cr, Gamut gamut,
                             const FeatureConfig &cfg,
                             std::vector<std::string> *warnings = nullptr);

/// Temporal pooling: per-feature mean over frames (f1-f288), mean of
/// per-5-frame-window population std (f289-f576), mean of per-volume chip
/// blocks (f577-f612).
FeatureVector pool_video(std::span<const FrameFeatures> frames,
                         std::span<const std::array<double, 36>> chip_blocks,
                         std::vector<std::string> *warnings = nullptr);

struct ExtractResult {
    FeatureVector features;
    std::vector<std::string> warnings;
};

/// Full per-video pipeline: decode, per-frame features (parallel when
/// cfg.jobs > 1, reduced in frame order), gradient chip volumes, pooling.
ExtractResult extract_video(const VideoSource &src, const FeatureConfig &cfg,
                            const std::string &video_id);

/// Per-frame intermediates split by dependency, for sweep caching: `invariant`
/// holds the luma + R'G'B' blocks (and chips via `chip_blocks`), `nonlinear`
/// the two sensitized blocks, which depend on (delta, window).
struct VideoIntermediates {
    int frame_count = 0;
    std::vector<std::array<double, 144>> invariant; // [luma 36 | R'G'B' 108] per frame
    std::vector<std::array<double, 144>> nonlinear; // [nl luma 36 | nl R'G'B' 108] per frame
    std::vector<std::array<double, 36>> chip_blocks;
    std::vector<std::string> warnings;
};

/// Extraction that keeps the per-frame blocks separate; extract_video is
/// equivalent to assembling these and pooling.
VideoIntermediates extract_intermediates(const VideoSource &src, const FeatureConfig &cfg,
                                         bool invariant_blocks, bool nonlinear_blocks);

/// Assemble a FeatureVector from intermediates (both block families present).
FeatureVector pool_intermediates(const VideoIntermediates &inv, const VideoIntermediates &nl,
                                 const std::string &video_id,
                                 std::vector<std::string> *warnings = nullptr);

/// Feature CSV: header `video_id,layout_version,f1..f612`, one record per
/// video, values formatted round-trip exact.
void write_features_csv(const std::string &path, std::span<const FeatureVector> rows);
std::vector<FeatureVector> read_features_csv(const std::string &path);

struct ScoreRecord {
    std::string video_id;
    std::string content_id;
    double mos = 0.0;
};

/// Scores CSV: header `video_id,content_id,mos`.
std::vector<ScoreRecord> read_scores_csv(const std::string &path);
void write_scores_csv(const std::string &path, std::span<const ScoreRecord> rows);

} // namespace hdrvqa
