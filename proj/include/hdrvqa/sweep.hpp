#pragma once

#include "hdrvqa/eval.hpp"
#include "hdrvqa/features.hpp"

#include <span>
#include <string>
#include <vector>

namespace hdrvqa {

struct SweepVideo {
    std::string path;
    std::string video_id;
    OpenParams params;
};

/// Extract feature vectors for a set of videos, caching per-frame
/// intermediates under cache_dir. Cache entries are keyed by file content
/// hash plus the knob subset that affects each block family, so changing
/// (delta, window) only recomputes the nonlinear blocks.
std::vector<FeatureVector> sweep_extract_features(std::span<const SweepVideo> videos,
                                                  const FeatureConfig &cfg,
                                                  const std::string &cache_dir,
                                                  std::vector<std::string> *warnings = nullptr);

struct SweepRow {
    std::string label; // numeric value, or "Global" for window 0
    double value = 0.0;
    EvalReport report;
};

/// Re-evaluate the protocol for each value of `param` ("delta" or "window"),
/// reusing cached nonlinearity-independent blocks.
std::vector<SweepRow> sweep_parameter(const std::string &param, std::span<const double> values,
                                      std::span<const SweepVideo> videos,
                                      std::span<const ScoreRecord> scores,
                                      const FeatureConfig &base_cfg,
                                      const ProtocolOptions &protocol,
                                      const std::string &cache_dir);

/// Table shaped like the parameter-study tables: one row per swept value.
void write_sweep_csv(const std::string &path, const std::string &param,
                     std::span<const SweepRow> rows);

uint64_t fnv1a_file(const std::string &path);

} // namespace hdrvqa
