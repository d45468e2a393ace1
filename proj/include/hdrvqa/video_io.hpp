#pragma once

#include "hdrvqa/plane.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hdrvqa {

enum class PixLayout { Planar420, Planar444 };
enum class SampleRange { Limited, Full };
enum class Gamut { Bt2020, Bt709 };
enum class Container { Y4m, Raw };

/// Explicit open parameters: sidecar keys and/or CLI flags. For Y4M input
/// they must agree with the header; for raw input width/height are required.
struct OpenParams {
    std::optional<int> width;
    std::optional<int> height;
    std::optional<int> bit_depth; // 8 or 10
    std::optional<PixLayout> layout;
    std::optional<SampleRange> range;
    std::optional<Gamut> gamut;
};

/// Parse a flat key=value sidecar file (width, height, bit_depth, layout,
/// range, gamut; '#' comments allowed).
OpenParams parse_sidecar(const std::string &path);
OpenParams sidecar_from_map(const std::map<std::string, std::string> &kv);

struct VideoSource {
    std::string path;
    int width = 0;
    int height = 0;
    int bit_depth = 10;
    PixLayout layout = PixLayout::Planar420;
    SampleRange range = SampleRange::Limited;
    Gamut gamut = Gamut::Bt2020;
    int frame_count = 0;
    Container container = Container::Raw;
    std::vector<uint64_t> frame_offsets; // payload offset of each frame

    uint64_t frame_bytes() const;
};

struct YCbCrFrame {
    Plane y;
    Plane cb;
    Plane cr;
};

struct RgbFrame {
    Plane r;
    Plane g;
    Plane b;
};

/// Probe and validate a video file. Y4M is detected by magic; anything else
/// is treated as a raw planar file and needs width/height from `params`.
/// Throws DataError on truncated payloads, unsupported layouts, or
/// header/parameter disagreement.
VideoSource open_video(const std::string &path, const OpenParams &params = {});

/// Decode frame k to planes normalized to [0,1]. Limited range maps
/// [64,940] -> [0,1] for 10-bit ([16,235] for 8-bit), clamped; full range
/// maps the whole code range. Chroma stays at its stored resolution.
/// Stateless: safe to call concurrently.
YCbCrFrame read_frame(const VideoSource &src, int k);

/// Bilinear 2x chroma upsampling, co-sited top-left siting.
Plane upsample_chroma(const Plane &plane, int luma_width, int luma_height);

/// Non-constant-luminance inverse transform; Cb/Cr are re-centered to
/// [-0.5,0.5] internally and outputs are clamped to [0,1].
RgbFrame ycbcr_to_rgb(const Plane &y, const Plane &cb, const Plane &cr, Gamut gamut);

/// Minimal Y4M writer for 4:2:0 content (8- or 10-bit), used to build test
/// fixtures and synthetic corpora. Samples are raw code values;
/// 10-bit samples are stored little-endian.
class Y4mWriter {
  public:
    Y4mWriter(const std::string &path, int width, int height, int bit_depth);
    void write_frame(const std::vector<uint16_t> &y, const std::vector<uint16_t> &cb,
                     const std::vector<uint16_t> &cr);

  private:
    std::ofstream out_;
    int width_, height_, bit_depth_;
};

} // namespace hdrvqa
