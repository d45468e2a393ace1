#include "hdrvqa/video_io.hpp"
#include "hdrvqa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace hdrvqa {

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

PixLayout parse_layout(const std::string &v) {
    if (v == "420")
        return PixLayout::Planar420;
    if (v == "444")
        return PixLayout::Planar444;
    throw DataError("unsupported layout '" + v + "' (expected 420 or 444)");
}

SampleRange parse_range(const std::string &v) {
    if (v == "limited")
        return SampleRange::Limited;
    if (v == "full")
        return SampleRange::Full;
    throw DataError("unsupported range '" + v + "' (expected limited or full)");
}

Gamut parse_gamut(const std::string &v) {
    if (v == "bt2020")
        return Gamut::Bt2020;
    if (v == "bt709")
        return Gamut::Bt709;
    throw DataError("unsupported gamut '" + v + "' (expected bt2020 or bt709)");
}

uint64_t file_size(std::ifstream &f) {
    f.seekg(0, std::ios::end);
    return static_cast<uint64_t>(f.tellg());
}

template <typename T>
void check_agreement(const std::optional<T> &flag, T header, const char *what) {
    if (flag && *flag != header)
        throw DataError(std::string("header/flag mismatch on ") + what);
}

// Parse the Y4M stream header and populate src; returns offset just past
// the terminating newline.
uint64_t parse_y4m_header(std::ifstream &f, VideoSource &src, const OpenParams &params) {
    std::string line;
    if (!std::getline(f, line) || line.compare(0, 9, "YUV4MPEG2") != 0)
        throw DataError(src.path + ": not a YUV4MPEG2 stream");
    std::istringstream iss(line);
    std::string tok;
    iss >> tok; // magic
    int w = -1, h = -1, depth = 8;
    PixLayout layout = PixLayout::Planar420;
    bool have_colorspace = false;
    std::optional<SampleRange> header_range;
    while (iss >> tok) {
        switch (tok[0]) {
        case 'W':
            w = std::stoi(tok.substr(1));
            break;
        case 'H':
            h = std::stoi(tok.substr(1));
            break;
        case 'C': {
            std::string c = tok.substr(1);
            have_colorspace = true;
            if (c == "420p10") {
                layout = PixLayout::Planar420;
                depth = 10;
            } else if (c == "420" || c == "420jpeg" || c == "420mpeg2" || c == "420paldv") {
                layout = PixLayout::Planar420;
                depth = 8;
            } else if (c == "444p10") {
                layout = PixLayout::Planar444;
                depth = 10;
            } else if (c == "444") {
                layout = PixLayout::Planar444;
                depth = 8;
            } else {
                throw DataError(src.path + ": unsupported Y4M colorspace C" + c);
            }
            break;
        }
        case 'X':
            if (tok == "XCOLORRANGE=FULL")
                header_range = SampleRange::Full;
            else if (tok == "XCOLORRANGE=LIMITED")
                header_range = SampleRange::Limited;
            break;
        case 'I':
            if (tok.size() > 1 && tok[1] != 'p')
                throw DataError(src.path + ": interlaced Y4M is not supported");
            break;
        default: // F (rate), A (aspect): irrelevant here
            break;
        }
    }
    if (w <= 0 || h <= 0)
        throw DataError(src.path + ": Y4M header lacks frame dimensions");
    if (!have_colorspace) {
        layout = PixLayout::Planar420; // Y4M default
        depth = 8;
    }
    check_agreement(params.width, w, "width");
    check_agreement(params.height, h, "height");
    check_agreement(params.bit_depth, depth, "bit_depth");
    check_agreement(params.layout, layout, "layout");
    if (params.range && header_range && *params.range != *header_range)
        throw DataError(src.path + ": header/flag mismatch on range");

    src.width = w;
    src.height = h;
    src.bit_depth = depth;
    src.layout = layout;
    src.range = params.range.value_or(header_range.value_or(SampleRange::Limited));
    return static_cast<uint64_t>(f.tellg());
}

void index_y4m_frames(std::ifstream &f, VideoSource &src, uint64_t pos) {
    uint64_t total = file_size(f);
    uint64_t fb = src.frame_bytes();
    f.clear();
    while (pos < total) {
        f.seekg(static_cast<std::streamoff>(pos));
        std::string line;
        if (!std::getline(f, line))
            break;
        if (line.compare(0, 5, "FRAME") != 0)
            throw DataError(src.path + ": malformed FRAME marker");
        uint64_t payload = pos + line.size() + 1;
        if (payload + fb > total)
            throw DataError(src.path + ": truncated frame payload");
        src.frame_offsets.push_back(payload);
        pos = payload + fb;
    }
    src.frame_count = static_cast<int>(src.frame_offsets.size());
}

double normalize_code(int code, int bit_depth, SampleRange range) {
    if (range == SampleRange::Full) {
        int max_code = (1 << bit_depth) - 1;
        return static_cast<double>(code) / max_code;
    }
    double lo = bit_depth == 10 ? 64.0 : 16.0;
    double span = bit_depth == 10 ? 876.0 : 219.0; // 940-64, 235-16
    double v = (static_cast<double>(code) - lo) / span;
    return std::clamp(v, 0.0, 1.0);
}

void read_plane(std::ifstream &f, Plane &p, int bit_depth, SampleRange range) {
    const size_t n = p.size();
    if (bit_depth > 8) {
        // normalize through a code-value table; stray high bits clamp to max
        static thread_local std::vector<double> lut;
        static thread_local int lut_depth = -1;
        static thread_local SampleRange lut_range = SampleRange::Limited;
        if (lut_depth != bit_depth || lut_range != range || lut.size() != 65536) {
            lut.resize(65536);
            const int max_code = (1 << bit_depth) - 1;
            for (int code = 0; code < 65536; ++code)
                lut[code] = normalize_code(std::min(code, max_code), bit_depth, range);
            lut_depth = bit_depth;
            lut_range = range;
        }
        std::vector<uint16_t> raw(n);
        f.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(n * 2));
        if (!f)
            throw DataError("I/O failure while reading frame plane");
        for (size_t i = 0; i < n; ++i)
            p.data[i] = lut[raw[i]];
    } else {
        std::vector<uint8_t> raw(n);
        f.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(n));
        if (!f)
            throw DataError("I/O failure while reading frame plane");
        for (size_t i = 0; i < n; ++i)
            p.data[i] = normalize_code(raw[i], bit_depth, range);
    }
}

} // namespace

uint64_t VideoSource::frame_bytes() const {
    uint64_t luma = static_cast<uint64_t>(width) * height;
    uint64_t chroma = layout == PixLayout::Planar420
                          ? 2ull * (width / 2) * (height / 2)
                          : 2ull * luma;
    return (luma + chroma) * (bit_depth > 8 ? 2 : 1);
}

OpenParams sidecar_from_map(const std::map<std::string, std::string> &kv) {
    OpenParams p;
    for (const auto &[key, value] : kv) {
        if (key == "width")
            p.width = std::stoi(value);
        else if (key == "height")
            p.height = std::stoi(value);
        else if (key == "bit_depth")
            p.bit_depth = std::stoi(value);
        else if (key == "layout")
            p.layout = parse_layout(value);
        else if (key == "range")
            p.range = parse_range(value);
        else if (key == "gamut")
            p.gamut = parse_gamut(value);
        // unknown keys may belong to other tools; ignore
    }
    if (p.bit_depth && *p.bit_depth != 8 && *p.bit_depth != 10)
        throw DataError("bit_depth must be 8 or 10");
    return p;
}

OpenParams parse_sidecar(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open sidecar " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        std::string s = trim(line);
        if (s.empty() || s[0] == '#')
            continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ": bad sidecar line '" + s + "'");
        kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return sidecar_from_map(kv);
}

VideoSource open_video(const std::string &path, const OpenParams &params) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot open video file " + path);

    VideoSource src;
    src.path = path;
    src.gamut = params.gamut.value_or(Gamut::Bt2020);

    char magic[9] = {};
    f.read(magic, 9);
    bool is_y4m = f && std::memcmp(magic, "YUV4MPEG2", 9) == 0;
    f.clear();
    f.seekg(0);

    if (is_y4m) {
        src.container = Container::Y4m;
        uint64_t pos = parse_y4m_header(f, src, params);
        if (src.layout == PixLayout::Planar420 && (src.width % 2 || src.height % 2))
            throw DataError(path + ": 4:2:0 requires even dimensions");
        index_y4m_frames(f, src, pos);
    } else {
        src.container = Container::Raw;
        if (!params.width || !params.height)
            throw DataError(path + ": raw input needs width and height (sidecar or flags)");
        src.width = *params.width;
        src.height = *params.height;
        src.bit_depth = params.bit_depth.value_or(10);
        src.layout = params.layout.value_or(PixLayout::Planar420);
        src.range = params.range.value_or(SampleRange::Limited);
        if (src.width <= 0 || src.height <= 0)
            throw DataError(path + ": dimensions must be positive");
        if (src.layout == PixLayout::Planar420 && (src.width % 2 || src.height % 2))
            throw DataError(path + ": 4:2:0 requires even dimensions");
        uint64_t total = file_size(f);
        uint64_t fb = src.frame_bytes();
        if (total == 0 || total % fb != 0)
            throw DataError(path + ": payload is not a whole number of frames (truncated?)");
        src.frame_count = static_cast<int>(total / fb);
        src.frame_offsets.resize(src.frame_count);
        for (int k = 0; k < src.frame_count; ++k)
            src.frame_offsets[k] = static_cast<uint64_t>(k) * fb;
    }
    return src;
}

YCbCrFrame read_frame(const VideoSource &src, int k) {
    if (k < 0 || k >= src.frame_count)
        throw DataError(src.path + ": frame index out of range");
    std::ifstream f(src.path, std::ios::binary);
    if (!f)
        throw DataError("cannot open video file " + src.path);
    f.seekg(static_cast<std::streamoff>(src.frame_offsets[k]));

    int cw = src.layout == PixLayout::Planar420 ? src.width / 2 : src.width;
    int ch = src.layout == PixLayout::Planar420 ? src.height / 2 : src.height;

    YCbCrFrame frame{Plane(src.width, src.height, Channel::Y), Plane(cw, ch, Channel::Cb),
                     Plane(cw, ch, Channel::Cr)};
    read_plane(f, frame.y, src.bit_depth, src.range);
    read_plane(f, frame.cb, src.bit_depth, src.range);
    read_plane(f, frame.cr, src.bit_depth, src.range);
    if (src.layout == PixLayout::Planar420) {
        frame.cb.scale_level = 1;
        frame.cr.scale_level = 1;
    }
    return frame;
}

Plane upsample_chroma(const Plane &plane, int luma_width, int luma_height) {
    if (plane.width * 2 < luma_width || plane.height * 2 < luma_height)
        throw DataError("upsample_chroma: plane too small for target dimensions");
    Plane out(luma_width, luma_height, plane.channel);

    if (luma_width == 2 * plane.width && luma_height == 2 * plane.height) {
        // exact 2x: even rows copy/average horizontally, odd rows average
        // the surrounding even output rows (co-sited top-left)
        const int cw = plane.width, ch = plane.height;
        for (int ci = 0; ci < ch; ++ci) {
            const double *src = plane.row(ci);
            double *even = out.row(2 * ci);
            for (int cj = 0; cj + 1 < cw; ++cj) {
                even[2 * cj] = src[cj];
                even[2 * cj + 1] = 0.5 * (src[cj] + src[cj + 1]);
            }
            even[2 * cw - 2] = src[cw - 1];
            even[2 * cw - 1] = src[cw - 1]; // clamp past the last sample
        }
        for (int i = 1; i < luma_height; i += 2) {
            const double *top = out.row(i - 1);
            // past the last source row the bilinear weights clamp to `top`
            const double *bot = i + 1 < luma_height ? out.row(i + 1) : top;
            double *o = out.row(i);
            for (int j = 0; j < luma_width; ++j)
                o[j] = 0.5 * (top[j] + bot[j]);
        }
        return out;
    }

    for (int i = 0; i < luma_height; ++i) {
        double fy = 0.5 * i;
        int y0 = static_cast<int>(fy);
        double wy = fy - y0;
        int y1 = std::min(y0 + 1, plane.height - 1);
        y0 = std::min(y0, plane.height - 1);
        for (int j = 0; j < luma_width; ++j) {
            double fx = 0.5 * j;
            int x0 = static_cast<int>(fx);
            double wx = fx - x0;
            int x1 = std::min(x0 + 1, plane.width - 1);
            x0 = std::min(x0, plane.width - 1);
            double top = (1.0 - wx) * plane.at(y0, x0) + wx * plane.at(y0, x1);
            double bot = (1.0 - wx) * plane.at(y1, x0) + wx * plane.at(y1, x1);
            out.at(i, j) = (1.0 - wy) * top + wy * bot;
        }
    }
    return out;
}

RgbFrame ycbcr_to_rgb(const Plane &y, const Plane &cb, const Plane &cr, Gamut gamut) {
    if (cb.width != y.width || cb.height != y.height || cr.width != y.width ||
        cr.height != y.height)
        throw DataError("ycbcr_to_rgb: planes must share dimensions");

    // BT.2020 / BT.709 non-constant-luminance inverse coefficients.
    double kr_cr, kg_cb, kg_cr, kb_cb;
    if (gamut == Gamut::Bt2020) {
        kr_cr = 1.4746;
        kg_cb = -0.16455;
        kg_cr = -0.57135;
        kb_cb = 1.8814;
    } else {
        kr_cr = 1.5748;
        kg_cb = -0.1873;
        kg_cr = -0.4681;
        kb_cb = 1.8556;
    }

    RgbFrame rgb{Plane(y.width, y.height, Channel::R), Plane(y.width, y.height, Channel::G),
                 Plane(y.width, y.height, Channel::B)};
    const size_t n = y.size();
    for (size_t i = 0; i < n; ++i) {
        double yy = y.data[i];
        double pb = cb.data[i] - 0.5;
        double pr = cr.data[i] - 0.5;
        rgb.r.data[i] = std::clamp(yy + kr_cr * pr, 0.0, 1.0);
        rgb.g.data[i] = std::clamp(yy + kg_cb * pb + kg_cr * pr, 0.0, 1.0);
        rgb.b.data[i] = std::clamp(yy + kb_cb * pb, 0.0, 1.0);
    }
    return rgb;
}

const char *channel_name(Channel c) {
    switch (c) {
    case Channel::Y:
        return "Y";
    case Channel::Cb:
        return "Cb";
    case Channel::Cr:
        return "Cr";
    case Channel::R:
        return "R";
    case Channel::G:
        return "G";
    case Channel::B:
        return "B";
    }
    return "?";
}

Y4mWriter::Y4mWriter(const std::string &path, int width, int height, int bit_depth)
    : out_(path, std::ios::binary), width_(width), height_(height), bit_depth_(bit_depth) {
    if (!out_)
        throw DataError("cannot create " + path);
    if (width % 2 || height % 2)
        throw DataError("Y4mWriter: 4:2:0 requires even dimensions");
    out_ << "YUV4MPEG2 W" << width << " H" << height << " F30:1 Ip A1:1 C420"
         << (bit_depth > 8 ? "p10" : "") << "\n";
}

void Y4mWriter::write_frame(const std::vector<uint16_t> &y, const std::vector<uint16_t> &cb,
                            const std::vector<uint16_t> &cr) {
    size_t luma = static_cast<size_t>(width_) * height_;
    size_t chroma = luma / 4;
    if (y.size() != luma || cb.size() != chroma || cr.size() != chroma)
        throw DataError("Y4mWriter: plane size mismatch");
    out_ << "FRAME\n";
    auto put = [&](const std::vector<uint16_t> &p) {
        if (bit_depth_ > 8) {
            out_.write(reinterpret_cast<const char *>(p.data()),
                       static_cast<std::streamsize>(p.size() * 2));
        } else {
            std::vector<uint8_t> narrow(p.size());
            for (size_t i = 0; i < p.size(); ++i)
                narrow[i] = static_cast<uint8_t>(std::min<uint16_t>(p[i], 255));
            out_.write(reinterpret_cast<const char *>(narrow.data()),
                       static_cast<std::streamsize>(narrow.size()));
        }
    };
    put(y);
    put(cb);
    put(cr);
    if (!out_)
        throw DataError("Y4mWriter: write failure");
}

} // namespace hdrvqa
