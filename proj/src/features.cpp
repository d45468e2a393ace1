#include "hdrvqa/features.hpp"
#include "hdrvqa/errors.hpp"
#include "hdrvqa/util.hpp"
#include "stream7.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <chrono>
#include <cstdio>

namespace hdrvqa {

namespace {

Plane plane_from(Array2D a, Channel ch, int scale_level, bool nonlinear) {
    Plane p;
    p.data = std::move(a.data);
    p.width = a.width;
    p.height = a.height;
    p.channel = ch;
    p.scale_level = scale_level;
    p.nonlinear = nonlinear;
    return p;
}

// Lane-split accumulators: eight independent partial sums per statistic keep
// the inner loops free of cross-iteration dependences, so the fixed-width
// inner blocks vectorize. Lane layout is fixed, so results are deterministic
// for a given input.
struct AggdLanes {
    double abs_[8] = {}, sq_[8] = {}, nsq_[8] = {}, ncnt_[8] = {};
    size_t n = 0;

    // accumulate products a[j] * b[j]; positive-side sums follow from the
    // totals, so only the negative side is tracked. The running sums live in
    // stack locals during the loop: store-to-member in the body would force
    // aliasing checks that block vectorization.
    __attribute__((noinline)) void add_products(const double *a, const double *b, int n_row) {
        double t_abs[8] = {}, t_sq[8] = {}, t_nsq[8] = {}, t_ncnt[8] = {};
        int j = 0;
        for (; j + 8 <= n_row; j += 8) {
            for (int k = 0; k < 8; ++k) {
                double v = a[j + k] * b[j + k];
                double s = v * v;
                double neg = v < 0.0 ? 1.0 : 0.0;
                t_abs[k] += std::fabs(v);
                t_sq[k] += s;
                t_nsq[k] += s * neg;
                t_ncnt[k] += neg;
            }
        }
        for (int k = 0; j < n_row && k < 8; ++j, ++k) {
            double v = a[j] * b[j];
            double s = v * v;
            double neg = v < 0.0 ? 1.0 : 0.0;
            t_abs[k] += std::fabs(v);
            t_sq[k] += s;
            t_nsq[k] += s * neg;
            t_ncnt[k] += neg;
        }
        for (int k = 0; k < 8; ++k) {
            abs_[k] += t_abs[k];
            sq_[k] += t_sq[k];
            nsq_[k] += t_nsq[k];
            ncnt_[k] += t_ncnt[k];
        }
        n += static_cast<size_t>(n_row);
    }
    AggdMoments moments() const {
        AggdMoments m;
        double ncnt = 0.0;
        for (int k = 0; k < 8; ++k) {
            m.sum_abs += abs_[k];
            m.sum_sq += sq_[k];
            m.sum_sq_neg += nsq_[k];
            ncnt += ncnt_[k];
        }
        m.sum_sq_pos = std::max(0.0, m.sum_sq - m.sum_sq_neg);
        m.n_neg = static_cast<size_t>(ncnt);
        m.n = n;
        m.n_pos = m.n - m.n_neg;
        return m;
    }
};

struct GgdLanes {
    double abs_[8] = {}, sq_[8] = {};
    double min_v = std::numeric_limits<double>::infinity();
    double max_v = -std::numeric_limits<double>::infinity();
    size_t n = 0;

    __attribute__((noinline)) void add_row(const double *x, int n_row) {
        int j = 0;
        for (; j + 8 <= n_row; j += 8) {
            for (int k = 0; k < 8; ++k) {
                double v = x[j + k];
                abs_[k] += std::fabs(v);
                sq_[k] += v * v;
            }
        }
        for (int k = 0; j < n_row && k < 8; ++j, ++k) {
            double v = x[j];
            abs_[k] += std::fabs(v);
            sq_[k] += v * v;
        }
        // extrema only guard the all-equal degenerate case; a scalar sweep
        // with two alternating chains is cheap enough
        double mn0 = min_v, mn1 = min_v, mx0 = max_v, mx1 = max_v;
        int i = 0;
        for (; i + 2 <= n_row; i += 2) {
            mn0 = std::min(mn0, x[i]);
            mx0 = std::max(mx0, x[i]);
            mn1 = std::min(mn1, x[i + 1]);
            mx1 = std::max(mx1, x[i + 1]);
        }
        if (i < n_row) {
            mn0 = std::min(mn0, x[i]);
            mx0 = std::max(mx0, x[i]);
        }
        min_v = std::min(mn0, mn1);
        max_v = std::max(mx0, mx1);
        n += static_cast<size_t>(n_row);
    }
    GgdMoments moments() const {
        GgdMoments m;
        m.n = n;
        for (int k = 0; k < 8; ++k) {
            m.sum_abs += abs_[k];
            m.sum_sq += sq_[k];
        }
        m.min_v = min_v;
        m.max_v = max_v;
        return m;
    }
};

__attribute__((noinline)) void mscn_row(const double *v, const double *mu, const double *sig,
                                        double c, double *row, int w) {
    for (int j = 0; j < w; ++j)
        row[j] = (v[j] - mu[j]) / (sig[j] + c);
}

// GGD + four paired-product AGGD fits of one scale's MSCN field, computed in
// a single streaming pass: convolution ring -> MSCN row -> moment lanes.
// Neither the stats nor the MSCN field is materialized.
std::array<double, 18> scale_features18(const Plane &plane, double c,
                                        std::vector<std::string> *warnings) {
    const int w = plane.width;
    GgdLanes ggd_lanes;
    AggdLanes prod_lanes[4]; // H, V, D1, D2
    std::vector<double> prev(w), cur(w);
    bool have_prev = false;


    static thread_local double t_mscn = 0, t_ggd = 0, t_prod = 0;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto el = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
    detail::streamed_local_stats(plane, [&](int i, const double *mu, const double *sig) {
        const double *v = plane.row(i);
        double *row = cur.data();
        auto a0 = now();
        mscn_row(v, mu, sig, c, row, w);
        auto a1 = now(); t_mscn += el(a0, a1);
        ggd_lanes.add_row(row, w);
        auto a2 = now(); t_ggd += el(a1, a2);
        prod_lanes[0].add_products(row, row + 1, w - 1);
        if (have_prev) {
            const double *p = prev.data();
            prod_lanes[1].add_products(p, row, w);          // vertical
            prod_lanes[2].add_products(p, row + 1, w - 1);  // main diagonal
            prod_lanes[3].add_products(p + 1, row, w - 1);  // anti diagonal
        }
        auto a3 = now(); t_prod += el(a2, a3);
        std::swap(prev, cur);
        have_prev = true;
    });
    if (plane.width > 2000) fprintf(stderr, "mscn %.3f ggd %.3f prod %.3f\n", t_mscn, t_ggd, t_prod);

    GgdMoments ggd = ggd_lanes.moments();
    AggdMoments prod[4];
    for (int p = 0; p < 4; ++p)
        prod[p] = prod_lanes[p].moments();

    std::array<double, 18> out{};
    auto warn = [&](const char *what, const std::exception &e) {
        if (warnings)
            warnings->push_back(std::string(channel_name(plane.channel)) +
                                (plane.nonlinear ? "(nl)" : "") + " scale" +
                                std::to_string(plane.scale_level) + " " + what +
                                " zeroed: " + e.what());
    };
    try {
        GgdFit g = ggd.fit();
        out[0] = g.alpha;
        out[1] = g.sigma2;
    } catch (const std::invalid_argument &e) {
        warn("ggd", e);
    }
    for (int p = 0; p < 4; ++p) {
        try {
            AggdFit a = prod[p].fit();
            out[2 + 4 * p + 0] = a.nu;
            out[2 + 4 * p + 1] = a.eta;
            out[2 + 4 * p + 2] = a.sigma_l2;
            out[2 + 4 * p + 3] = a.sigma_r2;
        } catch (const std::invalid_argument &e) {
            warn("aggd", e);
        }
    }
    return out;
}

std::array<double, 36> features36_pair(const Plane &full, const Plane &half, double c,
                                       std::vector<std::string> *warnings) {
    std::array<double, 36> out{};
    std::array<double, 18> s0 = scale_features18(full, c, warnings);
    std::array<double, 18> s1 = scale_features18(half, c, warnings);
    std::copy(s0.begin(), s0.end(), out.begin());
    std::copy(s1.begin(), s1.end(), out.begin() + 18);
    return out;
}

// Incremental temporal filtering + non-overlapping volume grouping + per
// volume chip features. push() consumes one gradient-MSCN field per frame.
class ChipStream {
  public:
    ChipStream(const ChipConfig &cfg, std::vector<double> taps)
        : cfg_(cfg), taps_(std::move(taps)) {}

    void push(const Array2D &raw) {
        partials_.emplace_back(Array2D(raw.width, raw.height));
        const size_t k = taps_.size();
        const size_t n = raw.data.size();
        // raw frame j feeds filtered i = j-k+1 .. j with tap index i+k-1-j
        for (size_t p = 0; p < partials_.size(); ++p) {
            size_t tap_idx = k - partials_.size() + p;
            double tap = taps_[tap_idx];
            if (tap != 0.0) {
                double *dst = partials_[p].data.data();
                const double *src = raw.data.data();
                for (size_t q = 0; q < n; ++q)
                    dst[q] += tap * src[q];
            }
        }
        if (partials_.size() == k) {
            volume_.push_back(std::move(partials_.front()));
            partials_.pop_front();
            if (static_cast<int>(volume_.size()) == cfg_.temporal_extent) {
                blocks18_.push_back(
                    chip_volume_features(std::span<const Array2D>(volume_), cfg_, &warnings_));
                volume_.clear();
            }
        }
    }

    const std::vector<std::array<double, 18>> &blocks() const { return blocks18_; }
    const std::vector<std::string> &warnings() const { return warnings_; }

  private:
    ChipConfig cfg_;
    std::vector<double> taps_;
    std::deque<Array2D> partials_;
    std::vector<Array2D> volume_;
    std::vector<std::array<double, 18>> blocks18_;
    std::vector<std::string> warnings_;
};

struct FrameOutput {
    std::array<double, 144> invariant{}; // [luma 36 | R'G'B' 108]
    std::array<double, 144> nonlinear{}; // [nl luma 36 | nl R'G'B' 108]
    Array2D grad_mscn_s0;
    Array2D grad_mscn_s1;
    std::vector<std::string> warnings;
};

FrameOutput compute_frame(const VideoSource &src, int k, const FeatureConfig &cfg,
                          bool want_invariant, bool want_nonlinear) {
    FrameOutput out;
    YCbCrFrame f = read_frame(src, k);

    Plane cb = f.cb.width == f.y.width && f.cb.height == f.y.height
                   ? std::move(f.cb)
                   : upsample_chroma(f.cb, f.y.width, f.y.height);
    Plane cr = f.cr.width == f.y.width && f.cr.height == f.y.height
                   ? std::move(f.cr)
                   : upsample_chroma(f.cr, f.y.width, f.y.height);
    RgbFrame rgb = ycbcr_to_rgb(f.y, cb, cr, src.gamut);
    cb = Plane();
    cr = Plane();

    const Plane *channels[4] = {&f.y, &rgb.r, &rgb.g, &rgb.b};
    for (int c = 0; c < 4; ++c) {
        const Plane &p = *channels[c];
        Plane half = downscale2(p);
        if (want_invariant) {
            std::array<double, 36> blk =
                features36_pair(p, half, kStabilizerLinear, &out.warnings);
            std::copy(blk.begin(), blk.end(), out.invariant.begin() + 36 * c);
            if (c == 0) { // gradient chips ride on luma
                out.grad_mscn_s0 =
                    mscn(plane_from(gradient_magnitude(p), Channel::Y, 0, false),
                         kStabilizerLinear)
                        .data;
                out.grad_mscn_s1 =
                    mscn(plane_from(gradient_magnitude(half), Channel::Y, 1, false),
                         kStabilizerLinear)
                        .data;
            }
        }
        if (want_nonlinear) {
            Plane sens = hdr_sensitize(p, cfg.nl);
            Plane sens_half = downscale2(sens);
            std::array<double, 36> blk =
                features36_pair(sens, sens_half, kStabilizerNonlinear, &out.warnings);
            std::copy(blk.begin(), blk.end(), out.nonlinear.begin() + 36 * c);
        }
    }
    return out;
}

} // namespace

const std::vector<FeatureBlock> &feature_layout() {
    static const std::vector<FeatureBlock> layout = {
        {"luma", 0, 36},
        {"luma_nl", 36, 72},
        {"rgb", 72, 180},
        {"rgb_nl", 180, 288},
        {"std_luma", 288, 324},
        {"std_luma_nl", 324, 360},
        {"std_rgb", 360, 468},
        {"std_rgb_nl", 468, 576},
        {"st_chips", 576, 612},
    };
    return layout;
}

void verify_layout() {
    const auto &blocks = feature_layout();
    int pos = 0;
    for (const FeatureBlock &b : blocks) {
        if (b.begin != pos || b.end <= b.begin)
            throw std::logic_error("feature layout drift at block " + b.name);
        pos = b.end;
    }
    if (pos != kVideoFeatureCount)
        throw std::logic_error("feature layout does not cover 612 indices");
    // spot-check the fixed boundaries
    if (blocks[1].begin != 36 || blocks[2].begin != 72 || blocks[3].begin != 180 ||
        blocks[4].begin != 288 || blocks[8].begin != 576)
        throw std::logic_error("feature layout block boundaries moved");
}

std::array<double, 36> channel_features36(const Plane &plane, double c,
                                          std::vector<std::string> *warnings) {
    if (plane.scale_level != 0)
        throw std::invalid_argument("channel_features36: plane must be at scale 0");
    return features36_pair(plane, downscale2(plane), c, warnings);
}

FrameFeatures frame_features(const Plane &y, const Plane &cb, const Plane &cr, Gamut gamut,
                             const FeatureConfig &cfg, std::vector<std::string> *warnings) {
    Plane cbf = cb.width == y.width && cb.height == y.height
                    ? cb
                    : upsample_chroma(cb, y.width, y.height);
    Plane crf = cr.width == y.width && cr.height == y.height
                    ? cr
                    : upsample_chroma(cr, y.width, y.height);
    RgbFrame rgb = ycbcr_to_rgb(y, cbf, crf, gamut);

    FrameFeatures out;
    const Plane *channels[4] = {&y, &rgb.r, &rgb.g, &rgb.b};
    // layout: [luma 36 | nl luma 36 | R'G'B' 108 | nl R'G'B' 108]
    for (int c = 0; c < 4; ++c) {
        std::array<double, 36> lin = channel_features36(*channels[c], kStabilizerLinear, warnings);
        std::array<double, 36> sens =
            channel_features36(hdr_sensitize(*channels[c], cfg.nl), kStabilizerNonlinear, warnings);
        int lin_off = c == 0 ? 0 : 72 + 36 * (c - 1);
        int nl_off = c == 0 ? 36 : 180 + 36 * (c - 1);
        std::copy(lin.begin(), lin.end(), out.values.begin() + lin_off);
        std::copy(sens.begin(), sens.end(), out.values.begin() + nl_off);
    }
    return out;
}

FeatureVector pool_video(std::span<const FrameFeatures> frames,
                         std::span<const std::array<double, 36>> chip_blocks,
                         std::vector<std::string> *warnings) {
    if (frames.empty())
        throw std::invalid_argument("pool_video: no frames");
    const size_t n = frames.size();
    FeatureVector out;

    // Means are accumulated in sorted order so the result depends only on the
    // multiset of per-frame values, not on frame arrival order.
    std::vector<double> column(n);
    for (int j = 0; j < kFrameFeatureCount; ++j) {
        for (size_t i = 0; i < n; ++i)
            column[i] = frames[i].values[j];
        out.values[j] = sorted_sum(column) / static_cast<double>(n);
    }

    const size_t windows = n / kStdPoolWindow;
    if (windows == 0) {
        if (warnings)
            warnings->push_back("fewer than 5 frames: std-pooled block zeroed");
    } else {
        for (int j = 0; j < kFrameFeatureCount; ++j) {
            double acc = 0.0;
            for (size_t wnd = 0; wnd < windows; ++wnd) {
                double lo = frames[wnd * kStdPoolWindow].values[j], hi = lo, m = 0.0;
                for (int t = 0; t < kStdPoolWindow; ++t) {
                    double x = frames[wnd * kStdPoolWindow + t].values[j];
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                    m += x;
                }
                if (hi == lo)
                    continue; // constant window: population std is exactly 0
                m /= kStdPoolWindow;
                double var = 0.0;
                for (int t = 0; t < kStdPoolWindow; ++t) {
                    double d = frames[wnd * kStdPoolWindow + t].values[j] - m;
                    var += d * d;
                }
                acc += std::sqrt(var / kStdPoolWindow);
            }
            out.values[kFrameFeatureCount + j] = acc / static_cast<double>(windows);
        }
    }

    if (chip_blocks.empty()) {
        if (warnings)
            warnings->push_back("no complete chip volume: chip block zeroed");
    } else {
        for (int j = 0; j < 36; ++j) {
            double acc = 0.0;
            for (const auto &blk : chip_blocks)
                acc += blk[j];
            out.values[2 * kFrameFeatureCount + j] = acc / static_cast<double>(chip_blocks.size());
        }
    }
    return out;
}

VideoIntermediates extract_intermediates(const VideoSource &src, const FeatureConfig &cfg,
                                         bool invariant_blocks, bool nonlinear_blocks) {
    VideoIntermediates out;
    out.frame_count = src.frame_count;
    ChipStream chips_s0(cfg.chips, cfg.temporal_taps);
    ChipStream chips_s1(cfg.chips, cfg.temporal_taps);

    const int jobs = std::max(1, cfg.jobs);
    std::vector<FrameOutput> batch(jobs);
    for (int k0 = 0; k0 < src.frame_count; k0 += jobs) {
        int count = std::min(jobs, src.frame_count - k0);
        if (count == 1) {
            batch[0] = compute_frame(src, k0, cfg, invariant_blocks, nonlinear_blocks);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(count);
            pool.reserve(count);
            for (int t = 0; t < count; ++t)
                pool.emplace_back([&, t] {
                    try {
                        batch[t] = compute_frame(src, k0 + t, cfg, invariant_blocks,
                                                 nonlinear_blocks);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            for (auto &th : pool)
                th.join();
            for (auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
        }
        // reduce strictly in frame order
        for (int t = 0; t < count; ++t) {
            FrameOutput &fo = batch[t];
            if (invariant_blocks) {
                out.invariant.push_back(fo.invariant);
                chips_s0.push(fo.grad_mscn_s0);
                chips_s1.push(fo.grad_mscn_s1);
            }
            if (nonlinear_blocks)
                out.nonlinear.push_back(fo.nonlinear);
            for (auto &w : fo.warnings)
                out.warnings.push_back("frame " + std::to_string(k0 + t) + ": " + w);
            fo = FrameOutput(); // release plane memory promptly
        }
    }

    if (invariant_blocks) {
        const auto &b0 = chips_s0.blocks();
        const auto &b1 = chips_s1.blocks();
        for (size_t v = 0; v < b0.size() && v < b1.size(); ++v) {
            std::array<double, 36> blk{};
            std::copy(b0[v].begin(), b0[v].end(), blk.begin());
            std::copy(b1[v].begin(), b1[v].end(), blk.begin() + 18);
            out.chip_blocks.push_back(blk);
        }
        for (const auto &w : chips_s0.warnings())
            out.warnings.push_back("chips scale0: " + w);
        for (const auto &w : chips_s1.warnings())
            out.warnings.push_back("chips scale1: " + w);
    }
    return out;
}

FeatureVector pool_intermediates(const VideoIntermediates &inv, const VideoIntermediates &nl,
                                 const std::string &video_id,
                                 std::vector<std::string> *warnings) {
    if (inv.invariant.size() != nl.nonlinear.size())
        throw DataError("pool_intermediates: frame counts differ between block families");
    std::vector<FrameFeatures> frames(inv.invariant.size());
    for (size_t i = 0; i < frames.size(); ++i) {
        frames[i].frame_index = static_cast<int>(i);
        auto &v = frames[i].values;
        std::copy_n(inv.invariant[i].begin(), 36, v.begin());
        std::copy_n(nl.nonlinear[i].begin(), 36, v.begin() + 36);
        std::copy_n(inv.invariant[i].begin() + 36, 108, v.begin() + 72);
        std::copy_n(nl.nonlinear[i].begin() + 36, 108, v.begin() + 180);
    }
    FeatureVector fv = pool_video(frames, inv.chip_blocks, warnings);
    fv.video_id = video_id;
    return fv;
}

ExtractResult extract_video(const VideoSource &src, const FeatureConfig &cfg,
                            const std::string &video_id) {
    ExtractResult res;
    VideoIntermediates mid = extract_intermediates(src, cfg, true, true);
    res.warnings = mid.warnings;
    res.features = pool_intermediates(mid, mid, video_id, &res.warnings);
    return res;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

double parse_double(const std::string &s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw DataError("bad numeric field '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

void write_features_csv(const std::string &path, std::span<const FeatureVector> rows) {
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot create " + path);
    f << "video_id,layout_version";
    for (int j = 1; j <= kVideoFeatureCount; ++j)
        f << ",f" << j;
    f << "\n";
    for (const FeatureVector &r : rows) {
        f << r.video_id << "," << r.layout_version;
        for (double v : r.values)
            f << "," << fmt_double(v);
        f << "\n";
    }
    if (!f)
        throw DataError("write failure on " + path);
}

std::vector<FeatureVector> read_features_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line))
        throw DataError(path + ": empty feature file");
    auto header = split_csv_line(line);
    if (header.size() != static_cast<size_t>(kVideoFeatureCount) + 2 ||
        header[0] != "video_id" || header[1] != "layout_version")
        throw DataError(path + ": unexpected feature header");
    std::vector<FeatureVector> rows;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ": row with wrong field count");
        FeatureVector fv;
        fv.video_id = cells[0];
        fv.layout_version = cells[1];
        for (int j = 0; j < kVideoFeatureCount; ++j)
            fv.values[j] = parse_double(cells[2 + j]);
        rows.push_back(std::move(fv));
    }
    return rows;
}

std::vector<ScoreRecord> read_scores_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line))
        throw DataError(path + ": empty scores file");
    auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "video_id" || header[1] != "content_id" ||
        header[2] != "mos")
        throw DataError(path + ": expected header video_id,content_id,mos");
    std::vector<ScoreRecord> rows;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 3)
            throw DataError(path + ": row with wrong field count");
        rows.push_back({cells[0], cells[1], parse_double(cells[2])});
    }
    return rows;
}

void write_scores_csv(const std::string &path, std::span<const ScoreRecord> rows) {
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot create " + path);
    f << "video_id,content_id,mos\n";
    for (const ScoreRecord &r : rows)
        f << r.video_id << "," << r.content_id << "," << fmt_double(r.mos) << "\n";
    if (!f)
        throw DataError("write failure on " + path);
}

} // namespace hdrvqa
