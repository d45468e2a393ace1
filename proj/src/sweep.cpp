#include "hdrvqa/sweep.hpp"
#include "hdrvqa/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hdrvqa {

namespace {

namespace fs = std::filesystem;

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

uint64_t fnv1a_update(uint64_t h, const void *data, size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

uint64_t fnv1a_string(const std::string &s) {
    return fnv1a_update(kFnvOffset, s.data(), s.size());
}

std::string fmt_value(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string taps_key(const std::vector<double> &taps) {
    std::string s;
    for (double t : taps)
        s += fmt_value(t) + ";";
    return s;
}

// Knob subsets that invalidate each block family.
std::string invariant_key(const VideoSource &src, const FeatureConfig &cfg) {
    std::ostringstream os;
    os << "inv|" << kLayoutVersion << "|gamut=" << (src.gamut == Gamut::Bt2020 ? "bt2020" : "bt709")
       << "|range=" << (src.range == SampleRange::Limited ? "limited" : "full")
       << "|chips=" << cfg.chips.temporal_extent << "," << cfg.chips.chip_size << ","
       << cfg.chips.num_angles << "," << (cfg.chips.abs_kurtosis ? "abs" : "signed")
       << "|taps=" << taps_key(cfg.temporal_taps);
    return os.str();
}

std::string nonlinear_key(const VideoSource &src, const FeatureConfig &cfg) {
    std::ostringstream os;
    os << "nl|" << kLayoutVersion << "|gamut=" << (src.gamut == Gamut::Bt2020 ? "bt2020" : "bt709")
       << "|range=" << (src.range == SampleRange::Limited ? "limited" : "full")
       << "|delta=" << fmt_value(cfg.nl.delta) << "|window=" << cfg.nl.window;
    return os.str();
}

constexpr uint32_t kCacheMagic = 0x43515648; // "HVQC"
constexpr uint32_t kCacheVersion = 1;

void write_cache(const std::string &path, const VideoIntermediates &mid, bool invariant) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot create cache file " + path);
    auto put32 = [&](uint32_t v) { f.write(reinterpret_cast<const char *>(&v), 4); };
    put32(kCacheMagic);
    put32(kCacheVersion);
    put32(invariant ? 1u : 0u);
    const auto &rows = invariant ? mid.invariant : mid.nonlinear;
    put32(static_cast<uint32_t>(rows.size()));
    for (const auto &r : rows)
        f.write(reinterpret_cast<const char *>(r.data()), sizeof(double) * r.size());
    if (invariant) {
        put32(static_cast<uint32_t>(mid.chip_blocks.size()));
        for (const auto &b : mid.chip_blocks)
            f.write(reinterpret_cast<const char *>(b.data()), sizeof(double) * b.size());
    }
    if (!f)
        throw DataError("write failure on cache file " + path);
}

bool read_cache(const std::string &path, VideoIntermediates &mid, bool invariant) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        return false;
    auto get32 = [&]() {
        uint32_t v = 0;
        f.read(reinterpret_cast<char *>(&v), 4);
        return v;
    };
    if (get32() != kCacheMagic || get32() != kCacheVersion)
        return false;
    bool is_inv = get32() == 1u;
    if (is_inv != invariant)
        return false;
    uint32_t n = get32();
    auto &rows = invariant ? mid.invariant : mid.nonlinear;
    rows.resize(n);
    for (auto &r : rows)
        f.read(reinterpret_cast<char *>(r.data()), sizeof(double) * r.size());
    if (invariant) {
        uint32_t nv = get32();
        mid.chip_blocks.resize(nv);
        for (auto &b : mid.chip_blocks)
            f.read(reinterpret_cast<char *>(b.data()), sizeof(double) * b.size());
    }
    mid.frame_count = static_cast<int>(n);
    return static_cast<bool>(f);
}

std::string cache_path(const std::string &cache_dir, const std::string &video_id,
                       uint64_t file_hash, const std::string &knob_key, const char *kind) {
    uint64_t h = file_hash ^ fnv1a_string(knob_key);
    std::ostringstream os;
    os << cache_dir << "/" << video_id << "." << std::hex << h << "." << kind << ".bin";
    return os.str();
}

} // namespace

uint64_t fnv1a_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot open " + path);
    uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof(buf));
        std::streamsize got = f.gcount();
        if (got > 0)
            h = fnv1a_update(h, buf, static_cast<size_t>(got));
    }
    return h;
}

std::vector<FeatureVector> sweep_extract_features(std::span<const SweepVideo> videos,
                                                  const FeatureConfig &cfg,
                                                  const std::string &cache_dir,
                                                  std::vector<std::string> *warnings) {
    fs::create_directories(cache_dir);
    std::vector<FeatureVector> out;
    for (const SweepVideo &v : videos) {
        VideoSource src = open_video(v.path, v.params);
        uint64_t file_hash = fnv1a_file(v.path);

        VideoIntermediates inv;
        std::string inv_path =
            cache_path(cache_dir, v.video_id, file_hash, invariant_key(src, cfg), "inv");
        if (!read_cache(inv_path, inv, true)) {
            inv = extract_intermediates(src, cfg, true, false);
            if (warnings)
                for (const auto &w : inv.warnings)
                    warnings->push_back(v.video_id + ": " + w);
            write_cache(inv_path, inv, true);
        }

        VideoIntermediates nl;
        std::string nl_path =
            cache_path(cache_dir, v.video_id, file_hash, nonlinear_key(src, cfg), "nl");
        if (!read_cache(nl_path, nl, false)) {
            nl = extract_intermediates(src, cfg, false, true);
            if (warnings)
                for (const auto &w : nl.warnings)
                    warnings->push_back(v.video_id + ": " + w);
            write_cache(nl_path, nl, false);
        }

        out.push_back(pool_intermediates(inv, nl, v.video_id, warnings));
    }
    return out;
}

std::vector<SweepRow> sweep_parameter(const std::string &param, std::span<const double> values,
                                      std::span<const SweepVideo> videos,
                                      std::span<const ScoreRecord> scores,
                                      const FeatureConfig &base_cfg,
                                      const ProtocolOptions &protocol,
                                      const std::string &cache_dir) {
    if (param != "delta" && param != "window")
        throw DataError("sweep: param must be delta or window");
    if (values.empty())
        throw DataError("sweep: no values given");

    std::vector<SweepRow> rows;
    for (double value : values) {
        FeatureConfig cfg = base_cfg;
        SweepRow row;
        row.value = value;
        if (param == "delta") {
            if (value <= 0.0)
                throw DataError("sweep: delta must be positive");
            cfg.nl.delta = value;
            row.label = fmt_value(value);
        } else {
            int w = static_cast<int>(value);
            if (w != value || w < 0 || (w != 0 && (w % 2 == 0 || w < 3)))
                throw DataError("sweep: window must be 0 (global) or an odd integer >= 3");
            cfg.nl.window = w;
            row.label = w == 0 ? "Global" : fmt_value(value);
        }
        std::vector<FeatureVector> feats = sweep_extract_features(videos, cfg, cache_dir);
        row.report = run_protocol(feats, scores, protocol);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(const std::string &path, const std::string &param,
                     std::span<const SweepRow> rows) {
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot create " + path);
    f << param << ",median_srocc,std_srocc,median_lcc,std_lcc,median_rmse,std_rmse\n";
    for (const SweepRow &r : rows) {
        f << r.label << "," << fmt_value(r.report.median_srocc) << ","
          << fmt_value(r.report.std_srocc) << "," << fmt_value(r.report.median_lcc) << ","
          << fmt_value(r.report.std_lcc) << "," << fmt_value(r.report.median_rmse) << ","
          << fmt_value(r.report.std_rmse) << "\n";
    }
    if (!f)
        throw DataError("write failure on " + path);
}

} // namespace hdrvqa
