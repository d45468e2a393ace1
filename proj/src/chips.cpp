#include "hdrvqa/chips.hpp"
#include "hdrvqa/errors.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hdrvqa {

namespace {

// Raw moment accumulator up to order 4; central moments on demand.
struct Moments4 {
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    size_t n = 0;

    void add(double x) {
        double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        ++n;
    }
    double mean() const { return n ? s1 / n : 0.0; }
    double var() const {
        if (!n)
            return 0.0;
        double m = mean();
        double v = s2 / n - m * m;
        return v > 0.0 ? v : 0.0;
    }
    double m4() const { // central fourth moment
        if (!n)
            return 0.0;
        double m = mean();
        return s4 / n - 4.0 * m * s3 / n + 6.0 * m * m * s2 / n - 3.0 * m * m * m * m;
    }
    double excess_kurtosis() const {
        double v = var();
        if (v <= 0.0)
            return 0.0;
        return m4() / (v * v) - 3.0;
    }
};

struct SweepGeometry {
    std::vector<double> angles;
    std::vector<std::vector<std::pair<int, int>>> offsets; // per angle, per frame
};

SweepGeometry make_geometry(const ChipConfig &cfg) {
    SweepGeometry g;
    for (int a = 0; a < cfg.num_angles; ++a) {
        double theta = a * std::numbers::pi / cfg.num_angles;
        g.angles.push_back(theta);
        g.offsets.push_back(chip_offsets(theta, cfg.temporal_extent));
    }
    return g;
}

bool block_in_frame(int bx, int by, int s, int w, int h,
                    const std::vector<std::pair<int, int>> &offsets) {
    for (const auto &[dx, dy] : offsets) {
        if (bx + dx < 0 || by + dy < 0 || bx + s + dx > w || by + s + dy > h)
            return false;
    }
    return true;
}

// Visit every kept block in row-major order and each of its T slices in time
// order, handing the caller one slice row at a time.
template <typename Fn>
void for_each_slice_row(std::span<const Array2D> volume, int chip_size,
                        const std::vector<std::pair<int, int>> &offsets, Fn &&fn) {
    const int w = volume[0].width, h = volume[0].height;
    const int s = chip_size;
    for (int by = 0; by + s <= h; by += s) {
        for (int bx = 0; bx + s <= w; bx += s) {
            if (!block_in_frame(bx, by, s, w, h, offsets))
                continue;
            for (size_t t = 0; t < volume.size(); ++t) {
                const auto &[dx, dy] = offsets[t];
                for (int i = 0; i < s; ++i) {
                    const double *row = volume[t].data.data() +
                                        static_cast<size_t>(by + dy + i) * w + (bx + dx);
                    fn(row);
                }
            }
        }
    }
}

// GGD moments of the slice plus the four paired-product moment sets,
// products taken within the slice grid.
void accumulate_slice(const double *sl, int s, GgdMoments &ggd, AggdMoments prod[4]) {
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            double v = sl[i * s + j];
            ggd.add(v);
            if (j + 1 < s)
                prod[0].add(v * sl[i * s + j + 1]);
            if (i + 1 < s) {
                prod[1].add(v * sl[(i + 1) * s + j]);
                if (j + 1 < s)
                    prod[2].add(v * sl[(i + 1) * s + j + 1]);
                if (j > 0)
                    prod[3].add(v * sl[(i + 1) * s + j - 1]);
            }
        }
    }
}

std::array<double, 18> features_from_moments(const GgdMoments &ggd, const AggdMoments prod[4]) {
    std::array<double, 18> out{};
    GgdFit g = ggd.fit();
    out[0] = g.alpha;
    out[1] = g.sigma2;
    for (int p = 0; p < 4; ++p) {
        AggdFit a = prod[p].fit();
        out[2 + 4 * p + 0] = a.nu;
        out[2 + 4 * p + 1] = a.eta;
        out[2 + 4 * p + 2] = a.sigma_l2;
        out[2 + 4 * p + 3] = a.sigma_r2;
    }
    return out;
}

// Fill per-angle statistics and return the index of the selected direction,
// or -1 when no sweep fits.
int select_angle(std::span<const Array2D> volume, const ChipConfig &cfg,
                 const SweepGeometry &geo, ChipSampleSet &set) {
    const int s = cfg.chip_size;
    const int w = volume[0].width, h = volume[0].height;
    const size_t n_angles = geo.angles.size();

    // Pooled kurtosis over a whole tiling is the same for every sweep
    // direction (each sweep revisits the same voxels), so the criterion
    // aggregates per-chip excess kurtosis, which responds to how a chip
    // mixes content along its own sweep. Pooled sums are recovered by
    // aggregating the per-chip sums.
    std::vector<Moments4> pooled(n_angles);
    std::vector<double> chip_excess_sum(n_angles, 0.0);
    std::vector<size_t> chips(n_angles, 0);

    // block-major: all angles visit one block region while it is cache-hot;
    // each chip is staged into a contiguous buffer so the moment sums run as
    // four lane-split vectorizable streams
    std::vector<double> chipbuf(static_cast<size_t>(volume.size()) * s * s);
    for (int by = 0; by + s <= h; by += s) {
        for (int bx = 0; bx + s <= w; bx += s) {
            for (size_t a = 0; a < n_angles; ++a) {
                const auto &offsets = geo.offsets[a];
                if (!block_in_frame(bx, by, s, w, h, offsets))
                    continue;
                double *dst = chipbuf.data();
                for (size_t t = 0; t < volume.size(); ++t) {
                    const auto &[dx, dy] = offsets[t];
                    for (int i = 0; i < s; ++i) {
                        const double *row = volume[t].data.data() +
                                            static_cast<size_t>(by + dy + i) * w +
                                            (bx + dx);
                        std::memcpy(dst, row, sizeof(double) * s);
                        dst += s;
                    }
                }
                const size_t cn = chipbuf.size();
                double l1[8] = {}, l2[8] = {}, l3[8] = {}, l4[8] = {};
                size_t q = 0;
                for (; q + 8 <= cn; q += 8) {
                    for (int k = 0; k < 8; ++k) {
                        double x = chipbuf[q + k];
                        double x2 = x * x;
                        l1[k] += x;
                        l2[k] += x2;
                        l3[k] += x2 * x;
                        l4[k] += x2 * x2;
                    }
                }
                for (int k = 0; q < cn && k < 8; ++q, ++k) {
                    double x = chipbuf[q];
                    double x2 = x * x;
                    l1[k] += x;
                    l2[k] += x2;
                    l3[k] += x2 * x;
                    l4[k] += x2 * x2;
                }
                Moments4 chip;
                for (int k = 0; k < 8; ++k) {
                    chip.s1 += l1[k];
                    chip.s2 += l2[k];
                    chip.s3 += l3[k];
                    chip.s4 += l4[k];
                }
                chip.n = cn;
                Moments4 &agg = pooled[a];
                agg.s1 += chip.s1;
                agg.s2 += chip.s2;
                agg.s3 += chip.s3;
                agg.s4 += chip.s4;
                agg.n += chip.n;
                if (chip.var() > 0.0) {
                    chip_excess_sum[a] += chip.excess_kurtosis();
                    ++chips[a];
                }
            }
        }
    }

    int best = -1;
    for (size_t a = 0; a < n_angles; ++a) {
        if (pooled[a].n == 0)
            continue; // sweep never fits for this angle
        set.per_angle_excess[a] = pooled[a].excess_kurtosis();
        double mean_chip_excess = chips[a] ? chip_excess_sum[a] / chips[a] : 0.0;
        set.per_angle_score[a] =
            cfg.abs_kurtosis ? std::fabs(mean_chip_excess) : mean_chip_excess;
        if (best < 0 || set.per_angle_score[a] < set.per_angle_score[best])
            best = static_cast<int>(a);
    }
    return best;
}

void validate_volume(std::span<const Array2D> volume, const ChipConfig &cfg) {
    if (volume.empty())
        throw std::invalid_argument("chips: empty volume");
    if (static_cast<int>(volume.size()) != cfg.temporal_extent)
        throw std::invalid_argument("chips: volume must hold temporal_extent fields");
    for (const Array2D &f : volume)
        if (f.width != volume[0].width || f.height != volume[0].height)
            throw std::invalid_argument("chips: field dimensions differ");
    if (cfg.chip_size < 2 || cfg.num_angles < 1)
        throw std::invalid_argument("chips: bad configuration");
}

} // namespace

std::vector<double> default_temporal_taps() {
    std::vector<double> t{-1.0, -2.0, 0.0, 2.0, 1.0};
    double norm = 0.0;
    for (double x : t)
        norm += x * x;
    norm = std::sqrt(norm);
    for (double &x : t)
        x /= norm;
    return t;
}

Array2D gradient_magnitude(const Plane &plane) {
    if (plane.width < 3 || plane.height < 3)
        throw std::invalid_argument("gradient_magnitude: plane must be at least 3x3");
    const int w = plane.width, h = plane.height;
    Array2D out(w, h);
    for (int i = 0; i < h; ++i) {
        const double *r0 = plane.row(reflect_index(i - 1, h));
        const double *r1 = plane.row(i);
        const double *r2 = plane.row(reflect_index(i + 1, h));
        double *o = out.data.data() + static_cast<size_t>(i) * w;
        for (int j = 0; j < w; ++j) {
            int jl = j > 0 ? j - 1 : 0;         // reflect: -1 -> 0
            int jr = j < w - 1 ? j + 1 : w - 1; // reflect: w -> w-1
            double gx = (r0[jr] + 2.0 * r1[jr] + r2[jr]) - (r0[jl] + 2.0 * r1[jl] + r2[jl]);
            double gy = (r2[jl] + 2.0 * r2[j] + r2[jr]) - (r0[jl] + 2.0 * r0[j] + r0[jr]);
            o[j] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

std::vector<Array2D> temporal_filter(std::span<const Array2D> fields,
                                     std::span<const double> taps) {
    const size_t k = taps.size();
    if (fields.size() < k)
        throw std::invalid_argument("temporal_filter: not enough fields buffered");
    double sum = 0.0;
    for (double t : taps)
        sum += t;
    if (std::fabs(sum) > 1e-9)
        throw std::invalid_argument("temporal_filter: taps must sum to zero");
    const int w = fields[0].width, h = fields[0].height;
    for (const Array2D &f : fields)
        if (f.width != w || f.height != h)
            throw std::invalid_argument("temporal_filter: field dimensions differ");

    std::vector<Array2D> out;
    out.reserve(fields.size() - k + 1);
    const size_t n = static_cast<size_t>(w) * h;
    for (size_t i = 0; i + k <= fields.size(); ++i) {
        Array2D acc(w, h);
        for (size_t j = 0; j < k; ++j) {
            const double tap = taps[j];
            if (tap == 0.0)
                continue;
            const double *src = fields[i + k - 1 - j].data.data();
            double *dst = acc.data.data();
            for (size_t p = 0; p < n; ++p)
                dst[p] += tap * src[p];
        }
        out.push_back(std::move(acc));
    }
    return out;
}

std::vector<std::pair<int, int>> chip_offsets(double angle, int temporal_extent) {
    std::vector<std::pair<int, int>> off(temporal_extent);
    double mid = 0.5 * (temporal_extent - 1);
    for (int t = 0; t < temporal_extent; ++t) {
        double d = t - mid;
        off[t] = {static_cast<int>(std::lround(d * std::cos(angle))),
                  static_cast<int>(std::lround(d * std::sin(angle)))};
    }
    return off;
}

ChipSampleSet extract_chips(std::span<const Array2D> volume, const ChipConfig &cfg) {
    validate_volume(volume, cfg);
    SweepGeometry geo = make_geometry(cfg);

    ChipSampleSet set;
    set.chip_size = cfg.chip_size;
    set.per_angle_excess.assign(geo.angles.size(), 0.0);
    set.per_angle_score.assign(geo.angles.size(), std::numeric_limits<double>::infinity());

    int best = select_angle(volume, cfg, geo, set);
    if (best < 0)
        throw DataError("extract_chips: volume smaller than the chip footprint");

    set.chosen_angle = geo.angles[best];
    set.excess_kurtosis = set.per_angle_excess[best];
    for_each_slice_row(volume, cfg.chip_size, geo.offsets[best], [&](const double *row) {
        set.samples.insert(set.samples.end(), row, row + cfg.chip_size);
    });
    return set;
}

std::array<double, 18> chip_scale_features(const ChipSampleSet &set,
                                           std::vector<std::string> *warnings) {
    std::array<double, 18> out{};
    const int s = set.chip_size;
    const size_t per_slice = static_cast<size_t>(s) * s;
    try {
        if (set.samples.empty() || set.samples.size() % per_slice != 0)
            throw std::invalid_argument("bad sample layout");
        GgdMoments ggd;
        AggdMoments prod[4]; // H, V, D1, D2
        const size_t n_slices = set.samples.size() / per_slice;
        for (size_t b = 0; b < n_slices; ++b)
            accumulate_slice(set.samples.data() + b * per_slice, s, ggd, prod);
        out = features_from_moments(ggd, prod);
    } catch (const std::invalid_argument &e) {
        out.fill(0.0);
        if (warnings)
            warnings->push_back(std::string("chip features zeroed: ") + e.what());
    }
    return out;
}

std::array<double, 18> chip_volume_features(std::span<const Array2D> volume,
                                            const ChipConfig &cfg,
                                            std::vector<std::string> *warnings,
                                            double *chosen_angle) {
    validate_volume(volume, cfg);
    SweepGeometry geo = make_geometry(cfg);

    ChipSampleSet set;
    set.chip_size = cfg.chip_size;
    set.per_angle_excess.assign(geo.angles.size(), 0.0);
    set.per_angle_score.assign(geo.angles.size(), std::numeric_limits<double>::infinity());
    int best = select_angle(volume, cfg, geo, set);
    if (best < 0)
        throw DataError("chip features: volume smaller than the chip footprint");
    if (chosen_angle)
        *chosen_angle = geo.angles[best];

    std::array<double, 18> out{};
    try {
        GgdMoments ggd;
        AggdMoments prod[4];
        std::vector<double> slice(static_cast<size_t>(cfg.chip_size) * cfg.chip_size);
        int row_idx = 0;
        const int s = cfg.chip_size;
        for_each_slice_row(volume, s, geo.offsets[best], [&](const double *row) {
            std::copy(row, row + s, slice.data() + static_cast<size_t>(row_idx) * s);
            if (++row_idx == s) {
                accumulate_slice(slice.data(), s, ggd, prod);
                row_idx = 0;
            }
        });
        out = features_from_moments(ggd, prod);
    } catch (const std::invalid_argument &e) {
        out.fill(0.0);
        if (warnings)
            warnings->push_back(std::string("chip features zeroed: ") + e.what());
    }
    return out;
}

std::array<double, 36> chip_features36(const ChipSampleSet &full_scale,
                                       const ChipSampleSet &half_scale,
                                       std::vector<std::string> *warnings) {
    std::array<double, 36> out{};
    std::array<double, 18> a = chip_scale_features(full_scale, warnings);
    std::array<double, 18> b = chip_scale_features(half_scale, warnings);
    std::copy(a.begin(), a.end(), out.begin());
    std::copy(b.begin(), b.end(), out.begin() + 18);
    return out;
}

} // namespace hdrvqa
