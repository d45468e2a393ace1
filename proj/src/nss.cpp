#include "hdrvqa/nss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hdrvqa {

namespace {

constexpr double kShapeLo = 0.05;
constexpr double kShapeHi = 10.0;
constexpr double kShapeTol = 1e-9; // well under the 1e-4 contract; keeps
                                   // scale/sign properties of the fits tight
constexpr size_t kMinSamples = 100;

double lg(double x) { return std::lgamma(x); }

} // namespace

double ggd_moment_ratio(double alpha) {
    return std::exp(2.0 * lg(2.0 / alpha) - lg(1.0 / alpha) - lg(3.0 / alpha));
}

double solve_ggd_shape(double ratio, bool *clamped) {
    if (clamped)
        *clamped = false;
    double lo = kShapeLo, hi = kShapeHi;
    if (ratio <= ggd_moment_ratio(lo)) {
        if (clamped)
            *clamped = true;
        return lo;
    }
    if (ratio >= ggd_moment_ratio(hi)) {
        if (clamped)
            *clamped = true;
        return hi;
    }
    while (hi - lo > kShapeTol) {
        double mid = 0.5 * (lo + hi);
        if (ggd_moment_ratio(mid) < ratio)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void GgdMoments::add(double x) {
    if (n == 0) {
        min_v = max_v = x;
    } else {
        min_v = std::min(min_v, x);
        max_v = std::max(max_v, x);
    }
    sum_abs += std::fabs(x);
    sum_sq += x * x;
    ++n;
}

GgdFit GgdMoments::fit() const {
    if (n < kMinSamples)
        throw std::invalid_argument("ggd fit: need at least 100 samples");
    if (max_v == min_v)
        throw std::invalid_argument("ggd fit: degenerate samples (all equal)");
    double m_abs = sum_abs / static_cast<double>(n);
    double m_sq = sum_sq / static_cast<double>(n);
    GgdFit f;
    f.sigma2 = m_sq;
    f.alpha = solve_ggd_shape(m_abs * m_abs / m_sq, &f.clamped);
    return f;
}

GgdFit fit_ggd(std::span<const double> samples) {
    GgdMoments m;
    for (double x : samples)
        m.add(x);
    return m.fit();
}

void AggdMoments::add(double x) {
    sum_abs += std::fabs(x);
    sum_sq += x * x;
    if (x < 0.0) {
        sum_sq_neg += x * x;
        ++n_neg;
    } else {
        sum_sq_pos += x * x;
        ++n_pos;
    }
    ++n;
}

AggdFit AggdMoments::fit() const {
    if (n < kMinSamples)
        throw std::invalid_argument("aggd fit: need at least 100 samples");
    if (n_neg == 0 || n_pos == 0)
        throw std::invalid_argument("aggd fit: one-sided samples");
    double bl2 = sum_sq_neg / static_cast<double>(n_neg);
    double br2 = sum_sq_pos / static_cast<double>(n_pos);
    if (bl2 == 0.0 && br2 == 0.0)
        throw std::invalid_argument("aggd fit: degenerate samples");
    double bl = std::sqrt(bl2);
    double br = std::sqrt(br2);
    if (br == 0.0)
        throw std::invalid_argument("aggd fit: right side degenerate");
    double gamma_hat = bl / br;
    double m_abs = sum_abs / static_cast<double>(n);
    double m_sq = sum_sq / static_cast<double>(n);
    double r_hat = m_abs * m_abs / m_sq;
    double g2 = gamma_hat * gamma_hat;
    double big_r = r_hat * (gamma_hat * g2 + 1.0) * (gamma_hat + 1.0) / ((g2 + 1.0) * (g2 + 1.0));
    AggdFit f;
    f.nu = solve_ggd_shape(big_r, &f.clamped);
    f.sigma_l2 = bl2;
    f.sigma_r2 = br2;
    f.eta = (br - bl) * std::exp(lg(2.0 / f.nu) - lg(1.0 / f.nu));
    return f;
}

AggdFit fit_aggd(std::span<const double> samples) {
    AggdMoments m;
    for (double x : samples)
        m.add(x);
    return m.fit();
}

double ggd_entropy(double alpha, double sigma2) {
    // Scale parameter from the second moment: beta^2 = sigma2 G(1/a)/G(3/a).
    double beta = std::sqrt(sigma2) * std::exp(0.5 * (lg(1.0 / alpha) - lg(3.0 / alpha)));
    return 1.0 / alpha - std::log(alpha / (2.0 * beta)) + lg(1.0 / alpha);
}

EntropyDiagnostic entropy_ratio(std::span<const double> samples, const GgdFit &fit) {
    if (samples.size() < 1000)
        throw std::invalid_argument("entropy_ratio: need at least 1000 samples");
    double lo = samples[0], hi = samples[0];
    for (double x : samples) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi > lo))
        throw std::invalid_argument("entropy_ratio: degenerate histogram");

    constexpr int kBins = 255;
    std::vector<size_t> counts(kBins, 0);
    double scale = kBins / (hi - lo);
    for (double x : samples) {
        int b = static_cast<int>((x - lo) * scale);
        b = std::clamp(b, 0, kBins - 1);
        ++counts[b];
    }
    double n = static_cast<double>(samples.size());
    double h = 0.0;
    for (size_t c : counts) {
        if (c == 0)
            continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    h += std::log((hi - lo) / kBins); // bin-width correction -> differential entropy

    EntropyDiagnostic d;
    d.h_empirical = h;
    d.delta_h = std::fabs(ggd_entropy(fit.alpha, fit.sigma2) - h);
    d.ratio = d.delta_h / h;
    return d;
}

} // namespace hdrvqa
