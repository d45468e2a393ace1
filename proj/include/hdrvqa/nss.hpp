#pragma once

#include <span>
#include <vector>

namespace hdrvqa {

/// Generalized Gaussian fit. `sigma2` is the sample second moment about zero
/// (the "variance" feature), not the density's scale parameter.
struct GgdFit {
    double alpha = 2.0;  // shape, in [0.05, 10]
    double sigma2 = 0.0; // mean(x^2)
    bool clamped = false; // moment ratio fell outside the attainable range
};

/// Asymmetric generalized Gaussian fit.
struct AggdFit {
    double nu = 2.0;       // shape, in [0.05, 10]
    double eta = 0.0;      // mean parameter
    double sigma_l2 = 0.0; // mean of x^2 over x < 0
    double sigma_r2 = 0.0; // mean of x^2 over x >= 0
    bool clamped = false;
};

struct EntropyDiagnostic {
    double h_empirical = 0.0; // nats
    double delta_h = 0.0;     // |model - empirical|, nats
    double ratio = 0.0;       // delta_h / h_empirical
};

/// Moment ratio rho(alpha) = Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)),
/// strictly increasing on [0.05, 10].
double ggd_moment_ratio(double alpha);

/// Invert ggd_moment_ratio by bisection to |dalpha| < 1e-4. Ratios outside
/// the attainable range clamp to the nearest bound; `clamped` reports it.
double solve_ggd_shape(double ratio, bool *clamped = nullptr);

/// Moment-matched GGD fit. Throws std::invalid_argument on fewer than
/// 100 samples or on degenerate (all-equal) data.
GgdFit fit_ggd(std::span<const double> samples);

/// Moment-matched AGGD fit. Throws std::invalid_argument on fewer than
/// 100 samples or when either sign is absent.
AggdFit fit_aggd(std::span<const double> samples);

/// Streaming moment accumulators, so paired-product fits never materialize
/// the product arrays.
struct GgdMoments {
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    size_t n = 0;
    double min_v = 0.0;
    double max_v = 0.0;

    void add(double x);
    GgdFit fit() const; // same contract as fit_ggd
};

struct AggdMoments {
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    double sum_sq_neg = 0.0;
    double sum_sq_pos = 0.0;
    size_t n = 0;
    size_t n_neg = 0;
    size_t n_pos = 0; // x >= 0

    void add(double x);
    AggdFit fit() const; // same contract as fit_aggd
};

/// Entropy gap between the fitted model and a 255-bin empirical histogram
/// of the samples. Throws on degenerate data (min == max) or < 1000 samples.
EntropyDiagnostic entropy_ratio(std::span<const double> samples, const GgdFit &fit);

/// Differential entropy of a GGD with shape alpha and second moment sigma2.
double ggd_entropy(double alpha, double sigma2);

} // namespace hdrvqa
