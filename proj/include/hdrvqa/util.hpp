#pragma once

#include <cstdint>
#include <cstddef>
#include <cmath>
#include <algorithm>
#include <numeric>
#include <vector>

namespace hdrvqa {

/// Small deterministic RNG (splitmix64). Used wherever reproducibility across
/// standard libraries matters (split sampling, SVR coordinate order).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n), n > 0.
    uint64_t below(uint64_t n) { return next() % n; }

    /// Uniform double in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

  private:
    uint64_t state_;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T> &v, SplitMix64 &rng) {
    for (size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

inline double mean_of(const std::vector<double> &v) {
    if (v.empty())
        return 0.0;
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double stddev_of(const std::vector<double> &v) {
    if (v.empty())
        return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

/// Median of an unsorted vector (copy, nth_element).
inline double median_of(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n % 2 == 1)
        return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Order-invariant sum: addends are sorted before accumulation, so the result
/// depends only on the multiset of values, not on their arrangement.
inline double sorted_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

} // namespace hdrvqa
