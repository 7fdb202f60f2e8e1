#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qlsep/errors.hpp"

namespace qlsep {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double center = (p + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Normal-approximation interval for the difference of two proportions.
inline Interval proportion_diff_interval(std::size_t s1, std::size_t n1, std::size_t s2,
                                         std::size_t n2, double z = 1.96) {
    if (n1 == 0 || n2 == 0) {
        return {-1.0, 1.0};
    }
    const double p1 = static_cast<double>(s1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(s2) / static_cast<double>(n2);
    const double se = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(n1) +
                                p2 * (1.0 - p2) / static_cast<double>(n2));
    const double d = p1 - p2;
    return {d - z * se, d + z * se};
}

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) {
        throw DimensionError("quantile: empty sample");
    }
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) {
        return v.back();
    }
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

inline double mean(const std::vector<double> &v) {
    if (v.empty()) {
        throw DimensionError("mean: empty sample");
    }
    double acc = 0.0;
    for (double x : v) {
        acc += x;
    }
    return acc / static_cast<double>(v.size());
}

} // namespace qlsep
