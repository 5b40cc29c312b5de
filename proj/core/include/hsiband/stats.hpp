#ifndef HSIBAND_STATS_HPP
#define HSIBAND_STATS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsiband/error.hpp"

namespace hsiband {

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw ValidationError("mean of empty sequence");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation, n−1 divisor.
inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) throw ValidationError("sample sd needs >= 2 values");
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Percentile with linear interpolation between order statistics: the value
/// at fractional position (n−1)·p/100 of the sorted data.
inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile of empty sequence");
    if (p < 0.0 || p > 100.0) throw ValidationError("percentile out of [0,100]");
    std::sort(values.begin(), values.end());
    const double pos = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace hsiband

#endif
