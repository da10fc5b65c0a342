#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tailcount/error.hpp"

namespace tailcount {

/// Proper interval score at level alpha_level: width plus 2/alpha times
/// the miss distance when the truth falls outside.
inline double score_interval(double low, double high, double truth,
                             double alpha_level) {
    if (!(low <= high)) fail("InvalidInterval", "interval bounds are reversed");
    if (!(alpha_level > 0 && alpha_level < 1))
        fail("InvalidInterval", "alpha level must lie in (0, 1)");
    double score = high - low;
    if (truth < low) score += (2.0 / alpha_level) * (low - truth);
    if (truth > high) score += (2.0 / alpha_level) * (truth - high);
    return score;
}

struct HistogramBin {
    double left, right;
    std::int64_t count;
};

/// Equal-width bins partitioning [min, max]; the last bin is closed on
/// the right so counts conserve the sample size.
inline std::vector<HistogramBin> histogram(std::span<const double> values,
                                           int n_bins = 30) {
    if (values.empty()) fail("TooFewReplicates", "histogram of an empty sample");
    if (n_bins < 1) fail("InvalidConfig", "histogram needs >= 1 bin");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<HistogramBin> bins(n_bins);
    const double width = hi > lo ? (hi - lo) / n_bins : 1.0;
    for (int b = 0; b < n_bins; ++b)
        bins[b] = {lo + b * width, lo + (b + 1) * width, 0};
    for (double v : values) {
        int b = hi > lo ? static_cast<int>((v - lo) / width) : 0;
        b = std::clamp(b, 0, n_bins - 1);
        ++bins[b].count;
    }
    return bins;
}

}  // namespace tailcount
