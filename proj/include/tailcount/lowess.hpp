#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tailcount/error.hpp"

namespace tailcount {

/// Locally weighted linear regression (tricube kernel, no robustness
/// iterations). `fraction` is the share of points in each local window.
inline std::vector<double> lowess_smooth(std::span<const double> x,
                                         std::span<const double> y,
                                         double fraction) {
    const std::size_t n = x.size();
    if (y.size() != n) fail("LengthMismatch", "lowess: x and y lengths differ");
    if (!(fraction > 0.0 && fraction <= 1.0))
        fail("InvalidConfig", "lowess: fraction must lie in (0, 1]");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = y[0];
        return out;
    }
    const std::size_t q =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(fraction * n)), 2, n);

    std::size_t lo = 0;  // window [lo, lo+q) slides with the target point
    for (std::size_t i = 0; i < n; ++i) {
        while (lo + q < n && x[lo + q] - x[i] < x[i] - x[lo]) ++lo;
        const std::size_t hi = lo + q;  // exclusive
        const double h = std::max(x[i] - x[lo], x[hi - 1] - x[i]);

        double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
        for (std::size_t j = lo; j < hi; ++j) {
            double d = h > 0 ? std::abs(x[j] - x[i]) / h : 0.0;
            if (d >= 1.0) continue;
            double t = 1.0 - d * d * d;
            double w = t * t * t;
            sw += w;
            swx += w * x[j];
            swy += w * y[j];
            swxx += w * x[j] * x[j];
            swxy += w * x[j] * y[j];
        }
        const double denom = sw * swxx - swx * swx;
        if (sw <= 0) {
            out[i] = y[i];
        } else if (std::abs(denom) < 1e-12 * std::max(1.0, sw * swxx)) {
            out[i] = swy / sw;  // degenerate window, fall back to weighted mean
        } else {
            double slope = (sw * swxy - swx * swy) / denom;
            double intercept = (swy - slope * swx) / sw;
            out[i] = intercept + slope * x[i];
        }
    }
    return out;
}

}  // namespace tailcount
