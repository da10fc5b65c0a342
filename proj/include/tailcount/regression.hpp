#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tailcount/counting.hpp"
#include "tailcount/error.hpp"

namespace tailcount {

/// Log-linear tail fit log(Z) = c_prime + alpha_prime * log(u).
/// The regular-variation parameters are C = exp(c_prime), alpha = -alpha_prime.
struct PowerLawFit {
    double c_prime = 0;
    double alpha_prime = 0;
    double se_c_prime = 0;
    double se_alpha_prime = 0;
    double r_squared = 0;
    int n_used = 0;
    int dropped_zero_counts = 0;

    double tail_index() const { return -alpha_prime; }
    double scale_constant() const { return std::exp(c_prime); }
};

/// Unweighted OLS of log(Z_l) on log(u_l). Zero counts are dropped
/// before taking logs and reported.
inline PowerLawFit fit_power_law(const CountSeries& series) {
    std::vector<double> lx, ly;
    int dropped = 0;
    for (std::size_t l = 0; l < series.thresholds.size(); ++l) {
        if (series.counts[l] <= 0) {
            ++dropped;
            continue;
        }
        lx.push_back(std::log(series.thresholds[l]));
        ly.push_back(std::log(static_cast<double>(series.counts[l])));
    }
    const int n = static_cast<int>(lx.size());
    if (n < 3)
        fail("TooFewPoints", "power-law fit needs >= 3 positive counts, have " +
                                 std::to_string(n));
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0) fail("DegenerateDesign", "all retained log-thresholds are equal");

    PowerLawFit fit;
    fit.alpha_prime = sxy / sxx;
    fit.c_prime = my - fit.alpha_prime * mx;
    fit.n_used = n;
    fit.dropped_zero_counts = dropped;

    double rss = 0, tss = 0;
    for (int i = 0; i < n; ++i) {
        double e = ly[i] - (fit.c_prime + fit.alpha_prime * lx[i]);
        rss += e * e;
        tss += (ly[i] - my) * (ly[i] - my);
    }
    double s2 = n > 2 ? rss / (n - 2) : 0.0;
    fit.se_alpha_prime = std::sqrt(s2 / sxx);
    fit.se_c_prime = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    fit.r_squared = tss > 0 ? 1.0 - rss / tss : (rss > 0 ? 0.0 : 1.0);
    return fit;
}

/// Extrapolated expected count C * u^{-alpha}.
inline double predict_count(const PowerLawFit& fit, double u_target) {
    if (!(u_target > 0))
        fail("NonpositiveThreshold", "prediction threshold must be > 0");
    return std::exp(fit.c_prime + fit.alpha_prime * std::log(u_target));
}

struct GoodnessRow {
    double u;
    std::int64_t count;
    double log_u;
    double log_count;       // NaN where the count was zero
    double fitted_log_count;
    double residual;        // NaN where the count was zero
};

struct GoodnessReport {
    std::vector<GoodnessRow> rows;
    double r_squared = 0;
};

inline GoodnessReport goodness_report(const PowerLawFit& fit, const CountSeries& series) {
    GoodnessReport rep;
    rep.r_squared = fit.r_squared;
    rep.rows.reserve(series.thresholds.size());
    for (std::size_t l = 0; l < series.thresholds.size(); ++l) {
        GoodnessRow row;
        row.u = series.thresholds[l];
        row.count = series.counts[l];
        row.log_u = std::log(row.u);
        row.fitted_log_count = fit.c_prime + fit.alpha_prime * row.log_u;
        if (row.count > 0) {
            row.log_count = std::log(static_cast<double>(row.count));
            row.residual = row.log_count - row.fitted_log_count;
        } else {
            row.log_count = std::numeric_limits<double>::quiet_NaN();
            row.residual = std::numeric_limits<double>::quiet_NaN();
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace tailcount
