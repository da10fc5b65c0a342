#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tailcount/error.hpp"
#include "tailcount/panel.hpp"

namespace tailcount {

enum class Temporal { single_day, run_at_least_two_days };

/// "At least m of S sites exceed u", either on one day or as a spell of
/// >= 2 consecutive days.
struct EventSpec {
    int m = 1;
    double u = 0.0;
    Temporal temporal = Temporal::single_day;

    EventSpec with_threshold(double threshold) const {
        return {m, threshold, temporal};
    }
};

struct IndicatorTensor {
    int runs = 0, years = 0, days = 0;
    std::vector<std::uint8_t> bits;  // (run, year, day), day fastest

    std::uint8_t at(int run, int year, int day) const {
        return bits[(static_cast<std::size_t>(run) * years + year) * days + day];
    }
    std::uint8_t& at(int run, int year, int day) {
        return bits[(static_cast<std::size_t>(run) * years + year) * days + day];
    }
    static IndicatorTensor zeros(int runs, int years, int days) {
        return {runs, years, days,
                std::vector<std::uint8_t>(
                    static_cast<std::size_t>(runs) * years * days, 0)};
    }
};

struct CountSeries {
    std::vector<double> thresholds;
    std::vector<std::int64_t> counts;
    EventSpec spec_template;  // u unset
};

/// k-th smallest of the day's site values, k 1-based, ties kept.
inline double site_order_statistic(std::span<const double> day_vector, int k) {
    const int s = static_cast<int>(day_vector.size());
    if (k < 1 || k > s)
        fail("IndexOutOfRange",
             "order statistic index " + std::to_string(k) + " outside 1.." +
                 std::to_string(s));
    std::vector<double> tmp(day_vector.begin(), day_vector.end());
    std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end());
    return tmp[k - 1];
}

namespace detail {

/// Per-day statistic whose exceedance of u is exactly the m-of-S event:
/// the (S-m+1)-th ascending order statistic (the smallest of the top m).
inline std::vector<double> day_statistics(const DailyPanel& panel, int m) {
    const auto& d = panel.dims();
    if (m < 1 || m > d.sites)
        fail("IndexOutOfRange", "event requires m in 1..S");
    const int k = d.sites - m + 1;
    std::vector<double> stat(static_cast<std::size_t>(d.day_slices()));
    std::vector<double> tmp(static_cast<std::size_t>(d.sites));
    std::size_t pos = 0;
    for (int r = 0; r < d.runs; ++r)
        for (int t1 = 0; t1 < d.years; ++t1)
            for (int t2 = 0; t2 < d.days; ++t2) {
                auto slice = panel.day_slice(r, t1, t2);
                tmp.assign(slice.begin(), slice.end());
                std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end());
                stat[pos++] = tmp[k - 1];
            }
    return stat;
}

}  // namespace detail

/// bits[r,t1,t2] = 1 iff at least spec.m sites strictly exceed spec.u.
inline IndicatorTensor event_indicator(const DailyPanel& panel, const EventSpec& spec) {
    const auto& d = panel.dims();
    auto stat = detail::day_statistics(panel, spec.m);
    IndicatorTensor out = IndicatorTensor::zeros(d.runs, d.years, d.days);
    for (std::size_t p = 0; p < stat.size(); ++p)
        out.bits[p] = stat[p] > spec.u ? 1 : 0;
    return out;
}

inline std::int64_t count_single_day(const IndicatorTensor& indic) {
    std::int64_t total = 0;
    for (auto b : indic.bits) total += b;
    return total;
}

/// Spell count: adjacent pairs minus adjacent triples, with years
/// concatenated inside each run (boundary pair and the two boundary
/// triple terms included). A maximal block of L >= 2 consecutive ones
/// contributes (L-1) - (L-2) = 1.
inline std::int64_t count_runs(const IndicatorTensor& indic) {
    if (indic.days < 2)
        fail("DimensionTooSmall", "run counting needs at least 2 days per year");
    const int T1 = indic.years, T2 = indic.days;
    std::int64_t pairs = 0, triples = 0;
    for (int r = 0; r < indic.runs; ++r) {
        for (int t1 = 0; t1 < T1; ++t1) {
            for (int t2 = 0; t2 + 1 < T2; ++t2)
                pairs += indic.at(r, t1, t2) & indic.at(r, t1, t2 + 1);
            for (int t2 = 0; t2 + 2 < T2; ++t2)
                triples += indic.at(r, t1, t2) & indic.at(r, t1, t2 + 1) &
                           indic.at(r, t1, t2 + 2);
        }
        for (int t1 = 0; t1 + 1 < T1; ++t1) {
            pairs += indic.at(r, t1, T2 - 1) & indic.at(r, t1 + 1, 0);
            triples += indic.at(r, t1, T2 - 2) & indic.at(r, t1, T2 - 1) &
                       indic.at(r, t1 + 1, 0);
            triples += indic.at(r, t1, T2 - 1) & indic.at(r, t1 + 1, 0) &
                       indic.at(r, t1 + 1, 1);
        }
    }
    return pairs - triples;
}

/// Independent check: concatenate the years of each run and count
/// maximal blocks of consecutive ones with length >= 2.
inline std::int64_t maximal_runs_oracle(const IndicatorTensor& indic) {
    std::int64_t total = 0;
    for (int r = 0; r < indic.runs; ++r) {
        int streak = 0;
        for (int t1 = 0; t1 < indic.years; ++t1)
            for (int t2 = 0; t2 < indic.days; ++t2) {
                if (indic.at(r, t1, t2)) {
                    ++streak;
                    if (streak == 2) ++total;
                } else {
                    streak = 0;
                }
            }
    }
    return total;
}

/// Empirical counts over a strictly increasing threshold grid. The
/// order-statistic per day is computed once; each threshold is then a
/// scalar comparison sweep.
inline CountSeries sweep_thresholds(const DailyPanel& panel,
                                    const EventSpec& spec_template,
                                    std::span<const double> grid) {
    if (grid.empty()) fail("EmptyGrid", "threshold grid is empty");
    for (std::size_t l = 0; l < grid.size(); ++l) {
        if (grid[l] <= 0) fail("NonIncreasingGrid", "thresholds must be > 0");
        if (l > 0 && grid[l] <= grid[l - 1])
            fail("NonIncreasingGrid", "threshold grid must be strictly increasing");
    }
    const auto& d = panel.dims();
    auto stat = detail::day_statistics(panel, spec_template.m);
    CountSeries series;
    series.thresholds.assign(grid.begin(), grid.end());
    series.spec_template = spec_template;
    series.counts.reserve(grid.size());

    if (spec_template.temporal == Temporal::single_day) {
        // counts at u = #stats > u; one sort serves the whole grid
        std::vector<double> sorted = stat;
        std::sort(sorted.begin(), sorted.end());
        for (double u : grid) {
            auto it = std::upper_bound(sorted.begin(), sorted.end(), u);
            series.counts.push_back(static_cast<std::int64_t>(sorted.end() - it));
        }
    } else {
        IndicatorTensor indic = IndicatorTensor::zeros(d.runs, d.years, d.days);
        for (double u : grid) {
            for (std::size_t p = 0; p < stat.size(); ++p)
                indic.bits[p] = stat[p] > u ? 1 : 0;
            series.counts.push_back(count_runs(indic));
        }
    }
    return series;
}

inline std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0) || !(lo < hi)) fail("NonIncreasingGrid", "invalid grid bounds");
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    grid.reserve(n);
    for (int l = 0; l < n; ++l) grid.push_back(lo + l * step);
    return grid;
}

inline void write_count_series(const CountSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("IoFailure", "cannot write '" + path + "'");
    out << "u,count\n";
    char buf[40];
    for (std::size_t l = 0; l < series.thresholds.size(); ++l) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.thresholds[l]);
        out << buf << ',' << series.counts[l] << '\n';
    }
}

}  // namespace tailcount
