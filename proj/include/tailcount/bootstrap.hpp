#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "tailcount/counting.hpp"
#include "tailcount/error.hpp"
#include "tailcount/panel.hpp"
#include "tailcount/regression.hpp"
#include "tailcount/rng.hpp"

namespace tailcount {

/// How year-blocks are drawn: pooled over all (run, year) slabs, or one
/// year resample shared by every run.
enum class BlockMode { per_run_pooled, same_years_all_runs };

struct BootstrapDistribution {
    std::vector<double> estimates;  // replicate order, failures skipped
    std::uint64_t base_seed = 0;
    int B = 0;
    int n_failed = 0;
};

/// Thread budget from TAILCOUNT_THREADS (0 or unset = hardware).
inline unsigned thread_budget() {
    if (const char* env = std::getenv("TAILCOUNT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Draw R*T1 year-blocks with replacement and reassemble a panel of the
/// original dims. Deterministic given the replicate seed.
inline DailyPanel resample_year_blocks(const DailyPanel& panel,
                                       std::uint64_t replicate_seed,
                                       BlockMode mode = BlockMode::per_run_pooled) {
    const auto& d = panel.dims();
    DailyPanel out(d, panel.origin_year());
    auto gen = std::mt19937_64(replicate_seed);
    if (mode == BlockMode::per_run_pooled) {
        std::uniform_int_distribution<int> pick(0, d.runs * d.years - 1);
        for (int r = 0; r < d.runs; ++r)
            for (int t1 = 0; t1 < d.years; ++t1) {
                int src = pick(gen);
                auto from = panel.year_block(src / d.years, src % d.years);
                auto to = out.year_block_mut(r, t1);
                std::copy(from.begin(), from.end(), to.begin());
            }
    } else {
        std::uniform_int_distribution<int> pick(0, d.years - 1);
        for (int t1 = 0; t1 < d.years; ++t1) {
            int src = pick(gen);
            for (int r = 0; r < d.runs; ++r) {
                auto from = panel.year_block(r, src);
                auto to = out.year_block_mut(r, t1);
                std::copy(from.begin(), from.end(), to.begin());
            }
        }
    }
    return out;
}

/// Full-pipeline year-block bootstrap of the extrapolated count:
/// resample -> sweep -> fit -> predict per replicate. Replicates run on
/// independent derived streams, so the result is identical under any
/// thread count.
inline BootstrapDistribution bootstrap_target(const DailyPanel& panel,
                                              const EventSpec& spec_template,
                                              std::span<const double> grid,
                                              double u_target, int B,
                                              std::uint64_t base_seed,
                                              BlockMode mode = BlockMode::per_run_pooled,
                                              unsigned threads = 0) {
    if (B < 1) fail("InvalidConfig", "bootstrap needs B >= 1");
    if (threads == 0) threads = thread_budget();
    threads = std::min<unsigned>(threads, static_cast<unsigned>(B));

    std::vector<double> raw(B, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> failed(B, 0);
    auto worker = [&](unsigned w) {
        for (int b = static_cast<int>(w); b < B; b += static_cast<int>(threads)) {
            std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(b) + 1);
            DailyPanel resampled = resample_year_blocks(panel, seed, mode);
            try {
                CountSeries series = sweep_thresholds(resampled, spec_template, grid);
                PowerLawFit fit = fit_power_law(series);
                raw[b] = predict_count(fit, u_target);
            } catch (const Error&) {
                failed[b] = 1;
            }
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }

    BootstrapDistribution dist;
    dist.base_seed = base_seed;
    dist.B = B;
    for (int b = 0; b < B; ++b) {
        if (failed[b])
            ++dist.n_failed;
        else
            dist.estimates.push_back(raw[b]);
    }
    if (dist.estimates.empty())
        fail("AllReplicatesFailed", "every bootstrap replicate failed to fit");
    return dist;
}

/// Central percentile interval by linear interpolation between order
/// statistics (position h = (n-1)p).
inline std::pair<double, double> percentile_ci(const BootstrapDistribution& dist,
                                               double level = 0.95) {
    const auto& est = dist.estimates;
    if (est.size() < 2)
        fail("TooFewReplicates", "percentile interval needs >= 2 estimates");
    if (!(level > 0 && level < 1))
        fail("InvalidConfig", "confidence level must lie in (0, 1)");
    std::vector<double> sorted(est);
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double p) {
        double h = (sorted.size() - 1) * p;
        std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
    };
    return {quantile((1.0 - level) / 2.0), quantile((1.0 + level) / 2.0)};
}

}  // namespace tailcount
