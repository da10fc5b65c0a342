#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "tailcount/counting.hpp"
#include "tailcount/error.hpp"
#include "tailcount/panel.hpp"
#include "tailcount/rng.hpp"

namespace tailcount {

enum class Dependence { comonotone, independent, common_factor };

/// Synthetic regularly varying panel with Pareto(alpha) marginals on
/// [1, inf), so the power-law tail is exact and analytic count oracles
/// are available.
struct SimConfig {
    PanelDims dims;
    double alpha = 2.0;
    Dependence dependence = Dependence::independent;
    double factor_weight = 0.5;      // common_factor only
    double seasonal_amplitude = 0.0;
    double trend_slope = 0.0;
    std::uint64_t seed = 0;
};

inline void validate(const SimConfig& cfg) {
    if (cfg.dims.sites < 1 || cfg.dims.runs < 1 || cfg.dims.years < 1 ||
        cfg.dims.days < 1)
        fail("InvalidConfig", "simulation dims must all be >= 1");
    if (!(cfg.alpha > 0)) fail("InvalidConfig", "tail index alpha must be > 0");
    if (cfg.dependence == Dependence::common_factor &&
        !(cfg.factor_weight >= 0 && cfg.factor_weight <= 1))
        fail("InvalidConfig", "factor_weight must lie in [0, 1]");
    if (cfg.seasonal_amplitude < 0)
        fail("InvalidConfig", "seasonal_amplitude must be >= 0");
}

/// Each (run, year) block draws from its own derived stream, so
/// generation is reproducible regardless of evaluation order.
inline DailyPanel simulate_panel(const SimConfig& cfg) {
    validate(cfg);
    const auto& d = cfg.dims;
    DailyPanel panel(d);
    for (int r = 0; r < d.runs; ++r) {
        for (int t1 = 0; t1 < d.years; ++t1) {
            auto gen = make_stream(cfg.seed, static_cast<std::uint64_t>(r) + 1,
                                   static_cast<std::uint64_t>(t1) + 1);
            for (int t2 = 0; t2 < d.days; ++t2) {
                double seasonal =
                    1.0 + cfg.seasonal_amplitude *
                              std::sin(2.0 * M_PI * (t2 + 1) / d.days);
                double trend = cfg.trend_slope * (t1 + 1.0) / d.years;
                switch (cfg.dependence) {
                    case Dependence::comonotone: {
                        double w = pareto_draw(gen, cfg.alpha);
                        for (int i = 0; i < d.sites; ++i)
                            panel.at(i, r, t1, t2) = w * seasonal + trend;
                        break;
                    }
                    case Dependence::independent: {
                        for (int i = 0; i < d.sites; ++i)
                            panel.at(i, r, t1, t2) =
                                pareto_draw(gen, cfg.alpha) * seasonal + trend;
                        break;
                    }
                    case Dependence::common_factor: {
                        double w = pareto_draw(gen, cfg.alpha);
                        for (int i = 0; i < d.sites; ++i) {
                            double v = pareto_draw(gen, cfg.alpha);
                            double y = std::pow(w, cfg.factor_weight) *
                                       std::pow(v, 1.0 - cfg.factor_weight);
                            panel.at(i, r, t1, t2) = y * seasonal + trend;
                        }
                        break;
                    }
                }
            }
        }
    }
    return panel;
}

/// Closed-form expected single-day count for the homogeneous comonotone
/// and independent models.
inline double true_expected_count(const SimConfig& cfg, const EventSpec& spec) {
    validate(cfg);
    if (cfg.seasonal_amplitude != 0 || cfg.trend_slope != 0)
        fail("UnsupportedConfig",
             "analytic count requires a homogeneous simulation");
    if (spec.temporal != Temporal::single_day)
        fail("UnsupportedConfig", "no closed form for run events");
    if (cfg.dependence == Dependence::common_factor)
        fail("UnsupportedConfig", "no closed form for the common-factor model");
    const auto& d = cfg.dims;
    if (spec.m < 1 || spec.m > d.sites)
        fail("IndexOutOfRange", "event requires m in 1..S");
    const double slices = static_cast<double>(d.day_slices());
    const double p = spec.u >= 1.0 ? std::pow(spec.u, -cfg.alpha) : 1.0;
    if (cfg.dependence == Dependence::comonotone) return slices * p;

    // binomial upper tail: P(at least m of S sites exceed)
    double tail = 0;
    const int S = d.sites;
    for (int j = spec.m; j <= S; ++j) {
        double log_term = std::lgamma(S + 1.0) - std::lgamma(j + 1.0) -
                          std::lgamma(S - j + 1.0);
        if (p > 0 && p < 1)
            log_term += j * std::log(p) + (S - j) * std::log1p(-p);
        else if (p >= 1)
            log_term += (j == S ? 0 : -std::numeric_limits<double>::infinity());
        else
            log_term = -std::numeric_limits<double>::infinity();
        tail += std::exp(log_term);
    }
    if (p >= 1) tail = 1.0;
    return slices * tail;
}

}  // namespace tailcount
