#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "tailcount/counting.hpp"
#include "tailcount/diagnostics.hpp"
#include "tailcount/panel.hpp"
#include "tailcount/regression.hpp"
#include "tailcount/simulator.hpp"

using namespace tailcount;

namespace {

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("comonotone panels have equal sites per day") {
    SimConfig cfg;
    cfg.dims = {6, 2, 3, 10};
    cfg.alpha = 2.5;
    cfg.dependence = Dependence::comonotone;
    cfg.seed = 1;
    auto p = simulate_panel(cfg);
    for (int r = 0; r < 2; ++r)
        for (int t1 = 0; t1 < 3; ++t1)
            for (int t2 = 0; t2 < 10; ++t2) {
                auto s = p.day_slice(r, t1, t2);
                for (double v : s) CHECK(v == s[0]);
            }
}

TEST_CASE("generation is deterministic and block-stream independent") {
    SimConfig cfg;
    cfg.dims = {3, 2, 4, 12};
    cfg.alpha = 3;
    cfg.seed = 42;
    auto a = simulate_panel(cfg);
    auto b = simulate_panel(cfg);
    CHECK(std::equal(a.flat().begin(), a.flat().end(), b.flat().begin()));

    // growing T1 leaves earlier blocks untouched
    SimConfig wider = cfg;
    wider.dims.years = 6;
    auto c = simulate_panel(wider);
    for (int i = 0; i < 3; ++i)
        for (int r = 0; r < 2; ++r)
            for (int t1 = 0; t1 < 4; ++t1)
                for (int t2 = 0; t2 < 12; ++t2)
                    CHECK(c.at(i, r, t1, t2) == a.at(i, r, t1, t2));
}

TEST_CASE("independent marginals follow the Pareto tail") {
    SimConfig cfg;
    cfg.dims = {1, 1, 1, 1000000};
    cfg.alpha = 2;
    cfg.dependence = Dependence::independent;
    cfg.seed = 7;
    auto p = simulate_panel(cfg);
    for (double u : {2.0, 5.0, 10.0}) {
        std::int64_t n = 0;
        for (double v : p.flat())
            if (v > u) ++n;
        double emp = n / 1e6;
        CHECK(emp == Catch::Approx(std::pow(u, -2.0)).margin(0.003));
    }
    double mn = *std::min_element(p.flat().begin(), p.flat().end());
    CHECK(mn >= 1.0);
}

TEST_CASE("analytic expected counts") {
    SimConfig cfg;
    cfg.dims = {25, 4, 165, 365};
    cfg.alpha = 6;
    cfg.dependence = Dependence::comonotone;
    double e = true_expected_count(cfg, {25, 1.7, Temporal::single_day});
    CHECK(e == Catch::Approx(240900.0 * std::pow(1.7, -6.0)).margin(1e-9));

    CHECK(true_expected_count(cfg, {25, 1.0, Temporal::single_day}) ==
          Catch::Approx(240900.0).margin(1e-9));

    // independent, m = S multiplies the marginal tails
    SimConfig ind = cfg;
    ind.dims = {3, 2, 5, 20};
    ind.alpha = 1.5;
    ind.dependence = Dependence::independent;
    double slices = 2.0 * 5 * 20;
    CHECK(true_expected_count(ind, {3, 2.0, Temporal::single_day}) ==
          Catch::Approx(slices * std::pow(2.0, -1.5 * 3)).margin(1e-9));

    // and matches a direct binomial sum for interior m
    double pe = std::pow(2.0, -1.5);
    double tail = 3 * pe * pe * (1 - pe) + pe * pe * pe;  // at least 2 of 3
    CHECK(true_expected_count(ind, {2, 2.0, Temporal::single_day}) ==
          Catch::Approx(slices * tail).margin(1e-9));

    SimConfig bad = cfg;
    bad.dependence = Dependence::common_factor;
    CHECK(code_of([&] {
              true_expected_count(bad, {25, 1.7, Temporal::single_day});
          }) == "UnsupportedConfig");
    CHECK(code_of([&] {
              true_expected_count(cfg, {3, 1.7, Temporal::run_at_least_two_days});
          }) == "UnsupportedConfig");
    SimConfig seasonal = cfg;
    seasonal.seasonal_amplitude = 0.5;
    CHECK(code_of([&] {
              true_expected_count(seasonal, {25, 1.7, Temporal::single_day});
          }) == "UnsupportedConfig");
}

TEST_CASE("monotonicity of the analytic count") {
    SimConfig cfg;
    cfg.dims = {10, 1, 4, 50};
    cfg.dependence = Dependence::independent;
    cfg.alpha = 2;
    double prev = 1e300;
    for (double u = 1.1; u < 4.0; u += 0.3) {
        double e = true_expected_count(cfg, {4, u, Temporal::single_day});
        CHECK(e <= prev);
        prev = e;
    }
    for (int m = 1; m < 10; ++m)
        CHECK(true_expected_count(cfg, {m + 1, 2.0, Temporal::single_day}) <=
              true_expected_count(cfg, {m, 2.0, Temporal::single_day}));
    CHECK(true_expected_count({cfg.dims, 3.0, Dependence::independent},
                              {4, 2.0, Temporal::single_day}) <=
          true_expected_count({cfg.dims, 2.0, Dependence::independent},
                              {4, 2.0, Temporal::single_day}));
}

TEST_CASE("empirical counts converge to the analytic oracle") {
    SimConfig cfg;
    cfg.dims = {4, 1, 30, 365};
    cfg.alpha = 1.2;
    cfg.dependence = Dependence::comonotone;
    cfg.seed = 17;
    auto p = simulate_panel(cfg);
    EventSpec spec{4, 1.5, Temporal::single_day};
    double truth = true_expected_count(cfg, spec);
    REQUIRE(truth >= 1000);
    auto count = count_single_day(event_indicator(p, spec));
    CHECK(std::abs(count - truth) / truth < 0.05);
}

TEST_CASE("fit recovers the tail index from comonotone data") {
    int ok_alpha = 0, trials = 10;
    for (int s = 0; s < trials; ++s) {
        SimConfig cfg;
        cfg.dims = {25, 4, 165, 365};
        cfg.alpha = 6;
        cfg.dependence = Dependence::comonotone;
        cfg.seed = 500 + s;
        auto p = simulate_panel(cfg);
        auto grid = make_grid(1.10, 1.50, 0.01);
        auto series = sweep_thresholds(p, {25, 0, Temporal::single_day}, grid);
        auto fit = fit_power_law(series);
        if (std::abs(fit.tail_index() - 6.0) <= 0.3 &&
            std::abs(fit.c_prime - std::log(240900.0)) <= 0.15)
            ++ok_alpha;
    }
    CHECK(ok_alpha >= 9);
}

TEST_CASE("null simulation shows no GEV trend") {
    int contains = 0, trials = 20;
    for (int s = 0; s < trials; ++s) {
        SimConfig cfg;
        cfg.dims = {1, 2, 60, 120};
        cfg.alpha = 4;
        cfg.dependence = Dependence::independent;
        cfg.seed = 900 + s;
        auto p = simulate_panel(cfg);
        auto maxima = yearly_maxima(p);
        std::vector<double> y, years;
        for (int r = 0; r < 2; ++r)
            for (int t1 = 0; t1 < 60; ++t1) {
                y.push_back(maxima.at(0, r, t1));
                years.push_back(t1 + 1.0);
            }
        auto fit = fit_gev_trend(y, years);
        if (fit.convergence && fit.beta1_ci_low() <= 0 && fit.beta1_ci_high() >= 0)
            ++contains;
    }
    CHECK(contains >= 17);
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.dims = {0, 1, 1, 1};
    CHECK(code_of([&] { simulate_panel(cfg); }) == "InvalidConfig");
    cfg.dims = {1, 1, 1, 1};
    cfg.alpha = -1;
    CHECK(code_of([&] { simulate_panel(cfg); }) == "InvalidConfig");
}
