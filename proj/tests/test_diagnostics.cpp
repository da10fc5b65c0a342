#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "tailcount/diagnostics.hpp"
#include "tailcount/rng.hpp"

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

std::vector<double> gumbel_sample(int n, double mu, double sigma,
                                  std::mt19937_64& gen, double trend = 0.0,
                                  const std::vector<double>* x = nullptr) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double loc = mu + (x ? trend * (*x)[i] : 0.0);
        out[i] = loc - sigma * std::log(-std::log(uniform01(gen)));
    }
    return out;
}

}  // namespace

TEST_CASE("GEV negative log likelihood values") {
    std::vector<double> y = {0.0}, x = {0.0};
    CHECK(gev_neg_log_likelihood({0, 0, 1, 0}, y, x) == Catch::Approx(1.0).margin(1e-12));

    y = {1.0};
    double expect = 3 * std::log(1.5) + std::pow(1.5, -2.0);
    CHECK(gev_neg_log_likelihood({0, 0, 1, 0.5}, y, x) ==
          Catch::Approx(expect).margin(1e-9));
    CHECK(expect == Catch::Approx(1.660843).margin(1e-6));

    // support violation: xi = 0.5, y far below mu makes 1 + xi z <= 0
    y = {-10.0};
    CHECK(std::isinf(gev_neg_log_likelihood({0, 0, 1, 0.5}, y, x)));

    CHECK(code_of([&] { gev_neg_log_likelihood({0, 0, -1, 0}, y, x); }) ==
          "NonpositiveScale");
    std::vector<double> short_x = {};
    CHECK(code_of([&] { gev_neg_log_likelihood({0, 0, 1, 0}, y, short_x); }) ==
          "LengthMismatch");
}

TEST_CASE("finite-difference gradient of the likelihood is consistent") {
    auto gen = std::mt19937_64(2);
    auto y = gumbel_sample(60, 5.0, 2.0, gen);
    std::vector<double> x(60);
    for (int i = 0; i < 60; ++i) x[i] = i / 59.0;
    GevParams p{4.8, 0.1, 2.1, 0.05};
    auto f = [&](GevParams q) { return gev_neg_log_likelihood(q, y, x); };
    // central differences at two step sizes; Richardson agreement
    for (int k = 0; k < 4; ++k) {
        auto shift = [&](double d) {
            GevParams q = p;
            (k == 0 ? q.beta0 : k == 1 ? q.beta1 : k == 2 ? q.sigma : q.xi) += d;
            return f(q);
        };
        double h = 1e-4;
        double g1 = (shift(h) - shift(-h)) / (2 * h);
        double g2 = (shift(h / 2) - shift(-h / 2)) / h;
        CHECK(g1 == Catch::Approx(g2).epsilon(1e-4).margin(1e-6));
    }
}

TEST_CASE("GEV fit descends from its initialization") {
    auto gen = std::mt19937_64(7);
    auto y = gumbel_sample(120, 3.0, 1.5, gen);
    std::vector<double> years(120);
    for (int i = 0; i < 120; ++i) years[i] = 1 + (i % 40);
    auto fit = fit_gev_trend(y, years);
    CHECK(fit.convergence);
    CHECK(fit.sigma > 0);

    // nll at the optimum <= nll at the documented moment start
    double mean = 0, sd = 0;
    for (double v : y) mean += v;
    mean /= y.size();
    for (double v : y) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / (y.size() - 1));
    double sigma0 = std::sqrt(6.0) * sd / M_PI;
    std::vector<double> x(120);
    for (int i = 0; i < 120; ++i) x[i] = (years[i] - 1) / 39.0;
    double f0 = gev_neg_log_likelihood({mean - 0.5772156649 * sigma0, 0, sigma0, 0.1},
                                       y, x);
    CHECK(fit.nll <= f0 + 1e-9);
}

TEST_CASE("GEV null-slope confidence intervals are calibrated") {
    int contains = 0;
    const int trials = 40;
    for (int s = 0; s < trials; ++s) {
        auto gen = std::mt19937_64(1000 + s);
        const int n = 200;
        auto y = gumbel_sample(n, 10.0, 2.0, gen);
        std::vector<double> years(n);
        for (int i = 0; i < n; ++i) years[i] = 1 + (i % 50);
        auto fit = fit_gev_trend(y, years);
        if (fit.convergence && fit.beta1_ci_low() <= 0 && fit.beta1_ci_high() >= 0)
            ++contains;
    }
    CHECK(contains >= static_cast<int>(0.85 * trials));
}

TEST_CASE("GEV trend is detected and equivariant") {
    int excludes = 0, trials = 25;
    double slope_sum = 0;
    for (int s = 0; s < trials; ++s) {
        auto gen = std::mt19937_64(2000 + s);
        const int n = 200;
        std::vector<double> years(n), x(n);
        for (int i = 0; i < n; ++i) {
            years[i] = 1 + (i % 50);
            x[i] = (years[i] - 1) / 49.0;
        }
        const double sigma = 2.0, beta1 = 0.5 * sigma * 2;  // strong trend
        auto y = gumbel_sample(n, 10.0, sigma, gen, beta1, &x);
        auto fit = fit_gev_trend(y, years);
        if (fit.convergence) {
            slope_sum += fit.beta1;
            if (fit.beta1_ci_low() > 0) ++excludes;
        }
    }
    CHECK(excludes >= static_cast<int>(0.8 * trials));
    CHECK(slope_sum / trials == Catch::Approx(2.0).margin(0.6));
}

TEST_CASE("runs test closed-form example") {
    // strictly alternating around the median, n1 = n2 = 5 -> 10 runs
    std::vector<double> alt;
    for (int i = 0; i < 5; ++i) {
        alt.push_back(1.0);
        alt.push_back(-1.0);
    }
    auto res = runs_test(alt);
    CHECK(res.statistic == Catch::Approx(2.683).margin(1e-3));
    CHECK(res.p_value == Catch::Approx(0.0073).margin(1e-4));
    CHECK(res.n_obs == 10);

    std::vector<double> constant(10, 2.0);
    CHECK(code_of([&] { runs_test(constant); }) == "DegenerateSeries");
}

TEST_CASE("runs test p-values are approximately uniform under IID") {
    // series long enough that the discrete run-count lattice does not
    // dominate the KS distance
    auto gen = std::mt19937_64(44);
    const int n = 4000, reps = 10000;
    std::vector<double> ps;
    ps.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        std::vector<double> x(n);
        for (double& v : x) v = uniform01(gen);
        ps.push_back(runs_test(x).p_value);
    }
    std::sort(ps.begin(), ps.end());
    double ks = 0;
    for (int i = 0; i < reps; ++i)
        ks = std::max(ks, std::abs(ps[i] - (i + 1.0) / reps));
    CHECK(ks < 0.03);
}

TEST_CASE("runs test is rank invariant") {
    auto gen = std::mt19937_64(9);
    std::vector<double> x(101);
    for (double& v : x) v = uniform01(gen);
    std::vector<double> tx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) tx[i] = std::exp(3 * x[i]) + 1;
    auto a = runs_test(x);
    auto b = runs_test(tx);
    CHECK(a.statistic == Catch::Approx(b.statistic).margin(1e-12));
    CHECK(a.p_value == Catch::Approx(b.p_value).margin(1e-12));
}

TEST_CASE("ADF separates white noise from a random walk") {
    auto gen = std::mt19937_64(5);
    std::normal_distribution<double> norm(0, 1);

    std::vector<double> wn(1000);
    for (double& v : wn) v = norm(gen);
    auto res_wn = adf_test(wn);
    CHECK(res_wn.p_value <= 0.01);
    CHECK(res_wn.clamped);

    std::vector<double> rw(1000);
    double acc = 0;
    for (double& v : rw) {
        acc += norm(gen);
        v = acc;
    }
    auto res_rw = adf_test(rw);
    CHECK(res_rw.p_value > 0.10);

    std::vector<double> tiny(5, 1.0);
    CHECK(code_of([&] { adf_test(tiny, 3); }) == "SeriesTooShort");
}

TEST_CASE("ADF inner OLS matches a direct solve") {
    // lag-0 variant reduces to simple regression of dy on (1, y_lag)
    auto gen = std::mt19937_64(12);
    std::normal_distribution<double> norm(0, 1);
    const int n = 120;
    std::vector<double> y(n);
    double acc = 0;
    for (double& v : y) {
        acc = 0.5 * acc + norm(gen);
        v = acc;
    }
    auto res = adf_test(y, 0);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int rows = n - 1;
    for (int t = 1; t < n; ++t) {
        double x = y[t - 1], d = y[t] - y[t - 1];
        sx += x;
        sy += d;
        sxx += x * x;
        sxy += x * d;
    }
    double det = rows * sxx - sx * sx;
    double rho = (rows * sxy - sx * sy) / det;
    double alpha = (sy - rho * sx) / rows;
    double rss = 0, mx = sx / rows;
    for (int t = 1; t < n; ++t) {
        double e = (y[t] - y[t - 1]) - alpha - rho * y[t - 1];
        rss += e * e;
    }
    double s2 = rss / (rows - 2);
    double sxx_c = sxx - rows * mx * mx;
    double se_rho = std::sqrt(s2 / sxx_c);
    CHECK(res.statistic == Catch::Approx(rho / se_rho).margin(1e-8));
}

TEST_CASE("chi at lag 1") {
    // persistent series: every exceedance is followed by one
    std::vector<double> x;
    for (int i = 0; i < 200; ++i) x.push_back(i < 190 ? 0.1 : 5.0);
    CHECK(chi_lag1(x, 0.9) == Catch::Approx(1.0).margin(1e-12));

    auto gen = std::mt19937_64(66);
    std::vector<double> iid(100000);
    for (double& v : iid) v = uniform01(gen);
    CHECK(chi_lag1(iid, 0.975) == Catch::Approx(0.025).margin(0.01));

    // rank invariance
    std::vector<double> tx(iid.size());
    for (std::size_t i = 0; i < iid.size(); ++i) tx[i] = std::log1p(iid[i]);
    CHECK(chi_lag1(iid, 0.98) == Catch::Approx(chi_lag1(tx, 0.98)).margin(1e-12));
}
