// tailcount CLI: validate / diagnose / count / estimate / bootstrap /
// simulate / score over daily multi-run precipitation panels.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailcount/tailcount.hpp"

namespace tc = tailcount;
using nlohmann::json;

namespace {

struct CliOptions {
    tc::RunConfig cfg;
    std::string config_path;
    std::string task = "custom";
    std::string layout = "long";
    std::string block_mode = "per_run_pooled";
};

tc::PanelLayout parse_layout(const std::string& s) {
    if (s == "long") return tc::PanelLayout::long_csv;
    if (s == "wide") return tc::PanelLayout::wide_csv;
    tc::fail("InvalidConfig", "unknown layout '" + s + "' (expected long|wide)");
}

tc::Task parse_task(const std::string& s) {
    if (s == "task1") return tc::Task::task1;
    if (s == "task2") return tc::Task::task2;
    if (s == "task3") return tc::Task::task3;
    if (s == "custom") return tc::Task::custom;
    tc::fail("InvalidConfig", "unknown task '" + s + "'");
}

void load_config_file(CliOptions& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) tc::fail("IoFailure", "cannot open config '" + opt.config_path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        tc::fail("InvalidConfig", std::string("config parse error: ") + e.what());
    }
    auto& c = opt.cfg;
    if (j.contains("input")) c.input_path = j["input"].get<std::string>();
    if (j.contains("layout")) opt.layout = j["layout"].get<std::string>();
    if (j.contains("task")) opt.task = j["task"].get<std::string>();
    if (j.contains("m")) c.m = j["m"].get<int>();
    if (j.contains("u_target")) c.u_target = j["u_target"].get<double>();
    if (j.contains("temporal"))
        c.temporal = j["temporal"].get<std::string>() == "run_at_least_two_days"
                         ? tc::Temporal::run_at_least_two_days
                         : tc::Temporal::single_day;
    if (j.contains("grid_min")) c.grid_min = j["grid_min"].get<double>();
    if (j.contains("grid_max")) c.grid_max = j["grid_max"].get<double>();
    if (j.contains("grid_step")) c.grid_step = j["grid_step"].get<double>();
    if (j.contains("replicates")) c.B = j["replicates"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("ci_level")) c.ci_level = j["ci_level"].get<double>();
    if (j.contains("block_mode")) opt.block_mode = j["block_mode"].get<std::string>();
    if (j.contains("out")) c.output_dir = j["out"].get<std::string>();
}

void finalize_config(CliOptions& opt, bool needs_grid = true) {
    opt.cfg.layout = parse_layout(opt.layout);
    opt.cfg.task = parse_task(opt.task);
    if (opt.block_mode == "per_run_pooled")
        opt.cfg.block_mode = tc::BlockMode::per_run_pooled;
    else if (opt.block_mode == "same_years_all_runs")
        opt.cfg.block_mode = tc::BlockMode::same_years_all_runs;
    else
        tc::fail("InvalidConfig", "unknown block mode '" + opt.block_mode + "'");
    tc::apply_task_preset(opt.cfg);
    if (needs_grid) {
        if (!(opt.cfg.grid_min < opt.cfg.grid_max) || !(opt.cfg.grid_step > 0))
            tc::fail("InvalidConfig", "grid requires min < max and step > 0");
        if (opt.cfg.u_target <= opt.cfg.grid_max)
            std::cerr << "warning: u_target " << opt.cfg.u_target
                      << " is inside the fitted grid; extrapolation is the "
                         "intended regime\n";
    }
    if (!opt.cfg.output_dir.empty())
        std::filesystem::create_directories(opt.cfg.output_dir);
}

void add_common_flags(CLI::App* sub, CliOptions& opt, bool needs_input) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    auto* in = sub->add_option("--input", opt.cfg.input_path, "panel CSV path");
    if (needs_input) in->required();
    sub->add_option("--layout", opt.layout, "CSV layout: long|wide");
    sub->add_option("--task", opt.task, "task1|task2|task3|custom");
    sub->add_option("--m", opt.cfg.m, "sites required to exceed (custom task)");
    sub->add_option("--u-target", opt.cfg.u_target, "extrapolation threshold");
    sub->add_option("--grid-min", opt.cfg.grid_min, "lowest fitted threshold");
    sub->add_option("--grid-max", opt.cfg.grid_max, "highest fitted threshold");
    sub->add_option("--grid-step", opt.cfg.grid_step, "threshold spacing");
    sub->add_option("--replicates", opt.cfg.B, "bootstrap replicates");
    sub->add_option("--seed", opt.cfg.seed, "base RNG seed");
    sub->add_option("--ci-level", opt.cfg.ci_level, "confidence level");
    sub->add_option("--block-mode", opt.block_mode,
                    "per_run_pooled|same_years_all_runs");
    sub->add_option("--out", opt.cfg.output_dir, "output directory");
}

int run_validate(CliOptions& opt) {
    finalize_config(opt, false);
    auto panel = tc::load_panel(opt.cfg.input_path, opt.cfg.layout);
    tc::JsonObject obj;
    obj.add("sites", panel.dims().sites)
        .add("runs", panel.dims().runs)
        .add("years", panel.dims().years)
        .add("days", panel.dims().days)
        .add("cells", panel.dims().cells())
        .add("status", "ok");
    std::cout << obj.str() << "\n";
    return 0;
}

int run_count(CliOptions& opt) {
    finalize_config(opt);
    auto panel = tc::load_panel(opt.cfg.input_path, opt.cfg.layout);
    tc::EventSpec spec{opt.cfg.m, 0.0, opt.cfg.temporal};
    auto grid = tc::make_grid(opt.cfg.grid_min, opt.cfg.grid_max, opt.cfg.grid_step);
    auto series = tc::sweep_thresholds(panel, spec, grid);
    const std::string dir = opt.cfg.output_dir.empty() ? "." : opt.cfg.output_dir;
    tc::write_count_series(series, dir + "/count_series.csv");
    std::cout << "wrote " << dir << "/count_series.csv (" << series.thresholds.size()
              << " thresholds)\n";
    return 0;
}

int run_estimate(CliOptions& opt, bool with_bootstrap) {
    finalize_config(opt);
    auto panel = tc::load_panel(opt.cfg.input_path, opt.cfg.layout);
    auto res = tc::run_pipeline(panel, opt.cfg, with_bootstrap);
    std::cout << tc::write_pipeline_outputs(res, opt.cfg);
    return 0;
}

int run_diagnose(CliOptions& opt) {
    finalize_config(opt, false);
    auto panel = tc::load_panel(opt.cfg.input_path, opt.cfg.layout);
    const auto& d = panel.dims();
    const std::string dir = opt.cfg.output_dir.empty() ? "." : opt.cfg.output_dir;

    auto maxima = tc::yearly_maxima(panel);
    std::vector<double> pooled, pooled_years;
    pooled.reserve(static_cast<std::size_t>(d.runs) * d.years);

    // slope table + per-site tests on pooled-run yearly maxima
    std::string slope_csv = "site,beta1,ci_low,ci_high\n";
    std::string tests = "[\n";
    for (int i = 0; i < d.sites; ++i) {
        pooled.clear();
        pooled_years.clear();
        for (int r = 0; r < d.runs; ++r)
            for (int t1 = 0; t1 < d.years; ++t1) {
                pooled.push_back(maxima.at(i, r, t1));
                pooled_years.push_back(t1 + 1.0);
            }
        auto gev = tc::fit_gev_trend(pooled, pooled_years);
        slope_csv += std::to_string(i + 1) + "," + tc::fmt_double(gev.beta1) + "," +
                     tc::fmt_double(gev.beta1_ci_low()) + "," +
                     tc::fmt_double(gev.beta1_ci_high()) + "\n";
        auto rt = tc::runs_test(pooled);
        auto adf = tc::adf_test(pooled);
        tc::JsonObject obj;
        obj.add("site", i + 1)
            .add("gev_beta1", gev.beta1)
            .add("gev_beta1_se", gev.ses[1])
            .add("gev_sigma", gev.sigma)
            .add("gev_xi", gev.xi)
            .add("gev_converged", gev.convergence ? "true" : "false")
            .add("runs_test_z", rt.statistic)
            .add("runs_test_p", rt.p_value)
            .add("adf_stat", adf.statistic)
            .add("adf_p", adf.p_value)
            .add("adf_p_clamped", adf.clamped ? "true" : "false");
        tests += obj.str(2);
        tests += (i + 1 < d.sites) ? ",\n" : "\n";
    }
    tests += "]\n";
    tc::write_text(dir + "/gev_slopes.csv", slope_csv);
    tc::write_text(dir + "/site_tests.json", tests);

    // lag-1 extremal dependence per run on the deseasonalized,
    // site-averaged, concatenated-year series
    auto profile = tc::seasonal_profile(panel, 0.1);
    auto deseason = tc::deseasonalize(panel, profile);
    const double qs[] = {0.975, 0.98, 0.985, 0.99};
    std::string chi = "[\n";
    for (int r = 0; r < d.runs; ++r) {
        std::vector<double> series;
        series.reserve(static_cast<std::size_t>(d.years) * d.days);
        for (int t1 = 0; t1 < d.years; ++t1)
            for (int t2 = 0; t2 < d.days; ++t2) {
                auto slice = deseason.day_slice(r, t1, t2);
                double s = 0;
                for (double v : slice) s += v;
                series.push_back(s / d.sites);
            }
        tc::JsonObject obj;
        obj.add("run", r + 1);
        for (double q : qs) {
            char key[32];
            std::snprintf(key, sizeof(key), "chi_q%g", q);
            obj.add(key, tc::chi_lag1(series, q));
        }
        chi += obj.str(2);
        chi += (r + 1 < d.runs) ? ",\n" : "\n";
    }
    chi += "]\n";
    tc::write_text(dir + "/chi_lag1.json", chi);
    std::cout << "wrote " << dir << "/gev_slopes.csv, site_tests.json, chi_lag1.json\n";
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
    std::ifstream in(config_path);
    if (!in) tc::fail("IoFailure", "cannot open config '" + config_path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        tc::fail("InvalidConfig", std::string("config parse error: ") + e.what());
    }
    tc::SimConfig cfg;
    cfg.dims.sites = j.value("sites", 25);
    cfg.dims.runs = j.value("runs", 4);
    cfg.dims.years = j.value("years", 165);
    cfg.dims.days = j.value("days", 365);
    cfg.alpha = j.value("alpha", 2.0);
    std::string dep = j.value("dependence", "independent");
    if (dep == "comonotone")
        cfg.dependence = tc::Dependence::comonotone;
    else if (dep == "independent")
        cfg.dependence = tc::Dependence::independent;
    else if (dep == "common_factor")
        cfg.dependence = tc::Dependence::common_factor;
    else
        tc::fail("InvalidConfig", "unknown dependence '" + dep + "'");
    cfg.factor_weight = j.value("factor_weight", 0.5);
    cfg.seasonal_amplitude = j.value("seasonal_amplitude", 0.0);
    cfg.trend_slope = j.value("trend_slope", 0.0);
    cfg.seed = j.value("seed", 0ULL);
    auto panel = tc::simulate_panel(cfg);
    tc::write_panel(panel, out_path);
    std::cout << "wrote " << out_path << " (" << panel.dims().cells() << " cells)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compound precipitation exceedance estimation"};
    app.require_subcommand(1);

    CliOptions opt;
    auto* validate = app.add_subcommand("validate", "load and check a panel");
    add_common_flags(validate, opt, true);
    auto* diagnose = app.add_subcommand("diagnose", "trend/seasonality/dependence checks");
    add_common_flags(diagnose, opt, true);
    auto* count = app.add_subcommand("count", "empirical counts over a threshold grid");
    add_common_flags(count, opt, true);
    auto* estimate = app.add_subcommand("estimate", "point estimate via power-law fit");
    add_common_flags(estimate, opt, true);
    auto* boot = app.add_subcommand("bootstrap", "estimate with year-block bootstrap CI");
    add_common_flags(boot, opt, true);

    std::string sim_config, sim_out = "panel.csv";
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic panel");
    simulate->add_option("--config", sim_config, "simulation config JSON")->required();
    simulate->add_option("--out", sim_out, "output panel CSV");

    double s_low = 0, s_high = 0, s_truth = 0, s_alpha = 0.05;
    auto* score = app.add_subcommand("score", "interval score of a CI against truth");
    score->add_option("--low", s_low)->required();
    score->add_option("--high", s_high)->required();
    score->add_option("--truth", s_truth)->required();
    score->add_option("--alpha", s_alpha, "score level (default 0.05)");

    CLI11_PARSE(app, argc, argv);

    try {
        load_config_file(opt);
        if (validate->parsed()) return run_validate(opt);
        if (diagnose->parsed()) return run_diagnose(opt);
        if (count->parsed()) return run_count(opt);
        if (estimate->parsed()) return run_estimate(opt, false);
        if (boot->parsed()) return run_estimate(opt, true);
        if (simulate->parsed()) return run_simulate(sim_config, sim_out);
        if (score->parsed()) {
            std::cout << tc::fmt_double(tc::score_interval(s_low, s_high, s_truth, s_alpha))
                      << "\n";
            return 0;
        }
    } catch (const tc::Error& e) {
        std::string msg = tc::render_error(e.code(), e.what());
        std::cout << msg;
        if (!opt.cfg.output_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(opt.cfg.output_dir, ec);
            if (!ec) {
                std::ofstream out(opt.cfg.output_dir + "/error.json");
                out << msg;
            }
        }
        return 2;
    } catch (const std::exception& e) {
        std::cout << tc::render_error("Internal", e.what());
        return 3;
    }
    return 0;
}
