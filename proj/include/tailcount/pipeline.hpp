#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailcount/bootstrap.hpp"
#include "tailcount/counting.hpp"
#include "tailcount/error.hpp"
#include "tailcount/panel.hpp"
#include "tailcount/regression.hpp"
#include "tailcount/report.hpp"

namespace tailcount {

enum class Task { task1, task2, task3, custom };

struct RunConfig {
    std::string input_path;
    PanelLayout layout = PanelLayout::long_csv;
    Task task = Task::custom;
    int m = 1;
    double u_target = 0;
    Temporal temporal = Temporal::single_day;
    double grid_min = 0, grid_max = 0, grid_step = 0.01;
    int B = 500;
    std::uint64_t seed = 0;
    double ci_level = 0.95;
    BlockMode block_mode = BlockMode::per_run_pooled;
    int hist_bins = 30;
    std::string output_dir;
};

/// Competition task presets: event definition plus the default
/// threshold grid used for the sub-asymptotic counts.
inline void apply_task_preset(RunConfig& cfg) {
    switch (cfg.task) {
        case Task::task1:
            cfg.m = 25;
            cfg.u_target = 1.7;
            cfg.temporal = Temporal::single_day;
            cfg.grid_min = 1.10;
            cfg.grid_max = 1.50;
            break;
        case Task::task2:
            cfg.m = 6;
            cfg.u_target = 5.7;
            cfg.temporal = Temporal::single_day;
            cfg.grid_min = 1.10;
            cfg.grid_max = 5.50;
            break;
        case Task::task3:
            cfg.m = 3;
            cfg.u_target = 5.0;
            cfg.temporal = Temporal::run_at_least_two_days;
            cfg.grid_min = 1.10;
            cfg.grid_max = 4.50;
            break;
        case Task::custom:
            break;
    }
}

inline const char* task_name(Task t) {
    switch (t) {
        case Task::task1: return "task1";
        case Task::task2: return "task2";
        case Task::task3: return "task3";
        default: return "custom";
    }
}

inline const char* temporal_name(Temporal t) {
    return t == Temporal::single_day ? "single_day" : "run_at_least_two_days";
}

struct PipelineResult {
    CountSeries series;
    PowerLawFit fit;
    double point_estimate = 0;
    std::optional<BootstrapDistribution> dist;
    std::optional<std::pair<double, double>> ci;
};

/// sweep -> fit -> predict, optionally followed by the year-block
/// bootstrap. The panel is loaded by the caller so the same instance can
/// back several invocations.
inline PipelineResult run_pipeline(const DailyPanel& panel, const RunConfig& cfg,
                                   bool with_bootstrap) {
    PipelineResult res;
    EventSpec spec{cfg.m, 0.0, cfg.temporal};
    auto grid = make_grid(cfg.grid_min, cfg.grid_max, cfg.grid_step);
    res.series = sweep_thresholds(panel, spec, grid);
    res.fit = fit_power_law(res.series);
    res.point_estimate = predict_count(res.fit, cfg.u_target);
    if (with_bootstrap) {
        res.dist = bootstrap_target(panel, spec, grid, cfg.u_target, cfg.B,
                                    cfg.seed, cfg.block_mode);
        res.ci = percentile_ci(*res.dist, cfg.ci_level);
    }
    return res;
}

/// Write the full artifact set for one pipeline invocation into
/// output_dir and return the rendered report JSON.
inline std::string write_pipeline_outputs(const PipelineResult& res,
                                          const RunConfig& cfg) {
    const std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
    write_count_series(res.series, dir + "/count_series.csv");
    write_fit_json(res.fit, dir + "/fit.json");
    write_loglog_csv(res.series, res.fit, dir + "/loglog.csv");
    if (res.dist) {
        write_bootstrap_csv(*res.dist, dir + "/bootstrap.csv");
        write_bootstrap_summary_json(*res.dist, res.point_estimate, res.ci->first,
                                     res.ci->second, cfg.ci_level,
                                     dir + "/bootstrap_summary.json");
        write_hist_csv(res.dist->estimates, cfg.hist_bins, dir + "/hist.csv");
    }

    ReportInputs rep;
    rep.task = task_name(cfg.task);
    rep.m = cfg.m;
    rep.u_target = cfg.u_target;
    rep.temporal = temporal_name(cfg.temporal);
    rep.point_estimate = res.point_estimate;
    if (res.ci) {
        rep.ci_low = res.ci->first;
        rep.ci_high = res.ci->second;
        rep.ci_level = cfg.ci_level;
    }
    rep.fit = res.fit;
    rep.count_series_path = "count_series.csv";
    if (res.dist) {
        rep.B = res.dist->B;
        rep.n_failed = res.dist->n_failed;
        rep.seed = res.dist->base_seed;
    }
    std::string report = render_report(rep);
    write_text(dir + "/report.json", report);
    return report;
}

}  // namespace tailcount
