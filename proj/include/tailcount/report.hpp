#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tailcount/bootstrap.hpp"
#include "tailcount/counting.hpp"
#include "tailcount/error.hpp"
#include "tailcount/regression.hpp"
#include "tailcount/scoring.hpp"

namespace tailcount {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal that round-trips, capped at 12 significant digits.
/// Fixed formatting keeps report bytes identical across runs.
inline std::string fmt_double(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    const double target = std::strtod(buf, nullptr);
    for (int p = 1; p < 12; ++p) {
        char s[48];
        std::snprintf(s, sizeof(s), "%.*g", p, x);
        if (std::strtod(s, nullptr) == target) return s;
    }
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

/// Minimal ordered-key JSON builder; keys are emitted in insertion order
/// so reports are byte-stable.
class JsonObject {
public:
    JsonObject& add(const std::string& key, double v) {
        return raw(key, fmt_double(v));
    }
    JsonObject& add(const std::string& key, int v) {
        return raw(key, std::to_string(v));
    }
    JsonObject& add(const std::string& key, std::int64_t v) {
        return raw(key, std::to_string(v));
    }
    JsonObject& add(const std::string& key, std::uint64_t v) {
        return raw(key, std::to_string(v));
    }
    JsonObject& add(const std::string& key, const std::string& v) {
        return raw(key, "\"" + json_escape(v) + "\"");
    }
    JsonObject& add(const std::string& key, const char* v) {
        return add(key, std::string(v));
    }
    JsonObject& add_null(const std::string& key) { return raw(key, "null"); }
    JsonObject& raw(const std::string& key, const std::string& value) {
        entries_.push_back("\"" + json_escape(key) + "\": " + value);
        return *this;
    }

    std::string str(int indent = 0) const {
        std::string pad(indent, ' ');
        std::string inner_pad(indent + 2, ' ');
        std::string out = "{\n";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            out += inner_pad + entries_[i];
            if (i + 1 < entries_.size()) out += ',';
            out += '\n';
        }
        out += pad + "}";
        return out;
    }

private:
    std::vector<std::string> entries_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write '" + path + "'");
    out << content;
    if (!out) fail("IoFailure", "write failed for '" + path + "'");
}

inline JsonObject fit_json(const PowerLawFit& fit) {
    JsonObject obj;
    obj.add("c_prime", fit.c_prime)
        .add("alpha_prime", fit.alpha_prime)
        .add("se_c_prime", fit.se_c_prime)
        .add("se_alpha_prime", fit.se_alpha_prime)
        .add("r_squared", fit.r_squared)
        .add("n_used", fit.n_used)
        .add("dropped_zero_counts", fit.dropped_zero_counts);
    return obj;
}

inline void write_fit_json(const PowerLawFit& fit, const std::string& path) {
    write_text(path, fit_json(fit).str() + "\n");
}

inline void write_bootstrap_csv(const BootstrapDistribution& dist,
                                const std::string& path) {
    std::string out = "replicate,estimate\n";
    for (std::size_t b = 0; b < dist.estimates.size(); ++b)
        out += std::to_string(b + 1) + "," + fmt_double(dist.estimates[b]) + "\n";
    write_text(path, out);
}

inline void write_bootstrap_summary_json(const BootstrapDistribution& dist,
                                         double estimate, double ci_low,
                                         double ci_high, double level,
                                         const std::string& path) {
    JsonObject obj;
    obj.add("estimate", estimate)
        .add("ci_low", ci_low)
        .add("ci_high", ci_high)
        .add("level", level)
        .add("B", dist.B)
        .add("n_failed", dist.n_failed)
        .add("base_seed", dist.base_seed);
    write_text(path, obj.str() + "\n");
}

inline void write_hist_csv(std::span<const double> values, int n_bins,
                           const std::string& path) {
    auto bins = histogram(values, n_bins);
    std::string out = "bin_left,bin_right,count\n";
    for (const auto& b : bins)
        out += fmt_double(b.left) + "," + fmt_double(b.right) + "," +
               std::to_string(b.count) + "\n";
    write_text(path, out);
}

inline void write_loglog_csv(const CountSeries& series, const PowerLawFit& fit,
                             const std::string& path) {
    auto rep = goodness_report(fit, series);
    std::string out = "u,count,log_u,log_count,fitted_log_count\n";
    for (const auto& row : rep.rows) {
        out += fmt_double(row.u) + "," + std::to_string(row.count) + "," +
               fmt_double(row.log_u) + ",";
        out += (row.count > 0 ? fmt_double(row.log_count) : std::string("nan"));
        out += "," + fmt_double(row.fitted_log_count) + "\n";
    }
    write_text(path, out);
}

struct ReportInputs {
    std::string task;
    int m = 0;
    double u_target = 0;
    std::string temporal;
    double point_estimate = 0;
    std::optional<double> ci_low, ci_high;
    std::optional<double> ci_level;
    PowerLawFit fit;
    std::string count_series_path;
    std::optional<int> B;
    std::optional<int> n_failed;
    std::optional<std::uint64_t> seed;
};

inline std::string render_report(const ReportInputs& in) {
    JsonObject obj;
    obj.add("task", in.task)
        .add("m", in.m)
        .add("u_target", in.u_target)
        .add("temporal", in.temporal)
        .add("point_estimate", in.point_estimate);
    if (in.ci_low && in.ci_high) {
        JsonObject ci;
        ci.add("low", *in.ci_low).add("high", *in.ci_high).add("level", *in.ci_level);
        obj.raw("ci", ci.str(2));
    } else {
        obj.add_null("ci");
    }
    obj.raw("fit", fit_json(in.fit).str(2));
    obj.add("count_series", in.count_series_path);
    if (in.B) {
        JsonObject bs;
        bs.add("B", *in.B).add("n_failed", *in.n_failed).add("base_seed", *in.seed);
        obj.raw("bootstrap", bs.str(2));
    } else {
        obj.add_null("bootstrap");
    }
    obj.add("version", kVersion);
    return obj.str() + "\n";
}

inline std::string render_error(const std::string& code, const std::string& message) {
    JsonObject obj;
    obj.add("error", code).add("message", message).add("version", kVersion);
    return obj.str() + "\n";
}

}  // namespace tailcount
