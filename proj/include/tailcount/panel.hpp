#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tailcount/error.hpp"
#include "tailcount/lowess.hpp"

namespace tailcount {

struct PanelDims {
    int sites = 0;  // S
    int runs = 0;   // R
    int years = 0;  // T1
    int days = 0;   // T2

    bool operator==(const PanelDims&) const = default;
    std::int64_t cells() const {
        return static_cast<std::int64_t>(sites) * runs * years * days;
    }
    std::int64_t day_slices() const {
        return static_cast<std::int64_t>(runs) * years * days;
    }
};

/// Daily intensity panel indexed (site, run, year, day), all 0-based
/// internally. Storage is day-slice contiguous: the S values for one
/// (run, year, day) sit next to each other. Immutable after
/// construction by convention; all operations below are pure.
class DailyPanel {
public:
    DailyPanel() = default;
    DailyPanel(PanelDims dims, int origin_year = 1)
        : dims_(dims), origin_year_(origin_year),
          values_(static_cast<std::size_t>(dims.cells()), 0.0) {
        if (dims.sites < 1 || dims.runs < 1 || dims.years < 1 || dims.days < 1)
            fail("InvalidConfig", "panel dimensions must all be >= 1");
    }

    const PanelDims& dims() const { return dims_; }
    int origin_year() const { return origin_year_; }

    std::size_t index(int site, int run, int year, int day) const {
        return (static_cast<std::size_t>((static_cast<std::int64_t>(run) * dims_.years + year) *
                                         dims_.days + day)) * dims_.sites + site;
    }
    double at(int site, int run, int year, int day) const {
        return values_[index(site, run, year, day)];
    }
    double& at(int site, int run, int year, int day) {
        return values_[index(site, run, year, day)];
    }

    /// All S site values for one (run, year, day).
    std::span<const double> day_slice(int run, int year, int day) const {
        return {values_.data() + index(0, run, year, day),
                static_cast<std::size_t>(dims_.sites)};
    }
    /// One (run, year) slab: T2 consecutive day slices.
    std::span<const double> year_block(int run, int year) const {
        return {values_.data() + index(0, run, year, 0),
                static_cast<std::size_t>(dims_.days) * dims_.sites};
    }
    std::span<double> year_block_mut(int run, int year) {
        return {values_.data() + index(0, run, year, 0),
                static_cast<std::size_t>(dims_.days) * dims_.sites};
    }

    std::span<const double> flat() const { return values_; }
    std::span<double> flat_mut() { return values_; }

private:
    PanelDims dims_;
    int origin_year_ = 1;
    std::vector<double> values_;
};

enum class PanelLayout { long_csv, wide_csv };

enum class SeasonalPooling { per_run, pooled_all_runs };

struct SeasonalProfile {
    std::vector<double> day_mean;
    std::vector<double> smoothed;
    SeasonalPooling pooled_over = SeasonalPooling::pooled_all_runs;
};

namespace detail {

inline double parse_value(std::string_view tok) {
    double v;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
        fail("NonNumeric", "cannot parse value '" + std::string(tok) + "'");
    return v;
}

inline int parse_index(std::string_view tok, const char* what) {
    int v;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail("NonNumeric", std::string("cannot parse ") + what + " index '" +
                               std::string(tok) + "'");
    if (v < 1)
        fail("NonNumeric", std::string(what) + " index must be >= 1, got " +
                               std::to_string(v));
    return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line,
                                               std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

struct RawCell {
    int run, year, day, site;
    double value;
};

inline DailyPanel assemble(std::vector<RawCell>& cells, int origin_year) {
    if (cells.empty()) fail("MissingCell", "input contains no data rows");
    PanelDims dims;
    for (const auto& c : cells) {
        dims.sites = std::max(dims.sites, c.site);
        dims.runs = std::max(dims.runs, c.run);
        dims.years = std::max(dims.years, c.year);
        dims.days = std::max(dims.days, c.day);
        if (c.value < 0)
            fail("NegativeValue", "negative intensity at (run " +
                                      std::to_string(c.run) + ", year " +
                                      std::to_string(c.year) + ", day " +
                                      std::to_string(c.day) + ", site " +
                                      std::to_string(c.site) + ")");
    }
    DailyPanel panel(dims, origin_year);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(dims.cells()), 0);
    for (const auto& c : cells) {
        std::size_t idx = panel.index(c.site - 1, c.run - 1, c.year - 1, c.day - 1);
        if (seen[idx])
            fail("NonNumeric", "duplicate cell at (run " + std::to_string(c.run) +
                                   ", year " + std::to_string(c.year) + ", day " +
                                   std::to_string(c.day) + ", site " +
                                   std::to_string(c.site) + ")");
        seen[idx] = 1;
        panel.at(c.site - 1, c.run - 1, c.year - 1, c.day - 1) = c.value;
    }
    // Classify incompleteness: a (run, year) whose set of present days is
    // short is a ragged year; a present day missing some site is a hole.
    for (int r = 0; r < dims.runs; ++r) {
        for (int t1 = 0; t1 < dims.years; ++t1) {
            for (int t2 = 0; t2 < dims.days; ++t2) {
                bool any = false, all = true;
                for (int i = 0; i < dims.sites; ++i) {
                    bool s = seen[panel.index(i, r, t1, t2)];
                    any = any || s;
                    all = all && s;
                }
                if (!any)
                    fail("RaggedYear", "run " + std::to_string(r + 1) + ", year " +
                                           std::to_string(t1 + 1) + " has no day " +
                                           std::to_string(t2 + 1));
                if (!all)
                    fail("MissingCell", "incomplete day (run " + std::to_string(r + 1) +
                                            ", year " + std::to_string(t1 + 1) +
                                            ", day " + std::to_string(t2 + 1) + ")");
            }
        }
    }
    return panel;
}

}  // namespace detail

/// Parse a long (`run,year,day,site,value`) or wide
/// (`run,year,day,site_1..site_S`) CSV into a complete panel.
inline DailyPanel load_panel(const std::string& path, PanelLayout layout,
                             int origin_year = 1) {
    std::ifstream in(path);
    if (!in) fail("IoFailure", "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) fail("MissingCell", "empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string_view> tok;
    detail::split_csv(line, tok);
    std::vector<detail::RawCell> cells;
    if (layout == PanelLayout::long_csv) {
        if (tok.size() != 5 || tok[0] != "run" || tok[1] != "year" ||
            tok[2] != "day" || tok[3] != "site" || tok[4] != "value")
            fail("NonNumeric", "expected header 'run,year,day,site,value'");
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            detail::split_csv(line, tok);
            if (tok.size() != 5) fail("NonNumeric", "malformed row: " + line);
            cells.push_back({detail::parse_index(tok[0], "run"),
                             detail::parse_index(tok[1], "year"),
                             detail::parse_index(tok[2], "day"),
                             detail::parse_index(tok[3], "site"),
                             detail::parse_value(tok[4])});
        }
    } else {
        if (tok.size() < 4 || tok[0] != "run" || tok[1] != "year" || tok[2] != "day")
            fail("NonNumeric", "expected header 'run,year,day,site_1,...'");
        const int S = static_cast<int>(tok.size()) - 3;
        for (int i = 0; i < S; ++i) {
            if (tok[3 + i] != "site_" + std::to_string(i + 1))
                fail("NonNumeric", "expected column 'site_" + std::to_string(i + 1) + "'");
        }
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            detail::split_csv(line, tok);
            if (static_cast<int>(tok.size()) != S + 3)
                fail("NonNumeric", "malformed row: " + line);
            int run = detail::parse_index(tok[0], "run");
            int year = detail::parse_index(tok[1], "year");
            int day = detail::parse_index(tok[2], "day");
            for (int i = 0; i < S; ++i)
                cells.push_back({run, year, day, i + 1, detail::parse_value(tok[3 + i])});
        }
    }
    return detail::assemble(cells, origin_year);
}

/// Serialize at full round-trip precision so load(write(p)) == p bit-exactly.
inline void write_panel(const DailyPanel& panel, const std::string& path,
                        PanelLayout layout = PanelLayout::long_csv) {
    std::ofstream out(path);
    if (!out) fail("IoFailure", "cannot write '" + path + "'");
    const auto& d = panel.dims();
    char buf[40];
    if (layout == PanelLayout::long_csv) {
        out << "run,year,day,site,value\n";
        for (int r = 0; r < d.runs; ++r)
            for (int t1 = 0; t1 < d.years; ++t1)
                for (int t2 = 0; t2 < d.days; ++t2)
                    for (int i = 0; i < d.sites; ++i) {
                        std::snprintf(buf, sizeof(buf), "%.17g",
                                      panel.at(i, r, t1, t2));
                        out << (r + 1) << ',' << (t1 + 1) << ',' << (t2 + 1) << ','
                            << (i + 1) << ',' << buf << '\n';
                    }
    } else {
        out << "run,year,day";
        for (int i = 0; i < d.sites; ++i) out << ",site_" << (i + 1);
        out << '\n';
        for (int r = 0; r < d.runs; ++r)
            for (int t1 = 0; t1 < d.years; ++t1)
                for (int t2 = 0; t2 < d.days; ++t2) {
                    out << (r + 1) << ',' << (t1 + 1) << ',' << (t2 + 1);
                    for (int i = 0; i < d.sites; ++i) {
                        std::snprintf(buf, sizeof(buf), "%.17g",
                                      panel.at(i, r, t1, t2));
                        out << ',' << buf;
                    }
                    out << '\n';
                }
    }
    if (!out) fail("IoFailure", "write failed for '" + path + "'");
}

/// out[site][run][year] flattened as ((site * R) + run) * T1 + year.
struct YearlyMaxima {
    PanelDims dims;  // days unused
    std::vector<double> values;

    double at(int site, int run, int year) const {
        return values[(static_cast<std::size_t>(site) * dims.runs + run) * dims.years + year];
    }
};

inline YearlyMaxima yearly_maxima(const DailyPanel& panel) {
    const auto& d = panel.dims();
    YearlyMaxima out{d, std::vector<double>(
                            static_cast<std::size_t>(d.sites) * d.runs * d.years,
                            -std::numeric_limits<double>::infinity())};
    for (int r = 0; r < d.runs; ++r)
        for (int t1 = 0; t1 < d.years; ++t1)
            for (int t2 = 0; t2 < d.days; ++t2) {
                auto slice = panel.day_slice(r, t1, t2);
                for (int i = 0; i < d.sites; ++i) {
                    double& m = out.values[(static_cast<std::size_t>(i) * d.runs + r) *
                                               d.years + t1];
                    m = std::max(m, slice[i]);
                }
            }
    return out;
}

/// Day-of-year mean intensity (across sites, years, and either all runs
/// or a single one), with a LOWESS-smoothed copy.
inline SeasonalProfile seasonal_profile(const DailyPanel& panel,
                                        double lowess_fraction = 0.1,
                                        std::optional<int> run = std::nullopt) {
    const auto& d = panel.dims();
    if (run && (*run < 0 || *run >= d.runs))
        fail("IndexOutOfRange", "run index out of range");
    SeasonalProfile prof;
    prof.pooled_over = run ? SeasonalPooling::per_run : SeasonalPooling::pooled_all_runs;
    prof.day_mean.assign(d.days, 0.0);
    const int r_lo = run ? *run : 0;
    const int r_hi = run ? *run + 1 : d.runs;
    const double denom = static_cast<double>(d.sites) * (r_hi - r_lo) * d.years;
    for (int r = r_lo; r < r_hi; ++r)
        for (int t1 = 0; t1 < d.years; ++t1)
            for (int t2 = 0; t2 < d.days; ++t2) {
                auto slice = panel.day_slice(r, t1, t2);
                double s = 0;
                for (double v : slice) s += v;
                prof.day_mean[t2] += s;
            }
    for (double& v : prof.day_mean) v /= denom;

    std::vector<double> x(d.days);
    for (int t2 = 0; t2 < d.days; ++t2) x[t2] = t2 + 1;
    prof.smoothed = lowess_smooth(x, prof.day_mean, lowess_fraction);
    return prof;
}

/// Subtract the smoothed day-of-year mean from every cell. Output can go
/// negative; it feeds diagnostics only, never event counting.
inline DailyPanel deseasonalize(const DailyPanel& panel, const SeasonalProfile& profile) {
    const auto& d = panel.dims();
    if (static_cast<int>(profile.smoothed.size()) != d.days)
        fail("LengthMismatch", "seasonal profile length does not match day dimension");
    DailyPanel out(d, panel.origin_year());
    for (int r = 0; r < d.runs; ++r)
        for (int t1 = 0; t1 < d.years; ++t1)
            for (int t2 = 0; t2 < d.days; ++t2)
                for (int i = 0; i < d.sites; ++i)
                    out.at(i, r, t1, t2) = panel.at(i, r, t1, t2) - profile.smoothed[t2];
    return out;
}

}  // namespace tailcount
