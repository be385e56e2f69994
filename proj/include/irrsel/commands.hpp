#pragma once

// The four command-line workflows as library calls: analyze a ratings file,
// run the simulation study, sweep a design, and evaluate the grant-review
// examples.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irrsel/classify.hpp"
#include "irrsel/csv.hpp"
#include "irrsel/error.hpp"
#include "irrsel/format.hpp"
#include "irrsel/grant_reviews.hpp"
#include "irrsel/inference.hpp"
#include "irrsel/ratings.hpp"
#include "irrsel/report.hpp"
#include "irrsel/simulate.hpp"
#include "irrsel/simulate_io.hpp"
#include "irrsel/svg.hpp"
#include "irrsel/variance.hpp"

namespace irrsel {

// ---------------------------------------------------------------- analyze --

struct AnalyzeOptions {
    std::optional<std::int64_t> k;
    std::optional<double> p_select;
    Estimator estimator = Estimator::reml;
    std::size_t bootstrap = 2000; // 0 disables the bootstrap
    std::uint64_t seed = 0;
    double level = 0.95;
    unsigned threads = 0;
};

inline AnalysisReport cmd_analyze(const RatingsTable& raw, const AnalyzeOptions& opt) {
    if (opt.k.has_value() == opt.p_select.has_value()) {
        throw Error(ErrorKind::usage, "cli", "exactly one of --k and --p-select is required");
    }
    if (!(opt.level > 0.0 && opt.level < 1.0)) throw Error(ErrorKind::usage, "cli", "--level must lie in (0,1)");

    const auto table = validate_ratings(raw);
    AnalysisReport r;
    r.vc = estimate_variance_components(table, opt.estimator);
    r.irr = irr_estimate(r.vc);

    const auto n = static_cast<std::int64_t>(table.n_applicants());
    const auto design = opt.k ? SelectionDesign::from_counts(n, *opt.k, r.irr.j)
                              : SelectionDesign::from_proportion(*opt.p_select, r.irr.j, n);
    r.design = {design.n_applicants(), design.k_selected(), design.p_select(), design.j(),
                opt.k ? "k" : "round(p_select*N)"};

    const double p_tp = true_positive_prob(r.irr.irr_j, design.p_select());
    r.table = classification_table(p_tp, design.p_select());
    r.metrics = metrics(p_tp, design.p_select());
    r.metrics.irr_j = r.irr.irr_j;
    r.prediction = prediction_interval(p_tp, design, opt.level);

    r.metadata.estimator = std::string(to_string(opt.estimator));
    r.metadata.level = opt.level;
    if (opt.bootstrap > 0) {
        BootstrapConfig cfg{opt.bootstrap, opt.level, opt.seed, opt.threads};
        r.bootstrap = bootstrap_ci(table, design, cfg, opt.estimator);
        r.metadata.seed = opt.seed;
        r.metadata.bootstrap_resamples = opt.bootstrap;
        r.metadata.bootstrap_skipped = r.bootstrap->n_skipped;
    }
    return r;
}

/// FPR and FNR across selection proportions with the analysed point marked.
inline std::string analysis_figure(const AnalysisReport& r) {
    std::vector<double> x, fpr, fnr;
    for (int i = 1; i < 100; ++i) {
        const double p = i / 100.0;
        const auto m = metrics(true_positive_prob(r.irr.irr_j, p), p);
        x.push_back(p);
        fpr.push_back(*m.fpr);
        fnr.push_back(*m.fnr);
    }
    PlotPanel panel{"IRR_J = " + format_fixed(r.irr.irr_j, 3), "proportion selected", "rate", {},
                    std::pair{0.0, 1.0}, std::pair{0.0, 1.0}, true};
    panel.series.push_back({"FPR", x, fpr, LineStyle::solid, false, "#1f77b4"});
    panel.series.push_back({"FNR", x, fnr, LineStyle::dashed, false, "#d62728"});
    panel.series.push_back({"design", {r.design.p_select}, {r.metrics.fpr.value_or(NAN)}, LineStyle::none, true,
                            "#000000"});
    return emit_plot({panel}, PlotLayout{"Selection error rates", 1, 1});
}

// --------------------------------------------------------------- simulate --

struct SimulateOptions {
    std::string preset = "desk";
    std::uint64_t seed = 0;
    std::optional<std::size_t> replications;
    Estimator estimator = Estimator::anova;
    unsigned threads = 0;
    bool plot = false;
};

inline SimulationConfig simulation_config(const SimulateOptions& opt) {
    SimulationConfig cfg;
    if (opt.preset == "desk") {
        cfg = desk_preset(opt.seed);
    } else if (opt.preset == "full") {
        cfg = full_preset(opt.seed);
    } else {
        throw Error(ErrorKind::usage, "cli", "unknown preset '" + opt.preset + "' (expected desk or full)");
    }
    if (opt.replications) cfg.replications = *opt.replications;
    cfg.estimator = opt.estimator;
    cfg.threads = opt.threads;
    cfg.validate();
    return cfg;
}

/// File name -> contents for a finished study.
inline std::map<std::string, std::string> simulation_files(const SimulationSummary& s, bool plot) {
    std::map<std::string, std::string> files;
    files["summary.json"] = summary_text(s);
    for (const auto& c : s.conditions) files["condition_" + condition_name(c.condition) + ".csv"] = condition_csv(c);
    if (plot) {
        for (auto& [name, svg] : simulation_figures(s)) files[name] = std::move(svg);
    }
    return files;
}

inline void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : files) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error(ErrorKind::invalid_input, "cli", "cannot write '" + (dir / name).string() + "'");
        out << body;
    }
}

// ----------------------------------------------------------------- design --

struct SweepRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> out;
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(std::round((start + step * static_cast<double>(i)) * 1e12) / 1e12);
        return out;
    }
};

/// Parses "A:B:STEP".
inline SweepRange parse_sweep(const std::string& text) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
    SweepRange r;
    if (second == std::string::npos || !detail::parse_double(text.substr(0, first), r.start) ||
        !detail::parse_double(text.substr(first + 1, second - first - 1), r.stop) ||
        !detail::parse_double(text.substr(second + 1), r.step)) {
        throw Error(ErrorKind::usage, "cli", "sweep must look like A:B:STEP, got '" + text + "'");
    }
    if (!(r.step > 0.0) || !(r.start <= r.stop)) {
        throw Error(ErrorKind::usage, "cli", "sweep '" + text + "' needs A <= B and STEP > 0");
    }
    return r;
}

struct DesignOptions {
    double irr1 = 0.34;
    double j = 2.79;
    double p_select = 0.18;
    SweepRange sweep_j{1.0, 10.0, 1.0};
    SweepRange sweep_irr{0.1, 0.9, 0.1};
};

struct DesignSweep {
    ClassificationMetrics base;
    std::vector<double> j_values;   // includes the base j
    std::vector<double> irr_values; // includes the base irr1
    // grid[i][k]: irr_values[i], j_values[k]
    std::vector<std::vector<ClassificationMetrics>> grid;
};

namespace detail {

inline std::vector<double> with_value(std::vector<double> v, double x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    std::sort(v.begin(), v.end());
    return v;
}

inline Json metrics_row(double irr1, double j, const ClassificationMetrics& m) {
    return Json{{"irr1", irr1}, {"j", j}, {"irr_j", *m.irr_j}, {"p_select", m.p_select},
                {"tpr_ppv", *m.tpr_ppv}, {"fpr", *m.fpr}, {"fnr", *m.fnr}};
}

} // namespace detail

inline DesignSweep cmd_design(const DesignOptions& opt) {
    if (!(opt.irr1 >= 0.0 && opt.irr1 <= 1.0)) throw Error(ErrorKind::usage, "cli", "--irr1 must lie in [0,1]");
    if (!(opt.j >= 1.0)) throw Error(ErrorKind::usage, "cli", "--j must be >= 1");
    if (!(opt.p_select > 0.0 && opt.p_select < 1.0)) throw Error(ErrorKind::usage, "cli", "--p-select must lie in (0,1)");
    DesignSweep out;
    out.base = evaluate_selection(opt.irr1, opt.j, opt.p_select);
    out.j_values = detail::with_value(opt.sweep_j.values(), opt.j);
    out.irr_values = detail::with_value(opt.sweep_irr.values(), opt.irr1);
    if (out.j_values.front() < 1.0) throw Error(ErrorKind::usage, "cli", "--sweep-j values must be >= 1");
    if (out.irr_values.front() < 0.0 || out.irr_values.back() > 1.0) {
        throw Error(ErrorKind::usage, "cli", "--sweep-irr values must lie in [0,1]");
    }
    for (double irr : out.irr_values) {
        auto& row = out.grid.emplace_back();
        for (double j : out.j_values) row.push_back(evaluate_selection(irr, j, opt.p_select));
    }
    return out;
}

inline Json design_to_json(const DesignOptions& opt, const DesignSweep& s) {
    Json grid = Json::array();
    for (std::size_t i = 0; i < s.irr_values.size(); ++i) {
        for (std::size_t k = 0; k < s.j_values.size(); ++k) {
            grid.push_back(detail::metrics_row(s.irr_values[i], s.j_values[k], s.grid[i][k]));
        }
    }
    return Json{{"schema", "irrsel.design/1"},
                {"tool_version", kToolVersion},
                {"base", detail::metrics_row(opt.irr1, opt.j, s.base)},
                {"j_values", s.j_values},
                {"irr1_values", s.irr_values},
                {"grid", grid}};
}

/// Left: FPR over J, one line per irr1. Right: FPR over irr1, one line per J.
/// The base design's lines are drawn in black.
inline std::string design_figure(const DesignOptions& opt, const DesignSweep& s) {
    PlotPanel left{"Increasing the number of raters", "J", "FPR", {}, std::nullopt, std::pair{0.0, 1.0}, true};
    PlotPanel right{"Increasing IRR1", "IRR1", "FPR", {}, std::nullopt, std::pair{0.0, 1.0}, true};
    std::size_t colour = 0;
    for (std::size_t i = 0; i < s.irr_values.size(); ++i) {
        std::vector<double> y;
        for (const auto& m : s.grid[i]) y.push_back(*m.fpr);
        const bool base = s.irr_values[i] == opt.irr1;
        left.series.push_back({"IRR1 = " + format_shortest(s.irr_values[i]), s.j_values, y, LineStyle::solid, false,
                               base ? "#000000" : detail::palette(colour++), base ? 2.5 : 1.5});
    }
    colour = 0;
    for (std::size_t k = 0; k < s.j_values.size(); ++k) {
        std::vector<double> y;
        for (std::size_t i = 0; i < s.irr_values.size(); ++i) y.push_back(*s.grid[i][k].fpr);
        const bool base = s.j_values[k] == opt.j;
        right.series.push_back({"J = " + format_shortest(s.j_values[k]), s.irr_values, y, LineStyle::solid, false,
                                base ? "#000000" : detail::palette(colour++), base ? 2.5 : 1.5});
    }
    return emit_plot({left, right}, PlotLayout{"False positive rate at p_select = " + format_shortest(opt.p_select), 1, 2});
}

// ---------------------------------------------------------------- example --

struct ExampleVariantResult {
    GrantReviewVariant variant;
    std::vector<std::pair<double, ClassificationMetrics>> curve;  // p grid
    std::vector<std::pair<double, ClassificationMetrics>> actual; // at the selected proportion(s)
};

struct ExampleResult {
    std::vector<ExampleVariantResult> variants;
    double max_spread_actual = 0.0;
    double max_spread_actual_excluding_lower = 0.0;
    double max_spread_equal_p = 0.0;
    double max_spread_equal_p_at = 0.0;
    double max_spread_equal_p_excluding_lower = 0.0;
    double max_spread_equal_p_excluding_lower_at = 0.0;
};

inline ExampleResult cmd_example() {
    ExampleResult out;
    std::vector<double> grid;
    for (int i = 1; i < 100; ++i) grid.push_back(i / 100.0);

    double lo_all = 1.0, hi_all = 0.0, lo_ex = 1.0, hi_ex = 0.0;
    double p_min = 1.0, p_max = 0.0;
    for (const auto& v : expand_variants(grant_review_table())) {
        ExampleVariantResult r{v, metric_curve(v.irr1, v.j, grid), {}};
        std::vector<double> ps = {v.record->p_low};
        if (v.record->p_high != v.record->p_low) ps.push_back(v.record->p_high);
        r.actual = metric_curve(v.irr1, v.j, ps);
        for (const auto& [p, m] : r.actual) {
            lo_all = std::min(lo_all, *m.fpr);
            hi_all = std::max(hi_all, *m.fpr);
            if (!v.lower_irr) {
                lo_ex = std::min(lo_ex, *m.fpr);
                hi_ex = std::max(hi_ex, *m.fpr);
            }
        }
        p_min = std::min(p_min, v.record->p_low);
        p_max = std::max(p_max, v.record->p_high);
        out.variants.push_back(std::move(r));
    }
    out.max_spread_actual = hi_all - lo_all;
    out.max_spread_actual_excluding_lower = hi_ex - lo_ex;

    // Equal-proportion comparison over the range of observed selection rates.
    for (long step = std::lround(p_min * 100); step <= std::lround(p_max * 100); ++step) {
        const double p = static_cast<double>(step) / 100.0;
        double a_lo = 1.0, a_hi = 0.0, e_lo = 1.0, e_hi = 0.0;
        for (const auto& r : out.variants) {
            const double f = *evaluate_selection(r.variant.irr1, r.variant.j, p).fpr;
            a_lo = std::min(a_lo, f);
            a_hi = std::max(a_hi, f);
            if (!r.variant.lower_irr) {
                e_lo = std::min(e_lo, f);
                e_hi = std::max(e_hi, f);
            }
        }
        if (a_hi - a_lo > out.max_spread_equal_p) {
            out.max_spread_equal_p = a_hi - a_lo;
            out.max_spread_equal_p_at = p;
        }
        if (e_hi - e_lo > out.max_spread_equal_p_excluding_lower) {
            out.max_spread_equal_p_excluding_lower = e_hi - e_lo;
            out.max_spread_equal_p_excluding_lower_at = p;
        }
    }
    return out;
}

inline Json example_to_json(const ExampleResult& ex) {
    Json studies = Json::array();
    for (const auto& r : ex.variants) {
        const auto& rec = *r.variant.record;
        Json curve = Json::array();
        for (const auto& [p, m] : r.curve) curve.push_back(Json{{"p_select", p}, {"fpr", *m.fpr}});
        Json actual = Json::array();
        for (const auto& [p, m] : r.actual) {
            actual.push_back(Json{{"p_select", p}, {"tpr_ppv", *m.tpr_ppv}, {"fpr", *m.fpr}, {"fnr", *m.fnr}});
        }
        studies.push_back(Json{{"label", r.variant.label()},
                               {"study", rec.study},
                               {"proposals", rec.proposals},
                               {"n_proposals", rec.n_proposals},
                               {"irr1", r.variant.irr1},
                               {"j", r.variant.j},
                               {"irr_j", irr_multi(r.variant.irr1, r.variant.j)},
                               {"lower_irr_estimate", r.variant.lower_irr},
                               {"p_select_range", {rec.p_low, rec.p_high}},
                               {"actual", actual},
                               {"curve", curve}});
    }
    return Json{{"schema", "irrsel.example/1"},
                {"tool_version", kToolVersion},
                {"summary",
                 {{"max_fpr_spread_at_actual_p", ex.max_spread_actual},
                  {"max_fpr_spread_at_actual_p_excluding_lower_irr", ex.max_spread_actual_excluding_lower},
                  {"max_fpr_spread_at_equal_p", ex.max_spread_equal_p},
                  {"max_fpr_spread_at_equal_p_location", ex.max_spread_equal_p_at},
                  {"max_fpr_spread_at_equal_p_excluding_lower_irr", ex.max_spread_equal_p_excluding_lower},
                  {"max_fpr_spread_at_equal_p_excluding_lower_irr_location", ex.max_spread_equal_p_excluding_lower_at}}},
                {"studies", studies}};
}

/// FPR across selection proportions per study; thick segments and markers at
/// the actual selection range; lower reliability estimates dotted.
inline std::string example_figure(const ExampleResult& ex) {
    PlotPanel panel{"", "proportion selected", "false positive rate", {}, std::pair{0.0, 1.0}, std::pair{0.0, 1.0}, true};
    std::map<const GrantReviewRecord*, std::size_t> colour_of;
    for (const auto& r : ex.variants) {
        const auto [it, fresh] = colour_of.emplace(r.variant.record, colour_of.size());
        const std::string colour = detail::palette(it->second);
        const LineStyle style = r.variant.lower_irr ? LineStyle::dotted : LineStyle::solid;
        std::vector<double> x, y, ax, ay;
        for (const auto& [p, m] : r.curve) {
            x.push_back(p);
            y.push_back(*m.fpr);
        }
        for (const auto& [p, m] : r.actual) {
            ax.push_back(p);
            ay.push_back(*m.fpr);
        }
        panel.series.push_back({r.variant.label(), x, y, style, false, colour, 1.0});
        panel.series.push_back({"", ax, ay, style, true, colour, 4.0, false});
    }
    return emit_plot({panel}, PlotLayout{"Grant peer review: estimated false positive rate", 1, 1, 520.0, 380.0});
}

} // namespace irrsel
