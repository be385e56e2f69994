#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irrsel/irrsel.hpp"

namespace {

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw irrsel::Error(irrsel::ErrorKind::invalid_input, "cli", "cannot write '" + path + "'");
    out << text;
}

std::string render_table(const irrsel::AnalysisReport& r) {
    const auto f = [](const std::optional<double>& v) { return v ? irrsel::format_fixed(*v, 4) : std::string("n/a"); };
    std::string s;
    s += "variance components (" + r.metadata.estimator + "): mu=" + irrsel::format_fixed(r.vc.mu, 4) +
         " var_gamma=" + irrsel::format_fixed(r.vc.var_gamma, 4) +
         " var_epsilon=" + irrsel::format_fixed(r.vc.var_epsilon, 4) + "\n";
    s += "IRR1=" + irrsel::format_fixed(r.irr.irr1, 4) + "  IRR_J=" + irrsel::format_fixed(r.irr.irr_j, 4) +
         "  J=" + irrsel::format_fixed(r.irr.j, 2) + "  p_select=" + irrsel::format_fixed(r.design.p_select, 4) + "\n";
    s += "               selected   not selected\n";
    s += "  high ability " + irrsel::format_fixed(r.table.p_tp, 4) + "     " + irrsel::format_fixed(r.table.p_fn, 4) + "\n";
    s += "  other        " + irrsel::format_fixed(r.table.p_fp, 4) + "     " + irrsel::format_fixed(r.table.p_tn, 4) + "\n";
    s += "TPR/PPV=" + f(r.metrics.tpr_ppv) + "  FPR (false discovery rate)=" + f(r.metrics.fpr) +
         "  FNR (false omission rate)=" + f(r.metrics.fnr) + "\n";
    if (r.bootstrap) {
        const auto iv = [](const irrsel::Interval& i) {
            return "[" + irrsel::format_fixed(i.lower, 4) + ", " + irrsel::format_fixed(i.upper, 4) + "]";
        };
        s += "bootstrap " + irrsel::format_fixed(100 * r.metadata.level, 0) + "% CI: IRR1 " + iv(r.bootstrap->irr1) +
             "  FPR " + iv(r.bootstrap->rates.fpr) + "  FNR " + iv(r.bootstrap->rates.fnr) + "\n";
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rating-based selection procedures as binary classifiers"};
    app.set_version_flag("--version", std::string(irrsel::kToolVersion));
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Estimate reliability and selection error rates from a ratings CSV");
    std::string input, out_path, plot_path, estimator = "reml";
    irrsel::CsvSchema schema;
    std::optional<std::int64_t> k;
    std::optional<double> p_select;
    std::size_t bootstrap = 2000;
    std::uint64_t seed = 0;
    double level = 0.95;
    unsigned threads = 0;
    bool table_render = false;
    analyze->add_option("--input", input, "Ratings CSV")->required()->check(CLI::ExistingFile);
    auto* k_opt = analyze->add_option("--k", k, "Number of applicants selected");
    analyze->add_option("--p-select", p_select, "Proportion selected; k = round(p * N)")->excludes(k_opt);
    analyze->add_option("--estimator", estimator, "Variance-component estimator")
        ->check(CLI::IsMember({"anova", "reml"}));
    analyze->add_option("--bootstrap", bootstrap, "Bootstrap resamples (0 disables)");
    analyze->add_option("--seed", seed, "Bootstrap seed");
    analyze->add_option("--level", level, "Interval level");
    analyze->add_option("--threads", threads, "Worker threads (0 = all cores)");
    analyze->add_option("--col-applicant", schema.applicant, "Applicant column name");
    analyze->add_option("--col-rater", schema.rater, "Rater column name");
    analyze->add_option("--col-score", schema.score, "Score column name");
    analyze->add_option("--out", out_path, "Write the JSON report here instead of stdout");
    analyze->add_option("--plot", plot_path, "Write an SVG of FPR/FNR against the selected proportion");
    analyze->add_flag("--table", table_render, "Also print a human-readable table to stderr");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the quantile approximation");
    std::string preset = "desk", sim_out = "simulation", sim_estimator = "anova";
    std::uint64_t sim_seed = 0;
    std::optional<std::size_t> replications;
    unsigned sim_threads = 0;
    bool sim_plot = false;
    simulate->add_option("--preset", preset, "desk (200 replications, N = 100) or full")
        ->check(CLI::IsMember({"desk", "full"}));
    simulate->add_option("--seed", sim_seed, "Master seed");
    simulate->add_option("--out", sim_out, "Output directory");
    simulate->add_option("--replications", replications, "Override the preset's replication count");
    simulate->add_option("--estimator", sim_estimator, "Per-replication estimator")
        ->check(CLI::IsMember({"anova", "reml"}));
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    simulate->add_flag("--plot", sim_plot, "Also write SVG figures");

    // design
    auto* design = app.add_subcommand("design", "Sweep the number of raters and single-rater reliability");
    irrsel::DesignOptions design_opt;
    std::string sweep_j = "1:10:1", sweep_irr = "0.1:0.9:0.1", design_out, design_plot;
    design->add_option("--irr1", design_opt.irr1, "Single-rater reliability")->required();
    design->add_option("--j", design_opt.j, "Ratings per applicant")->required();
    design->add_option("--p-select", design_opt.p_select, "Proportion selected")->required();
    design->add_option("--sweep-j", sweep_j, "J sweep as A:B:STEP");
    design->add_option("--sweep-irr", sweep_irr, "IRR1 sweep as A:B:STEP");
    design->add_option("--out", design_out, "Write JSON here instead of stdout");
    design->add_option("--plot", design_plot, "Write the two-panel SVG here");

    // example
    auto* example = app.add_subcommand("example", "Evaluate published grant peer-review reliabilities");
    std::string example_out;
    bool example_plot = false;
    example->add_option("--out", example_out, "Output directory (default: JSON to stdout)");
    example->add_flag("--plot", example_plot, "Also write an SVG figure (requires --out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*analyze) {
            irrsel::AnalyzeOptions opt;
            opt.k = k;
            opt.p_select = p_select;
            opt.estimator = irrsel::parse_estimator(estimator);
            opt.bootstrap = bootstrap;
            opt.seed = seed;
            opt.level = level;
            opt.threads = threads;
            if (!k && !p_select) throw irrsel::Error(irrsel::ErrorKind::usage, "cli", "one of --k or --p-select is required");
            const auto report = irrsel::cmd_analyze(irrsel::ingest_csv(input, schema), opt);
            write_output(irrsel::serialize_report(report), out_path);
            if (table_render) std::cerr << render_table(report);
            if (!plot_path.empty()) write_output(irrsel::analysis_figure(report), plot_path);
        } else if (*simulate) {
            irrsel::SimulateOptions opt;
            opt.preset = preset;
            opt.seed = sim_seed;
            opt.replications = replications;
            opt.estimator = irrsel::parse_estimator(sim_estimator);
            opt.threads = sim_threads;
            opt.plot = sim_plot;
            const auto summary = irrsel::run_study(irrsel::simulation_config(opt));
            const auto files = irrsel::simulation_files(summary, opt.plot);
            irrsel::write_files(sim_out, files);
            std::cout << "wrote " << files.size() << " files to " << sim_out << " (" << summary.conditions.size()
                      << " conditions, " << summary.failures.size() << " failed replications)\n";
        } else if (*design) {
            design_opt.sweep_j = irrsel::parse_sweep(sweep_j);
            design_opt.sweep_irr = irrsel::parse_sweep(sweep_irr);
            const auto sweep = irrsel::cmd_design(design_opt);
            write_output(irrsel::design_to_json(design_opt, sweep).dump(2) + "\n", design_out);
            if (!design_plot.empty()) write_output(irrsel::design_figure(design_opt, sweep), design_plot);
        } else if (*example) {
            const auto ex = irrsel::cmd_example();
            const std::string json = irrsel::example_to_json(ex).dump(2) + "\n";
            if (example_out.empty()) {
                if (example_plot) throw irrsel::Error(irrsel::ErrorKind::usage, "cli", "--plot requires --out");
                std::cout << json;
            } else {
                std::map<std::string, std::string> files{{"example.json", json}};
                if (example_plot) files["example_fpr.svg"] = irrsel::example_figure(ex);
                irrsel::write_files(example_out, files);
            }
        }
    } catch (const irrsel::Error& e) {
        std::cerr << "error [" << irrsel::to_string(e.kind()) << "] " << e.what() << "\n";
        return e.kind() == irrsel::ErrorKind::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
