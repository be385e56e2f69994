#pragma once

// Stable text renderings of simulation summaries and their figures.

#include <map>
#include <sstream>
#include <string>

#include "irrsel/format.hpp"
#include "irrsel/report.hpp"
#include "irrsel/simulate.hpp"
#include "irrsel/svg.hpp"

namespace irrsel {

inline constexpr const char* kSimulationSchema = "irrsel.simulation/1";

inline std::string condition_name(const SimulationCondition& c) {
    return "irr" + format_fixed(c.irr1, 2) + "_n" + std::to_string(c.n) + "_j" + std::to_string(c.j);
}

inline Json summary_to_json(const SimulationSummary& s) {
    Json cfg{{"irr1_values", s.config.irr1_values},
             {"n_values", s.config.n_values},
             {"j_values", s.config.j_values},
             {"replications", s.config.replications},
             {"total_variance", s.config.total_variance},
             {"seed", s.config.seed},
             {"estimator", std::string(to_string(s.config.estimator))}};
    Json conditions = Json::array();
    for (const auto& c : s.conditions) {
        conditions.push_back(Json{{"index", c.condition.index},
                                  {"name", condition_name(c.condition)},
                                  {"irr1", c.condition.irr1},
                                  {"n", c.condition.n},
                                  {"j", c.condition.j},
                                  {"replications_used", c.replications_used},
                                  {"clamped_estimates", c.clamped_estimates},
                                  {"max_abs_bias", [&] {
                                       double m = 0.0;
                                       for (double b : c.bias) m = std::max(m, std::abs(b));
                                       return m;
                                   }()},
                                  {"mean_empirical", c.mean_empirical},
                                  {"mean_approx", c.mean_approx},
                                  {"bias", c.bias},
                                  {"rmse", c.rmse}});
    }
    Json failures = Json::array();
    for (const auto& f : s.failures) {
        failures.push_back(Json{{"condition", f.condition}, {"replication", f.replication}, {"message", f.message}});
    }
    return Json{{"schema", kSimulationSchema},
                {"tool_version", kToolVersion},
                {"config", cfg},
                {"n_failures", s.failures.size()},
                {"failures", failures},
                {"conditions", conditions}};
}

inline std::string summary_text(const SimulationSummary& s) { return summary_to_json(s).dump(1) + "\n"; }

/// k, p_select, mean_empirical, mean_approx, bias, rmse; one row per k.
inline std::string condition_csv(const ConditionSummary& c) {
    std::ostringstream out;
    out << "k,p_select,mean_empirical,mean_approx,bias,rmse\n";
    for (std::size_t i = 0; i < c.mean_empirical.size(); ++i) {
        out << i + 1 << ',' << format_shortest(c.p_select(i)) << ',' << format_shortest(c.mean_empirical[i]) << ','
            << format_shortest(c.mean_approx[i]) << ',' << format_shortest(c.bias[i]) << ','
            << format_shortest(c.rmse[i]) << '\n';
    }
    return out.str();
}

/// Two figures per N: mean empirical vs approximated P(S and A) with the
/// diagonal upper bound, and the RMSE; rows are irr1 values, columns J values.
inline std::map<std::string, std::string> simulation_figures(const SimulationSummary& s) {
    std::map<std::string, std::string> out;
    for (auto n : s.config.n_values) {
        std::vector<PlotPanel> tp_panels, rmse_panels;
        for (const auto& c : s.conditions) {
            if (c.condition.n != n) continue;
            std::vector<double> x(c.mean_empirical.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = c.p_select(i);
            const std::string title = "IRR1 = " + format_shortest(c.condition.irr1) + ", J = " +
                                      std::to_string(c.condition.j);
            PlotPanel tp{title, "k/N", "P(S and A)", {}, std::pair{0.0, 1.0}, std::pair{0.0, 1.0}, true};
            tp.series.push_back({"empirical", x, c.mean_empirical, LineStyle::solid, false, "#d62728"});
            tp.series.push_back({"quantile approximation", x, c.mean_approx, LineStyle::dashed, false, "#1f77b4"});
            tp.series.push_back({"maximum", {0.0, 1.0}, {0.0, 1.0}, LineStyle::dotted, false, "#d62728", 1.0});
            tp_panels.push_back(std::move(tp));
            PlotPanel rm{title, "k/N", "RMSE", {}, std::pair{0.0, 1.0}, std::nullopt, false};
            rm.series.push_back({"rmse", x, c.rmse, LineStyle::solid, false, "#000000"});
            rmse_panels.push_back(std::move(rm));
        }
        const PlotLayout layout{"", s.config.irr1_values.size(), s.config.j_values.size(), 300.0, 240.0};
        auto tp_layout = layout;
        tp_layout.title = "Mean true positive probability, N = " + std::to_string(n);
        auto rmse_layout = layout;
        rmse_layout.title = "RMSE of the quantile approximation, N = " + std::to_string(n);
        out["tp_curves_n" + std::to_string(n) + ".svg"] = emit_plot(tp_panels, tp_layout);
        out["rmse_n" + std::to_string(n) + ".svg"] = emit_plot(rmse_panels, rmse_layout);
    }
    return out;
}

} // namespace irrsel
