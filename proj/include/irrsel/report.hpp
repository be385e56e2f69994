#pragma once

// Analysis report and its JSON representation. Keys are emitted in a fixed
// order and undefined metrics as null, so serialize -> parse -> serialize is
// byte-identical.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "irrsel/classify.hpp"
#include "irrsel/error.hpp"
#include "irrsel/inference.hpp"
#include "irrsel/variance.hpp"

namespace irrsel {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kAnalysisSchema = "irrsel.analysis/1";

using Json = nlohmann::ordered_json;

struct DesignEcho {
    std::optional<std::int64_t> n_applicants;
    std::optional<std::int64_t> k_selected;
    double p_select = 0.0;
    double j = 1.0;
    std::string k_source; // "k", "p_select", "round(p_select*N)"
};

struct ReportMetadata {
    std::string estimator = "reml";
    std::string j_convention = "mean_ratings_per_applicant";
    std::string tool_version = kToolVersion;
    std::optional<std::uint64_t> seed;
    std::size_t bootstrap_resamples = 0;
    std::size_t bootstrap_skipped = 0;
    double level = 0.95;
    std::string bootstrap_unit = "applicant";
    std::string bootstrap_interval = "percentile";
    std::string prediction_convention = "binomial lower quantile, T ~ Binomial(k, p_tp/p_select)";
};

struct AnalysisReport {
    VarianceComponents vc;
    IrrEstimate irr;
    DesignEcho design;
    ClassificationTable table;
    ClassificationMetrics metrics;
    std::optional<BootstrapIntervals> bootstrap;
    std::optional<RateIntervals> prediction;
    ReportMetadata metadata;
};

namespace detail {

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> optional_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

inline Json interval_json(const Interval& i) {
    return Json{{"lower", i.lower}, {"upper", i.upper}, {"level", i.level}, {"kind", std::string(to_string(i.kind))}};
}

inline Interval interval_from(const Json& j) {
    Interval i;
    i.lower = j.at("lower").get<double>();
    i.upper = j.at("upper").get<double>();
    i.level = j.at("level").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "confidence" && kind != "prediction") {
        throw Error(ErrorKind::invalid_input, "cli", "unknown interval kind '" + kind + "'");
    }
    i.kind = kind == "confidence" ? IntervalKind::confidence : IntervalKind::prediction;
    return i;
}

inline Json rates_json(const RateIntervals& r) {
    return Json{{"tpr_ppv", interval_json(r.tpr)}, {"fpr", interval_json(r.fpr)}, {"fnr", interval_json(r.fnr)}};
}

inline RateIntervals rates_from(const Json& j) {
    return {interval_from(j.at("tpr_ppv")), interval_from(j.at("fpr")), interval_from(j.at("fnr"))};
}

inline Json metric_json(const std::optional<double>& v, std::initializer_list<const char*> aliases) {
    Json a = Json::array();
    for (const char* s : aliases) a.push_back(s);
    return Json{{"value", optional_json(v)}, {"aliases", a}};
}

} // namespace detail

/// Metric names follow the selection-rate convention; "aliases" gives the
/// standard confusion-matrix names of the same quantity.
inline Json to_json(const AnalysisReport& r) {
    Json out;
    out["schema"] = kAnalysisSchema;
    out["variance_components"] = Json{{"mu", r.vc.mu},
                                      {"var_gamma", r.vc.var_gamma},
                                      {"var_epsilon", r.vc.var_epsilon},
                                      {"method", std::string(to_string(r.vc.method))},
                                      {"n_applicants", r.vc.n_applicants},
                                      {"mean_ratings", r.vc.mean_ratings}};
    out["reliability"] = Json{{"irr1", r.irr.irr1}, {"irr_j", r.irr.irr_j}, {"j", r.irr.j}};
    out["design"] = Json{{"n_applicants", detail::optional_json(r.design.n_applicants)},
                         {"k_selected", detail::optional_json(r.design.k_selected)},
                         {"p_select", r.design.p_select},
                         {"j", r.design.j},
                         {"k_source", r.design.k_source}};
    out["classification_table"] =
        Json{{"p_tp", r.table.p_tp}, {"p_fn", r.table.p_fn}, {"p_fp", r.table.p_fp}, {"p_tn", r.table.p_tn}};
    out["metrics"] = Json{
        {"tpr_ppv", detail::metric_json(r.metrics.tpr_ppv,
                                        {"true_positive_rate", "sensitivity", "positive_predictive_value", "precision"})},
        {"fpr", detail::metric_json(r.metrics.fpr, {"false_discovery_rate", "miss_rate"})},
        {"fnr", detail::metric_json(r.metrics.fnr, {"false_omission_rate", "fall_out"})}};

    Json intervals;
    if (r.bootstrap) {
        intervals["bootstrap"] = Json{{"irr1", detail::interval_json(r.bootstrap->irr1)},
                                      {"irr_j", detail::interval_json(r.bootstrap->irr_j)},
                                      {"rates", detail::rates_json(r.bootstrap->rates)},
                                      {"n_used", r.bootstrap->n_used},
                                      {"n_skipped", r.bootstrap->n_skipped}};
    } else {
        intervals["bootstrap"] = nullptr;
    }
    intervals["prediction"] = r.prediction ? detail::rates_json(*r.prediction) : Json(nullptr);
    out["intervals"] = intervals;

    out["metadata"] = Json{{"estimator", r.metadata.estimator},
                           {"j_convention", r.metadata.j_convention},
                           {"tool_version", r.metadata.tool_version},
                           {"seed", detail::optional_json(r.metadata.seed)},
                           {"bootstrap_resamples", r.metadata.bootstrap_resamples},
                           {"bootstrap_skipped", r.metadata.bootstrap_skipped},
                           {"level", r.metadata.level},
                           {"bootstrap_unit", r.metadata.bootstrap_unit},
                           {"bootstrap_interval", r.metadata.bootstrap_interval},
                           {"prediction_convention", r.metadata.prediction_convention}};
    return out;
}

inline std::string serialize_report(const AnalysisReport& r) { return to_json(r).dump(2) + "\n"; }

inline AnalysisReport report_from_json(const Json& j) {
    try {
        if (j.at("schema").get<std::string>() != kAnalysisSchema) {
            throw Error(ErrorKind::invalid_input, "cli", "unsupported report schema");
        }
        AnalysisReport r;
        const auto& vc = j.at("variance_components");
        r.vc.mu = vc.at("mu").get<double>();
        r.vc.var_gamma = vc.at("var_gamma").get<double>();
        r.vc.var_epsilon = vc.at("var_epsilon").get<double>();
        r.vc.method = parse_estimator(vc.at("method").get<std::string>());
        r.vc.n_applicants = vc.at("n_applicants").get<std::size_t>();
        r.vc.mean_ratings = vc.at("mean_ratings").get<double>();

        const auto& rel = j.at("reliability");
        r.irr = {rel.at("irr1").get<double>(), rel.at("irr_j").get<double>(), rel.at("j").get<double>()};

        const auto& d = j.at("design");
        r.design.n_applicants = detail::optional_from<std::int64_t>(d.at("n_applicants"));
        r.design.k_selected = detail::optional_from<std::int64_t>(d.at("k_selected"));
        r.design.p_select = d.at("p_select").get<double>();
        r.design.j = d.at("j").get<double>();
        r.design.k_source = d.at("k_source").get<std::string>();

        const auto& t = j.at("classification_table");
        r.table = {t.at("p_tp").get<double>(), t.at("p_fn").get<double>(), t.at("p_fp").get<double>(),
                   t.at("p_tn").get<double>(), r.design.p_select};

        const auto& m = j.at("metrics");
        r.metrics.p_select = r.design.p_select;
        r.metrics.p_tp = r.table.p_tp;
        r.metrics.irr_j = r.irr.irr_j;
        r.metrics.tpr_ppv = detail::optional_from<double>(m.at("tpr_ppv").at("value"));
        r.metrics.fpr = detail::optional_from<double>(m.at("fpr").at("value"));
        r.metrics.fnr = detail::optional_from<double>(m.at("fnr").at("value"));

        const auto& iv = j.at("intervals");
        if (!iv.at("bootstrap").is_null()) {
            const auto& b = iv.at("bootstrap");
            BootstrapIntervals bi;
            bi.irr1 = detail::interval_from(b.at("irr1"));
            bi.irr_j = detail::interval_from(b.at("irr_j"));
            bi.rates = detail::rates_from(b.at("rates"));
            bi.n_used = b.at("n_used").get<std::size_t>();
            bi.n_skipped = b.at("n_skipped").get<std::size_t>();
            r.bootstrap = bi;
        }
        if (!iv.at("prediction").is_null()) r.prediction = detail::rates_from(iv.at("prediction"));

        const auto& md = j.at("metadata");
        r.metadata.estimator = md.at("estimator").get<std::string>();
        r.metadata.j_convention = md.at("j_convention").get<std::string>();
        r.metadata.tool_version = md.at("tool_version").get<std::string>();
        r.metadata.seed = detail::optional_from<std::uint64_t>(md.at("seed"));
        r.metadata.bootstrap_resamples = md.at("bootstrap_resamples").get<std::size_t>();
        r.metadata.bootstrap_skipped = md.at("bootstrap_skipped").get<std::size_t>();
        r.metadata.level = md.at("level").get<double>();
        r.metadata.bootstrap_unit = md.at("bootstrap_unit").get<std::string>();
        r.metadata.bootstrap_interval = md.at("bootstrap_interval").get<std::string>();
        r.metadata.prediction_convention = md.at("prediction_convention").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::invalid_input, "cli", std::string("malformed report: ") + e.what());
    }
}

inline AnalysisReport parse_report(const std::string& text) {
    try {
        return report_from_json(Json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::invalid_input, "cli", std::string("report is not valid JSON: ") + e.what());
    }
}

} // namespace irrsel
