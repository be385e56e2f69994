#pragma once

// Uncertainty for reliability and selection metrics: cluster bootstrap
// confidence intervals, monotone transformation of published IRR intervals,
// and binomial prediction intervals for the rates realised in one round.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "irrsel/classify.hpp"
#include "irrsel/error.hpp"
#include "irrsel/parallel.hpp"
#include "irrsel/random.hpp"
#include "irrsel/variance.hpp"

namespace irrsel {

enum class IntervalKind { confidence, prediction };

inline std::string_view to_string(IntervalKind k) noexcept {
    return k == IntervalKind::confidence ? "confidence" : "prediction";
}

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    IntervalKind kind = IntervalKind::confidence;

    [[nodiscard]] bool contains(double x) const noexcept { return lower <= x && x <= upper; }
    [[nodiscard]] double width() const noexcept { return upper - lower; }
};

inline Interval make_interval(double a, double b, double level, IntervalKind kind) {
    return {std::min(a, b), std::max(a, b), level, kind};
}

struct RateIntervals {
    Interval tpr;
    Interval fpr;
    Interval fnr;
};

struct BootstrapConfig {
    std::size_t n_resamples = 2000;
    double level = 0.95;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency

    void validate() const {
        if (n_resamples < 100) throw Error(ErrorKind::domain, "inference", "bootstrap needs at least 100 resamples");
        if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::domain, "inference", "level must lie in (0,1)");
    }
};

struct BootstrapIntervals {
    Interval irr1;
    Interval irr_j;
    RateIntervals rates;
    std::size_t n_used = 0;
    std::size_t n_skipped = 0;
};

namespace detail {

// Linear interpolation between order statistics (Hyndman-Fan type 7).
inline double sample_quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline Interval percentile_interval(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    const double tail = 0.5 * (1.0 - level);
    return {sample_quantile(values, tail), sample_quantile(values, 1.0 - tail), level, IntervalKind::confidence};
}

} // namespace detail

/// Percentile bootstrap over applicants: each resample draws N whole rating
/// clusters with replacement and refits the variance components. Resample b
/// uses its own substream of `config.seed`, so output does not depend on the
/// thread count. Resamples whose refit is degenerate are skipped; more than
/// 10% skipped is an error.
inline BootstrapIntervals bootstrap_ci(const ValidatedRatings& table, const SelectionDesign& design,
                                       const BootstrapConfig& config, Estimator estimator) {
    config.validate();
    const GroupSummary base = summarize_groups(table);
    const std::size_t n = base.n_groups();
    if (estimator == Estimator::anova && base.balanced_count() == 0.0) {
        throw Error(ErrorKind::invalid_input, "inference", "anova bootstrap requires a balanced table");
    }

    struct Draw {
        bool ok = false;
        double irr1 = 0.0;
        double irr_j = 0.0;
        double tpr = 0.0;
        double fpr = 0.0;
        double fnr = 0.0;
    };
    std::vector<Draw> draws(config.n_resamples);
    const double p = design.p_select();
    std::vector<double> group_ss(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double y : table.scores[i]) group_ss[i] += (y - base.mean[i]) * (y - base.mean[i]);
    }

    parallel_for(config.n_resamples, config.threads, [&](std::size_t b) {
        auto rng = substream(config.seed, {0x626f6f74ULL, b});
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        GroupSummary g;
        g.count.reserve(n);
        g.mean.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = pick(rng);
            g.count.push_back(base.count[src]);
            g.mean.push_back(base.mean[src]);
            g.total += base.count[src];
            g.within_ss += group_ss[src];
        }
        try {
            const auto vc = estimate_variance_components(g, estimator);
            const auto irr = irr_estimate(vc);
            const auto m = metrics(true_positive_prob(irr.irr_j, p), p);
            draws[b] = {true, irr.irr1, irr.irr_j, *m.tpr_ppv, *m.fpr, *m.fnr};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_data && e.kind() != ErrorKind::invalid_input) throw;
        }
    });

    BootstrapIntervals out;
    std::vector<double> irr1, irr_j, tpr, fpr, fnr;
    for (const auto& d : draws) {
        if (!d.ok) {
            ++out.n_skipped;
            continue;
        }
        irr1.push_back(d.irr1);
        irr_j.push_back(d.irr_j);
        tpr.push_back(d.tpr);
        fpr.push_back(d.fpr);
        fnr.push_back(d.fnr);
    }
    out.n_used = irr1.size();
    if (static_cast<double>(out.n_skipped) > 0.1 * static_cast<double>(config.n_resamples)) {
        throw Error(ErrorKind::degenerate_data, "inference",
                    std::to_string(out.n_skipped) + " of " + std::to_string(config.n_resamples) +
                        " bootstrap resamples were degenerate");
    }
    out.irr1 = detail::percentile_interval(std::move(irr1), config.level);
    out.irr_j = detail::percentile_interval(std::move(irr_j), config.level);
    out.rates.tpr = detail::percentile_interval(std::move(tpr), config.level);
    out.rates.fpr = detail::percentile_interval(std::move(fpr), config.level);
    out.rates.fnr = detail::percentile_interval(std::move(fnr), config.level);
    return out;
}

/// Maps a single-rater reliability interval through Spearman-Brown and the
/// quantile approximation. All three rates are monotone in irr1, so the
/// endpoints map to endpoints (fpr and fnr in reverse order).
inline RateIntervals transform_irr_ci(const Interval& irr1_interval, double j, double p_select) {
    if (!(irr1_interval.lower >= 0.0 && irr1_interval.upper <= 1.0 && irr1_interval.lower <= irr1_interval.upper)) {
        throw Error(ErrorKind::domain, "inference", "irr1 interval must be ordered within [0,1]");
    }
    const auto lo = evaluate_selection(irr1_interval.lower, j, p_select);
    const auto hi = evaluate_selection(irr1_interval.upper, j, p_select);
    const double level = irr1_interval.level;
    return {make_interval(*lo.tpr_ppv, *hi.tpr_ppv, level, IntervalKind::confidence),
            make_interval(*lo.fpr, *hi.fpr, level, IntervalKind::confidence),
            make_interval(*lo.fnr, *hi.fnr, level, IntervalKind::confidence)};
}

/// Smallest t with P(T <= t) >= target for T ~ Binomial(trials, prob).
inline std::int64_t binomial_quantile(std::int64_t trials, double prob, double target) {
    if (trials < 0) throw Error(ErrorKind::domain, "inference", "binomial_quantile: negative trials");
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorKind::domain, "inference", "binomial_quantile: prob outside [0,1]");
    if (!(target >= 0.0 && target <= 1.0)) throw Error(ErrorKind::domain, "inference", "binomial_quantile: target outside [0,1]");
    if (prob == 0.0) return 0;
    if (prob == 1.0) return trials;
    constexpr double slack = 1e-12; // absorbs rounding in the accumulated cdf
    const double n = static_cast<double>(trials);
    const double log_norm = std::lgamma(n + 1.0);
    const double lp = std::log(prob);
    const double lq = std::log1p(-prob);
    double cdf = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const double td = static_cast<double>(t);
        cdf += std::exp(log_norm - std::lgamma(td + 1.0) - std::lgamma(n - td + 1.0) + td * lp + (n - td) * lq);
        if (cdf >= target - slack) return t;
    }
    return trials;
}

namespace detail {

struct RateCountBounds {
    std::int64_t n;
    std::int64_t k;
};

inline RateCountBounds design_counts(const SelectionDesign& design) {
    if (!design.n_applicants() || !design.k_selected()) {
        throw Error(ErrorKind::undefined, "inference", "prediction interval needs the number of applicants N");
    }
    if (*design.k_selected() == 0) throw Error(ErrorKind::undefined, "inference", "rates undefined for k = 0");
    return {*design.n_applicants(), *design.k_selected()};
}

inline RateIntervals rates_from_tp_counts(std::int64_t t_lo, std::int64_t t_hi, std::int64_t n, std::int64_t k,
                                          double level) {
    const double kd = static_cast<double>(k);
    const double not_selected = static_cast<double>(n - k);
    const auto make = [&](double a, double b) { return make_interval(a, b, level, IntervalKind::prediction); };
    return {make(static_cast<double>(t_lo) / kd, static_cast<double>(t_hi) / kd),
            make(static_cast<double>(k - t_hi) / kd, static_cast<double>(k - t_lo) / kd),
            make(static_cast<double>(k - t_hi) / not_selected, static_cast<double>(k - t_lo) / not_selected)};
}

inline void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::domain, "inference", "level must lie in (0,1)");
}

} // namespace detail

/// Prediction interval for the empirically realised rates of one selection
/// round: the number of true positives among the k selected is
/// Binomial(k, p_tp / p_select).
inline RateIntervals prediction_interval(double p_tp, const SelectionDesign& design, double level) {
    detail::check_level(level);
    const auto [n, k] = detail::design_counts(design);
    const double p = design.p_select();
    const double tp = detail::feasible_tp(p_tp, p);
    const double success = std::clamp(tp / p, 0.0, 1.0);
    const double tail = 0.5 * (1.0 - level);
    return detail::rates_from_tp_counts(binomial_quantile(k, success, tail), binomial_quantile(k, success, 1.0 - tail),
                                        n, k, level);
}

/// Prediction interval that also carries the uncertainty of the estimate: the
/// union of the binomial intervals over a range of true-positive
/// probabilities (e.g. one obtained by transforming a reliability CI).
/// Binomial quantiles are monotone in the success probability, so the ends of
/// the range suffice.
inline RateIntervals prediction_interval(const Interval& p_tp_range, const SelectionDesign& design, double level) {
    const auto at_lo = prediction_interval(p_tp_range.lower, design, level);
    const auto at_hi = prediction_interval(p_tp_range.upper, design, level);
    const auto join = [](const Interval& a, const Interval& b) {
        return Interval{std::min(a.lower, b.lower), std::max(a.upper, b.upper), a.level, IntervalKind::prediction};
    };
    return {join(at_lo.tpr, at_hi.tpr), join(at_lo.fpr, at_hi.fpr), join(at_lo.fnr, at_hi.fnr)};
}

/// Range of P(S and A) implied by a single-rater reliability interval.
inline Interval tp_interval_from_irr(const Interval& irr1_interval, double j, double p_select) {
    const double a = true_positive_prob(irr_multi(irr1_interval.lower, j), p_select);
    const double b = true_positive_prob(irr_multi(irr1_interval.upper, j), p_select);
    return make_interval(a, b, irr1_interval.level, IntervalKind::confidence);
}

} // namespace irrsel
