#pragma once

// Quantile approximation of selection outcomes: cut-scores, the probability of
// a true positive selection, the induced 2x2 classification table and metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irrsel/detail/quadrature.hpp"
#include "irrsel/error.hpp"
#include "irrsel/normal.hpp"
#include "irrsel/variance.hpp"

namespace irrsel {

/// N applicants, k of them selected by the mean of j ratings each.
/// Either counts or a bare proportion may be given; p_select() = k / N exactly
/// when counts are known.
class SelectionDesign {
public:
    static SelectionDesign from_counts(std::int64_t n_applicants, std::int64_t k_selected, double j = 1.0) {
        if (n_applicants < 2 || k_selected <= 0 || k_selected >= n_applicants) {
            throw Error(ErrorKind::domain, "classify",
                        "selection design requires 0 < k < N (k = " + std::to_string(k_selected) +
                            ", N = " + std::to_string(n_applicants) + ")");
        }
        check_j(j);
        SelectionDesign d;
        d.n_ = n_applicants;
        d.k_ = k_selected;
        d.j_ = j;
        d.p_ = static_cast<double>(k_selected) / static_cast<double>(n_applicants);
        return d;
    }

    /// Without N only the proportion is stored; with N, k = round(p * N).
    static SelectionDesign from_proportion(double p_select, double j = 1.0,
                                           std::optional<std::int64_t> n_applicants = std::nullopt) {
        if (!(p_select > 0.0 && p_select < 1.0)) {
            throw Error(ErrorKind::domain, "classify", "p_select must lie in (0,1)");
        }
        check_j(j);
        if (n_applicants) {
            return from_counts(*n_applicants, std::llround(p_select * static_cast<double>(*n_applicants)), j);
        }
        SelectionDesign d;
        d.p_ = p_select;
        d.j_ = j;
        return d;
    }

    [[nodiscard]] double p_select() const noexcept { return p_; }
    [[nodiscard]] double j() const noexcept { return j_; }
    [[nodiscard]] std::optional<std::int64_t> n_applicants() const noexcept { return n_; }
    [[nodiscard]] std::optional<std::int64_t> k_selected() const noexcept { return k_; }

    /// (N - k) / N, the quantile level of both cut-scores.
    [[nodiscard]] double cut_level() const noexcept {
        if (n_) return static_cast<double>(*n_ - *k_) / static_cast<double>(*n_);
        return 1.0 - p_;
    }

private:
    static void check_j(double j) {
        if (!(j >= 1.0) || !std::isfinite(j)) throw Error(ErrorKind::domain, "classify", "j must be >= 1");
    }

    std::optional<std::int64_t> n_;
    std::optional<std::int64_t> k_;
    double j_ = 1.0;
    double p_ = 0.5;
};

struct CutScores {
    double gamma_c = 0.0; // latent ability cut
    double ybar_c = 0.0;  // aggregated observed score cut
};

/// Marginal-quantile approximations of the two sample cut-scores.
inline CutScores cut_scores(double mu, double var_gamma, double var_epsilon, const SelectionDesign& design) {
    if (!(var_gamma > 0.0)) {
        throw Error(ErrorKind::degenerate_data, "classify", "cut_scores: latent variance must be positive");
    }
    if (var_epsilon < 0.0) throw Error(ErrorKind::domain, "classify", "cut_scores: negative error variance");
    const double q = std_normal_quantile(design.cut_level());
    return {mu + std::sqrt(var_gamma) * q, mu + std::sqrt(var_gamma + var_epsilon / design.j()) * q};
}

/// P(S and A) from the reliability of the aggregated score and the selection
/// proportion alone.
///
/// In standardized units the latent score has variance irr_j and covariance
/// irr_j with the unit-variance observed mean, so its marginal cut sits at
/// sqrt(irr_j) * z with z = Phi^-1(1 - p). Rescaling the latent score to unit
/// variance gives an orthant probability with both limits at z and
/// correlation sqrt(irr_j).
inline Probability true_positive_prob(double irr_j, double p_select) {
    if (!(irr_j >= 0.0 && irr_j <= 1.0)) {
        throw Error(ErrorKind::domain, "classify", "true_positive_prob: irr_j outside [0,1]");
    }
    if (!(p_select >= 0.0 && p_select <= 1.0)) {
        throw Error(ErrorKind::domain, "classify", "true_positive_prob: p_select outside [0,1]");
    }
    if (p_select == 0.0) return Probability(0.0);
    if (p_select == 1.0) return Probability(1.0);
    if (irr_j == 0.0) return Probability(p_select * p_select);
    if (irr_j == 1.0) return Probability(p_select);
    const double z = -std_normal_quantile(p_select);
    return bvn_upper_tail(z, z, Correlation(std::sqrt(irr_j)));
}

/// P(S and A) in the original score units, integrating the joint density of
/// (gamma, ybar) over [gamma_c, inf) x [ybar_c, inf) by conditioning on gamma:
/// ybar | gamma ~ N(gamma, var_epsilon / j).
inline Probability true_positive_prob_raw(const VarianceComponents& vc, const SelectionDesign& design) {
    const auto cuts = cut_scores(vc.mu, vc.var_gamma, vc.var_epsilon, design);
    const double sd_gamma = std::sqrt(vc.var_gamma);
    const double sd_noise = std::sqrt(vc.var_epsilon / design.j());

    if (sd_noise == 0.0) {
        return Probability(detail::phi_unchecked(-(std::max(cuts.gamma_c, cuts.ybar_c) - vc.mu) / sd_gamma));
    }

    const auto integrand = [&](double g) {
        const double u = (g - vc.mu) / sd_gamma;
        const double density = std::exp(-0.5 * u * u) / (sd_gamma * std::sqrt(2.0 * std::numbers::pi));
        return density * detail::phi_unchecked((g - cuts.ybar_c) / sd_noise);
    };

    const double lo = cuts.gamma_c;
    const double hi = vc.mu + 40.0 * sd_gamma;
    if (lo >= hi) return Probability(0.0);
    // Split where the conditional selection probability switches on.
    std::vector<double> knots = {lo};
    for (double x : {cuts.ybar_c - 8.0 * sd_noise, cuts.ybar_c, cuts.ybar_c + 8.0 * sd_noise, vc.mu}) {
        if (x > lo && x < hi) knots.push_back(x);
    }
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        total += detail::integrate_adaptive(integrand, knots[i], knots[i + 1], 1e-14);
    }
    return Probability(std::clamp(total, 0.0, 1.0));
}

/// Cell probabilities of the selection-by-ability table. Selection and high
/// ability share the margin p_select, so both off-diagonal cells equal
/// p_select - p_tp.
struct ClassificationTable {
    double p_tp = 0.0; // selected, high ability
    double p_fn = 0.0; // not selected, high ability
    double p_fp = 0.0; // selected, not high ability
    double p_tn = 0.0; // not selected, not high ability
    double p_select = 0.0;
};

namespace detail {

inline double feasible_tp(double p_tp, double p_select) {
    constexpr double slack = 1e-12;
    if (!(p_select >= 0.0 && p_select <= 1.0)) {
        throw Error(ErrorKind::domain, "classify", "p_select outside [0,1]");
    }
    const double lower = std::max(0.0, 2.0 * p_select - 1.0);
    if (!(p_tp >= lower - slack && p_tp <= p_select + slack)) {
        throw Error(ErrorKind::infeasible, "classify",
                    "p_tp = " + std::to_string(p_tp) + " outside feasible band [" + std::to_string(lower) + ", " +
                        std::to_string(p_select) + "]");
    }
    return std::clamp(p_tp, lower, p_select);
}

} // namespace detail

inline ClassificationTable classification_table(double p_tp, double p_select) {
    const double tp = detail::feasible_tp(p_tp, p_select);
    const double off = p_select - tp;
    return {tp, off, off, tp + (1.0 - 2.0 * p_select), p_select};
}

/// Selection metrics under the source naming.
///
/// fpr is (k/N - P(S and A)) / (k/N), i.e. the share of selected applicants
/// that are not high ability (the conventional false discovery rate, and here
/// also the conventional miss rate). fnr divides the same cell by 1 - k/N
/// (the conventional fall-out / false omission rate). Undefined values are
/// left empty: everything at p_select = 0, fnr at p_select = 1.
struct ClassificationMetrics {
    double p_select = 0.0;
    double p_tp = 0.0;
    std::optional<double> tpr_ppv;
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> irr_j;
};

inline ClassificationMetrics metrics(double p_tp, double p_select) {
    const double tp = detail::feasible_tp(p_tp, p_select);
    ClassificationMetrics m;
    m.p_select = p_select;
    m.p_tp = tp;
    if (p_select == 0.0) return m;
    const double fpr = (p_select - tp) / p_select;
    m.fpr = fpr;
    m.tpr_ppv = 1.0 - fpr;
    if (p_select < 1.0) m.fnr = (p_select - tp) / (1.0 - p_select);
    return m;
}

/// Quantile-approximated metrics for a single-rater reliability, a (possibly
/// fractional) number of ratings and a selection proportion.
inline ClassificationMetrics evaluate_selection(double irr1, double j, double p_select) {
    const double irr_j = irr_multi(irr1, j);
    auto m = metrics(true_positive_prob(irr_j, p_select), p_select);
    m.irr_j = irr_j;
    return m;
}

inline std::vector<std::pair<double, ClassificationMetrics>> metric_curve(double irr1, double j,
                                                                          std::vector<double> grid) {
    for (double p : grid) {
        if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::domain, "classify", "metric_curve: grid value outside (0,1)");
    }
    std::sort(grid.begin(), grid.end());
    std::vector<std::pair<double, ClassificationMetrics>> out;
    out.reserve(grid.size());
    for (double p : grid) out.emplace_back(p, evaluate_selection(irr1, j, p));
    return out;
}

} // namespace irrsel
