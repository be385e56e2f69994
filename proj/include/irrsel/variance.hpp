#pragma once

// One-way random-effects model y_ij = gamma_i + eps_ij: variance components and
// inter-rater reliability.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irrsel/error.hpp"
#include "irrsel/ratings.hpp"

namespace irrsel {

enum class Estimator { anova, reml };

inline std::string_view to_string(Estimator e) noexcept { return e == Estimator::anova ? "anova" : "reml"; }

inline Estimator parse_estimator(std::string_view name) {
    if (name == "anova") return Estimator::anova;
    if (name == "reml") return Estimator::reml;
    throw Error(ErrorKind::usage, "measurement", "unknown estimator '" + std::string(name) + "'");
}

struct VarianceComponents {
    double mu = 0.0;
    double var_gamma = 0.0;
    double var_epsilon = 0.0;
    Estimator method = Estimator::anova;
    std::size_t n_applicants = 0;
    double mean_ratings = 0.0;
};

struct IrrEstimate {
    double irr1 = 0.0;
    double irr_j = 0.0;
    double j = 1.0;
};

/// Sufficient statistics of the one-way model: per-applicant rating count and
/// mean, plus the pooled within-applicant sum of squares.
struct GroupSummary {
    std::vector<double> count;
    std::vector<double> mean;
    double within_ss = 0.0;
    double total = 0.0;

    [[nodiscard]] std::size_t n_groups() const noexcept { return count.size(); }

    /// Common rating count, or 0 when unbalanced.
    [[nodiscard]] double balanced_count() const noexcept {
        if (count.empty()) return 0.0;
        for (double c : count) {
            if (c != count.front()) return 0.0;
        }
        return count.front();
    }

    void add_group(std::span<const double> scores) {
        double m = 0.0;
        for (double y : scores) m += y;
        m /= static_cast<double>(scores.size());
        double ss = 0.0;
        for (double y : scores) ss += (y - m) * (y - m);
        count.push_back(static_cast<double>(scores.size()));
        mean.push_back(m);
        within_ss += ss;
        total += static_cast<double>(scores.size());
    }
};

inline GroupSummary summarize_groups(const ValidatedRatings& table) {
    GroupSummary g;
    g.count.reserve(table.n_applicants());
    g.mean.reserve(table.n_applicants());
    for (const auto& s : table.scores) g.add_group(s);
    return g;
}

namespace detail {

inline void check_estimable(const GroupSummary& g) {
    if (g.n_groups() < 2) {
        throw Error(ErrorKind::invalid_input, "measurement", "at least 2 applicants are required");
    }
    if (std::none_of(g.count.begin(), g.count.end(), [](double c) { return c >= 2.0; })) {
        throw Error(ErrorKind::degenerate_data, "measurement",
                    "every applicant is rated once; error variance is inestimable");
    }
}

inline void require_positive_total(const VarianceComponents& vc) {
    if (!(vc.var_gamma + vc.var_epsilon > 0.0)) {
        throw Error(ErrorKind::degenerate_data, "measurement", "all scores identical; both variance components are zero");
    }
}

// -2 x profile restricted log-likelihood (up to a constant) at variance ratio
// lambda = var_gamma / var_epsilon, with mu and var_epsilon profiled out.
struct RemlProfile {
    const GroupSummary& g;

    struct Point {
        double criterion;
        double mu;
        double quad; // r' V0^{-1} r with V = var_epsilon * V0
    };

    [[nodiscard]] Point operator()(double lambda) const {
        double sw = 0.0, swy = 0.0, logdet = 0.0;
        for (std::size_t i = 0; i < g.count.size(); ++i) {
            const double w = g.count[i] / (1.0 + lambda * g.count[i]);
            sw += w;
            swy += w * g.mean[i];
            logdet += std::log1p(lambda * g.count[i]);
        }
        const double mu = swy / sw;
        double q = g.within_ss;
        for (std::size_t i = 0; i < g.count.size(); ++i) {
            const double w = g.count[i] / (1.0 + lambda * g.count[i]);
            q += w * (g.mean[i] - mu) * (g.mean[i] - mu);
        }
        const double dof = g.total - 1.0;
        return {dof * std::log(q / dof) + logdet + std::log(sw), mu, q};
    }

    // d criterion / d lambda, using dw_i/dlambda = -w_i^2 and that mu minimizes q.
    [[nodiscard]] double slope(double lambda) const {
        const Point p = (*this)(lambda);
        double sw = 0.0, sw2 = 0.0, sw2r2 = 0.0;
        for (std::size_t i = 0; i < g.count.size(); ++i) {
            const double w = g.count[i] / (1.0 + lambda * g.count[i]);
            const double r = g.mean[i] - p.mu;
            sw += w;
            sw2 += w * w;
            sw2r2 += w * w * r * r;
        }
        return sw - sw2 / sw - (g.total - 1.0) * sw2r2 / p.quad;
    }
};

} // namespace detail

/// Moment (ANOVA) estimator for balanced tables; negative between-applicant
/// estimates are truncated at zero.
inline VarianceComponents variance_components_anova(const GroupSummary& g) {
    detail::check_estimable(g);
    const double jd = g.balanced_count();
    if (jd == 0.0) {
        throw Error(ErrorKind::invalid_input, "measurement", "unbalanced table; use the reml estimator");
    }
    const auto n = static_cast<double>(g.n_groups());

    double mu = 0.0;
    for (double m : g.mean) mu += m;
    mu /= n;
    double between_ss = 0.0;
    for (double m : g.mean) between_ss += (m - mu) * (m - mu);
    between_ss *= jd;

    const double msw = g.within_ss / (n * (jd - 1.0));
    const double msb = between_ss / (n - 1.0);

    VarianceComponents vc;
    vc.mu = mu;
    vc.var_epsilon = msw;
    vc.var_gamma = std::max(0.0, (msb - msw) / jd);
    vc.method = Estimator::anova;
    vc.n_applicants = g.n_groups();
    vc.mean_ratings = jd;
    detail::require_positive_total(vc);
    return vc;
}

namespace detail {

// Profile criterion in t = log(lambda), scanned on a coarse grid over lambda in
// [1e-10, 1e10], refined by golden-section search to 1e-10 in t and a final
// bisection on the slope. lambda = 0 is evaluated separately and wins ties.
// Tables without any within-applicant spread have an unbounded likelihood as
// lambda grows; they take the var_epsilon = 0 solution, the REML variance of
// applicant means.
inline VarianceComponents reml_numeric(const GroupSummary& g) {
    check_estimable(g);
    const auto n_groups = static_cast<double>(g.n_groups());

    VarianceComponents vc;
    vc.method = Estimator::reml;
    vc.n_applicants = g.n_groups();
    vc.mean_ratings = g.total / n_groups;

    double mean_scale = 0.0;
    for (double m : g.mean) mean_scale = std::max(mean_scale, std::abs(m));
    if (g.within_ss <= 1e-28 * std::max(1.0, mean_scale * mean_scale) * g.total) {
        double mu = 0.0;
        for (double m : g.mean) mu += m;
        mu /= n_groups;
        double ss = 0.0;
        for (double m : g.mean) ss += (m - mu) * (m - mu);
        vc.mu = mu;
        vc.var_gamma = ss / (n_groups - 1.0);
        vc.var_epsilon = 0.0;
        require_positive_total(vc);
        return vc;
    }

    const RemlProfile profile{g};
    const double t_lo = std::log(1e-10);
    const double t_hi = std::log(1e10);
    constexpr int grid = 64;
    const double step = (t_hi - t_lo) / grid;

    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double v = profile(std::exp(t_lo + step * i)).criterion;
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }

    double a = t_lo + step * std::max(0, best - 1);
    double b = t_lo + step * std::min(grid, best + 1);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = profile(std::exp(c)).criterion;
    double fd = profile(std::exp(d)).criterion;
    constexpr int max_iter = 200;
    int iter = 0;
    for (; iter < max_iter && (b - a) > 1e-10; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(std::exp(c)).criterion;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(std::exp(d)).criterion;
        }
    }
    if (iter == max_iter) {
        throw Error(ErrorKind::convergence, "measurement",
                    "reml: golden-section search did not converge; last lambda = " +
                        std::to_string(std::exp(0.5 * (a + b))));
    }

    double lambda = std::exp(0.5 * (a + b));
    // The criterion is flat near its minimum, so golden section stalls near
    // sqrt(machine epsilon); polish by bisecting the sign change of the slope.
    double lo = lambda * (1.0 - 1e-5), hi = lambda * (1.0 + 1e-5);
    if (profile.slope(lo) < 0.0 && profile.slope(hi) > 0.0) {
        for (int i = 0; i < 100 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (profile.slope(mid) < 0.0 ? lo : hi) = mid;
        }
        lambda = 0.5 * (lo + hi);
    }
    auto at_opt = profile(lambda);
    const auto at_zero = profile(0.0);
    if (at_zero.criterion <= at_opt.criterion) {
        lambda = 0.0;
        at_opt = at_zero;
    }

    vc.mu = at_opt.mu;
    vc.var_epsilon = at_opt.quad / (g.total - 1.0);
    vc.var_gamma = lambda * vc.var_epsilon;
    require_positive_total(vc);
    return vc;
}

// Balanced tables have a closed form: the ANOVA solution when MSB > MSW,
// otherwise var_gamma = 0 with var_epsilon the pooled variance of all scores.
inline VarianceComponents reml_balanced(const GroupSummary& g, double jd) {
    check_estimable(g);
    const auto n = static_cast<double>(g.n_groups());
    double mu = 0.0;
    for (double m : g.mean) mu += m;
    mu /= n;
    double between_ss = 0.0;
    for (double m : g.mean) between_ss += (m - mu) * (m - mu);
    between_ss *= jd;
    const double msw = g.within_ss / (n * (jd - 1.0));
    const double msb = between_ss / (n - 1.0);

    VarianceComponents vc;
    vc.mu = mu;
    vc.method = Estimator::reml;
    vc.n_applicants = g.n_groups();
    vc.mean_ratings = jd;
    if (msb > msw) {
        vc.var_epsilon = msw;
        vc.var_gamma = (msb - msw) / jd;
    } else {
        vc.var_epsilon = (g.within_ss + between_ss) / (g.total - 1.0);
    }
    require_positive_total(vc);
    return vc;
}

} // namespace detail

/// Restricted maximum likelihood, in closed form for balanced tables and by
/// one-dimensional profile search otherwise.
inline VarianceComponents variance_components_reml(const GroupSummary& g) {
    const double jd = g.balanced_count();
    if (jd >= 2.0) return detail::reml_balanced(g, jd);
    return detail::reml_numeric(g);
}

inline VarianceComponents variance_components_anova(const ValidatedRatings& table) {
    return variance_components_anova(summarize_groups(table));
}

inline VarianceComponents variance_components_reml(const ValidatedRatings& table) {
    return variance_components_reml(summarize_groups(table));
}

inline VarianceComponents estimate_variance_components(const GroupSummary& g, Estimator method) {
    return method == Estimator::anova ? variance_components_anova(g) : variance_components_reml(g);
}

inline VarianceComponents estimate_variance_components(const ValidatedRatings& table, Estimator method) {
    return estimate_variance_components(summarize_groups(table), method);
}

/// Single-rater reliability ICC(1,1).
inline double irr_single(const VarianceComponents& vc) {
    if (vc.var_gamma < 0.0 || vc.var_epsilon < 0.0) {
        throw Error(ErrorKind::domain, "measurement", "negative variance component");
    }
    detail::require_positive_total(vc);
    return vc.var_gamma / (vc.var_gamma + vc.var_epsilon);
}

/// Spearman-Brown reliability of the mean of j ratings; j need not be an integer.
inline double irr_multi(double irr1, double j) {
    if (!(irr1 >= 0.0 && irr1 <= 1.0)) {
        throw Error(ErrorKind::domain, "measurement", "irr_multi: irr1 outside [0,1]");
    }
    if (!(j >= 1.0) || !std::isfinite(j)) {
        throw Error(ErrorKind::domain, "measurement", "irr_multi: j must be >= 1");
    }
    return j * irr1 / (j * irr1 + 1.0 - irr1);
}

inline IrrEstimate irr_estimate(const VarianceComponents& vc) {
    const double irr1 = irr_single(vc);
    return {irr1, irr_multi(irr1, vc.mean_ratings), vc.mean_ratings};
}

} // namespace irrsel
