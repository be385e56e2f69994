#pragma once

// Monte Carlo check of the quantile approximation: simulate balanced rating
// data, compare empirical top-k overlap with the approximated P(S and A) over
// all k, and aggregate bias and RMSE per condition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "irrsel/classify.hpp"
#include "irrsel/error.hpp"
#include "irrsel/parallel.hpp"
#include "irrsel/random.hpp"
#include "irrsel/ratings.hpp"
#include "irrsel/variance.hpp"

namespace irrsel {

struct SimulationConfig {
    std::vector<double> irr1_values = {0.15, 0.30, 0.45};
    std::vector<std::size_t> n_values = {100, 300, 1000};
    std::vector<std::size_t> j_values = {3, 5, 10};
    std::size_t replications = 1000;
    double total_variance = 1.0;
    std::uint64_t seed = 0;
    Estimator estimator = Estimator::anova;
    unsigned threads = 0;

    void validate() const {
        const auto fail = [](const std::string& what) { throw Error(ErrorKind::usage, "simulate", what); };
        if (irr1_values.empty() || n_values.empty() || j_values.empty()) fail("empty simulation grid");
        for (double r : irr1_values) {
            if (!(r > 0.0 && r < 1.0)) fail("irr1 values must lie in (0,1)");
        }
        for (auto n : n_values) {
            if (n < 2) fail("N values must be at least 2");
        }
        for (auto j : j_values) {
            if (j < 2) fail("J values must be at least 2");
        }
        if (replications == 0) fail("replications must be positive");
        if (!(total_variance > 0.0) || !std::isfinite(total_variance)) fail("total variance must be positive");
    }
};

/// 200 replications at N = 100 over the 3 x 3 reliability-by-raters grid.
inline SimulationConfig desk_preset(std::uint64_t seed = 0) {
    SimulationConfig c;
    c.n_values = {100};
    c.replications = 200;
    c.seed = seed;
    return c;
}

inline SimulationConfig full_preset(std::uint64_t seed = 0) {
    SimulationConfig c;
    c.seed = seed;
    return c;
}

struct SimulationCondition {
    std::size_t index = 0;
    double irr1 = 0.0;
    std::size_t n = 0;
    std::size_t j = 0;
};

/// Conditions ordered by N, then irr1, then J.
inline std::vector<SimulationCondition> enumerate_conditions(const SimulationConfig& config) {
    std::vector<SimulationCondition> out;
    for (auto n : config.n_values) {
        for (double irr : config.irr1_values) {
            for (auto j : config.j_values) out.push_back({out.size(), irr, n, j});
        }
    }
    return out;
}

struct SimulatedDataset {
    std::vector<double> latent;
    ValidatedRatings table;
};

/// Balanced draw from the measurement model with var_gamma = irr1 * total and
/// var_epsilon = (1 - irr1) * total.
template <class Rng>
SimulatedDataset generate_dataset(double irr1, std::size_t n, std::size_t j, double total_variance, Rng& rng) {
    if (!(irr1 >= 0.0 && irr1 <= 1.0)) throw Error(ErrorKind::domain, "simulate", "irr1 outside [0,1]");
    if (n < 1 || j < 1) throw Error(ErrorKind::domain, "simulate", "N and J must be positive");
    const double sd_gamma = std::sqrt(irr1 * total_variance);
    const double sd_eps = std::sqrt((1.0 - irr1) * total_variance);
    std::normal_distribution<double> std_normal(0.0, 1.0);

    SimulatedDataset d;
    d.latent.reserve(n);
    d.table.applicant_ids.reserve(n);
    d.table.scores.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gamma = sd_gamma * std_normal(rng);
        d.latent.push_back(gamma);
        d.table.applicant_ids.push_back(std::to_string(i));
        std::vector<double> s(j);
        for (auto& y : s) y = gamma + (sd_eps > 0.0 ? sd_eps * std_normal(rng) : 0.0);
        d.table.scores.push_back(std::move(s));
    }
    return d;
}

namespace detail {

// Indices sorted by value descending; ties by ascending index.
inline std::vector<std::size_t> rank_descending(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    return order;
}

} // namespace detail

/// Overlap counts |top-k by a| intersect |top-k by b| for k = 0..N.
inline std::vector<std::size_t> top_k_overlap(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::domain, "simulate", "ranking length mismatch");
    const std::size_t n = a.size();
    const auto order_a = detail::rank_descending(a);
    const auto order_b = detail::rank_descending(b);
    std::vector<std::size_t> rank_a(n), rank_b(n);
    for (std::size_t r = 0; r < n; ++r) {
        rank_a[order_a[r]] = r;
        rank_b[order_b[r]] = r;
    }
    std::vector<std::size_t> overlap(n + 1, 0);
    for (std::size_t k = 1; k <= n; ++k) {
        // Step k adds order_a[k-1] to the a-set and order_b[k-1] to the b-set.
        const std::size_t from_a = order_a[k - 1];
        const std::size_t from_b = order_b[k - 1];
        std::size_t add = 0;
        if (rank_b[from_a] < k) ++add;
        if (from_b != from_a && rank_a[from_b] < k - 1) ++add;
        overlap[k] = overlap[k - 1] + add;
    }
    return overlap;
}

/// Empirical P(S and A) for k = 1..N-1 (element k-1): overlap of the top k
/// by latent ability and the top k by mean score, divided by N.
inline std::vector<double> empirical_tp_curve(const std::vector<double>& latent, const ValidatedRatings& table) {
    if (latent.size() != table.n_applicants()) {
        throw Error(ErrorKind::domain, "simulate", "latent length does not match the applicant count");
    }
    std::vector<double> means;
    means.reserve(latent.size());
    for (const auto& m : aggregate_scores(table)) means.push_back(m.mean_score);
    const auto overlap = top_k_overlap(latent, means);
    const std::size_t n = latent.size();
    std::vector<double> curve;
    curve.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t k = 1; k + 1 <= n; ++k) curve.push_back(static_cast<double>(overlap[k]) / static_cast<double>(n));
    return curve;
}

struct ApproxCurve {
    std::vector<double> values; // NaN entries when !defined
    bool defined = true;
};

/// Quantile approximation at every k/N, k = 1..N-1, from estimated components.
inline ApproxCurve approx_tp_curve(const VarianceComponents& vc, std::size_t n, std::size_t j) {
    ApproxCurve out;
    if (n < 2) throw Error(ErrorKind::domain, "simulate", "N must be at least 2");
    double irr_j = 0.0;
    try {
        irr_j = irr_multi(irr_single(vc), static_cast<double>(j));
    } catch (const Error&) {
        out.defined = false;
        out.values.assign(n - 1, std::numeric_limits<double>::quiet_NaN());
        return out;
    }
    out.values.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        out.values.push_back(true_positive_prob(irr_j, static_cast<double>(k) / static_cast<double>(n)));
    }
    return out;
}

struct ReplicationResult {
    std::vector<double> empirical_tp;
    std::vector<double> approx_tp;
    VarianceComponents vc_estimate;
};

inline ReplicationResult run_replication(const SimulationConfig& config, const SimulationCondition& condition,
                                         std::size_t replication) {
    auto rng = substream(config.seed, {condition.index, replication});
    auto data = generate_dataset(condition.irr1, condition.n, condition.j, config.total_variance, rng);
    ReplicationResult r;
    r.empirical_tp = empirical_tp_curve(data.latent, data.table);
    r.vc_estimate = estimate_variance_components(data.table, config.estimator);
    auto approx = approx_tp_curve(r.vc_estimate, condition.n, condition.j);
    if (!approx.defined) {
        throw Error(ErrorKind::degenerate_data, "simulate", "approximation undefined for the estimated components");
    }
    r.approx_tp = std::move(approx.values);
    return r;
}

struct ReplicationFailure {
    std::size_t condition = 0;
    std::size_t replication = 0;
    std::string message;
};

struct ConditionSummary {
    SimulationCondition condition;
    std::size_t replications_used = 0;
    std::size_t clamped_estimates = 0; // replications with var_gamma truncated at 0
    std::vector<double> mean_empirical; // index k-1, k = 1..N-1
    std::vector<double> mean_approx;
    std::vector<double> bias; // mean(approx - empirical)
    std::vector<double> rmse;

    [[nodiscard]] double p_select(std::size_t index) const noexcept {
        return static_cast<double>(index + 1) / static_cast<double>(condition.n);
    }
    /// Index of the k whose proportion k/N is nearest to p.
    [[nodiscard]] std::size_t index_of(double p) const noexcept {
        const auto k = std::clamp<long long>(std::llround(p * static_cast<double>(condition.n)), 1,
                                             static_cast<long long>(condition.n) - 1);
        return static_cast<std::size_t>(k - 1);
    }
};

struct SimulationSummary {
    SimulationConfig config;
    std::vector<ConditionSummary> conditions;
    std::vector<ReplicationFailure> failures;
};

/// Runs every grid condition. Replications are computed in parallel and
/// reduced in replication order, so the summary is bit-identical for any
/// thread count.
inline SimulationSummary run_study(const SimulationConfig& config) {
    config.validate();
    SimulationSummary summary;
    summary.config = config;

    for (const auto& cond : enumerate_conditions(config)) {
        std::vector<ReplicationResult> results(config.replications);
        std::vector<std::string> errors(config.replications);
        std::vector<char> ok(config.replications, 0);
        parallel_for(config.replications, config.threads, [&](std::size_t rep) {
            try {
                results[rep] = run_replication(config, cond, rep);
                ok[rep] = 1;
            } catch (const std::exception& e) {
                errors[rep] = e.what();
            }
        });

        const std::size_t len = cond.n - 1;
        ConditionSummary cs;
        cs.condition = cond;
        cs.mean_empirical.assign(len, 0.0);
        cs.mean_approx.assign(len, 0.0);
        cs.bias.assign(len, 0.0);
        cs.rmse.assign(len, 0.0);
        for (std::size_t rep = 0; rep < config.replications; ++rep) {
            if (!ok[rep]) {
                summary.failures.push_back({cond.index, rep, errors[rep]});
                continue;
            }
            const auto& r = results[rep];
            ++cs.replications_used;
            if (r.vc_estimate.var_gamma == 0.0) ++cs.clamped_estimates;
            for (std::size_t i = 0; i < len; ++i) {
                const double diff = r.approx_tp[i] - r.empirical_tp[i];
                cs.mean_empirical[i] += r.empirical_tp[i];
                cs.mean_approx[i] += r.approx_tp[i];
                cs.bias[i] += diff;
                cs.rmse[i] += diff * diff;
            }
            results[rep] = {};
        }
        if (cs.replications_used > 0) {
            const auto used = static_cast<double>(cs.replications_used);
            for (std::size_t i = 0; i < len; ++i) {
                cs.mean_empirical[i] /= used;
                cs.mean_approx[i] /= used;
                cs.bias[i] /= used;
                cs.rmse[i] = std::sqrt(cs.rmse[i] / used);
            }
        }
        summary.conditions.push_back(std::move(cs));
    }
    return summary;
}

} // namespace irrsel
