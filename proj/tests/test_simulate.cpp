#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "irrsel/classify.hpp"
#include "irrsel/random.hpp"
#include "irrsel/simulate.hpp"

using namespace irrsel;

namespace {

ValidatedRatings single_ratings(const std::vector<double>& means) {
    ValidatedRatings t;
    for (std::size_t i = 0; i < means.size(); ++i) {
        t.applicant_ids.push_back(std::to_string(i));
        t.scores.push_back({means[i]});
    }
    return t;
}

SimulationConfig small_config(std::uint64_t seed, std::size_t reps) {
    SimulationConfig c;
    c.irr1_values = {0.3};
    c.n_values = {40};
    c.j_values = {3, 5};
    c.replications = reps;
    c.seed = seed;
    c.threads = 1;
    return c;
}

} // namespace

TEST(GenerateDataset, PerfectReliability) {
    auto rng = substream(1, {2});
    const auto d = generate_dataset(1.0, 50, 4, 1.0, rng);
    ASSERT_EQ(d.table.n_applicants(), 50u);
    for (std::size_t i = 0; i < 50; ++i) {
        for (double y : d.table.scores[i]) EXPECT_EQ(y, d.latent[i]);
    }
}

TEST(GenerateDataset, ShapeAndDeterminism) {
    auto r1 = substream(9, {0, 0});
    auto r2 = substream(9, {0, 0});
    const auto a = generate_dataset(0.3, 100, 5, 1.0, r1);
    const auto b = generate_dataset(0.3, 100, 5, 1.0, r2);
    EXPECT_EQ(a.latent, b.latent);
    EXPECT_EQ(a.table.scores, b.table.scores);
    EXPECT_EQ(a.table.balanced_count(), 5u);
    auto r3 = substream(9, {0, 1});
    EXPECT_NE(generate_dataset(0.3, 100, 5, 1.0, r3).latent, a.latent);
}

TEST(GenerateDataset, EstimatorConsistency) {
    double sum = 0.0;
    for (std::uint64_t rep = 0; rep < 1000; ++rep) {
        auto rng = substream(123, {rep});
        sum += irr_single(variance_components_anova(generate_dataset(0.30, 100, 5, 1.0, rng).table));
    }
    EXPECT_NEAR(sum / 1000.0, 0.30, 0.02);
}

TEST(GenerateDataset, TotalVarianceScales) {
    auto rng = substream(5, {1});
    const auto d = generate_dataset(0.4, 4000, 2, 9.0, rng);
    const auto vc = variance_components_anova(d.table);
    EXPECT_NEAR(vc.var_gamma + vc.var_epsilon, 9.0, 0.5);
}

TEST(EmpiricalCurve, NoErrorIsDiagonal) {
    auto rng = substream(3, {3});
    const auto d = generate_dataset(1.0, 60, 3, 1.0, rng);
    const auto curve = empirical_tp_curve(d.latent, d.table);
    ASSERT_EQ(curve.size(), 59u);
    for (std::size_t i = 0; i < curve.size(); ++i) EXPECT_DOUBLE_EQ(curve[i], (i + 1) / 60.0);
}

TEST(EmpiricalCurve, ReversedRanking) {
    const auto curve = empirical_tp_curve({1, 2, 3}, single_ratings({3, 2, 1}));
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_EQ(curve[0], 0.0);
    EXPECT_DOUBLE_EQ(curve[1], 1.0 / 3.0); // top-2 {3,2} vs {1,2}
    EXPECT_THROW((void)empirical_tp_curve({1, 2}, single_ratings({3, 2, 1})), Error);
}

TEST(TopKOverlap, MatchesSetIntersection) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rep;
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = z(rng);
        for (std::size_t i = 0; i < n; ++i) b[i] = 0.5 * a[i] + z(rng);
        if (rep % 5 == 0) b[n / 2] = b[0]; // exercise the tie rule
        const auto ov = top_k_overlap(a, b);
        const auto oa = detail::rank_descending(a), ob = detail::rank_descending(b);
        for (std::size_t k = 0; k <= n; ++k) {
            std::vector<std::size_t> sa(oa.begin(), oa.begin() + k), sb(ob.begin(), ob.begin() + k);
            std::sort(sa.begin(), sa.end());
            std::sort(sb.begin(), sb.end());
            std::vector<std::size_t> both;
            std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
            EXPECT_EQ(ov[k], both.size());
        }
        EXPECT_EQ(ov[n], n);
    }
}

TEST(TopKOverlap, TopBottomComplement) {
    // |bottom_(N-k)(a) & bottom_(N-k)(b)| = N - |top_k(a) | top_k(b)| = N - 2k + |top_k(a) & top_k(b)|
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 1.0);
    const std::size_t n = 73;
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = z(rng);
    for (std::size_t i = 0; i < n; ++i) b[i] = a[i] + z(rng);
    const auto top = top_k_overlap(a, b);
    std::vector<double> na(n), nb(n);
    std::transform(a.begin(), a.end(), na.begin(), std::negate<>());
    std::transform(b.begin(), b.end(), nb.begin(), std::negate<>());
    const auto bottom = top_k_overlap(na, nb);
    for (std::size_t k = 0; k <= n; ++k) {
        EXPECT_EQ(bottom[n - k], n - 2 * k + top[k]) << k;
    }
}

TEST(TopKOverlap, PermutationOracle) {
    const std::size_t n = 20;
    const int shuffles = 10000;
    std::mt19937_64 rng(404);
    std::vector<double> latent(n);
    std::iota(latent.begin(), latent.end(), 0.0);
    std::vector<double> sum(n + 1, 0.0), sum_sq(n + 1, 0.0);
    std::vector<double> perm = latent;
    for (int s = 0; s < shuffles; ++s) {
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto ov = top_k_overlap(latent, perm);
        for (std::size_t k = 0; k <= n; ++k) {
            const double v = static_cast<double>(ov[k]) / n;
            sum[k] += v;
            sum_sq[k] += v * v;
        }
    }
    for (std::size_t k = 1; k < n; ++k) {
        const double mean = sum[k] / shuffles;
        const double var = sum_sq[k] / shuffles - mean * mean;
        const double se = std::sqrt(var / shuffles);
        const double expected = static_cast<double>(k * k) / (n * n);
        EXPECT_LE(std::abs(mean - expected), 3.0 * se) << "k " << k;
    }
}

TEST(ApproxCurve, Limits) {
    VarianceComponents zero;
    zero.var_gamma = 0.0;
    zero.var_epsilon = 1.0;
    const auto indep = approx_tp_curve(zero, 50, 5);
    ASSERT_TRUE(indep.defined);
    for (std::size_t k = 1; k < 50; ++k) EXPECT_DOUBLE_EQ(indep.values[k - 1], (k / 50.0) * (k / 50.0));

    VarianceComponents perfect;
    perfect.var_gamma = 2.0;
    perfect.var_epsilon = 0.0;
    const auto diag = approx_tp_curve(perfect, 50, 5);
    for (std::size_t k = 1; k < 50; ++k) EXPECT_DOUBLE_EQ(diag.values[k - 1], k / 50.0);

    VarianceComponents none;
    const auto undefined = approx_tp_curve(none, 10, 3);
    EXPECT_FALSE(undefined.defined);
    EXPECT_TRUE(std::isnan(undefined.values[0]));
}

TEST(ApproxCurve, ConsistentWithClassify) {
    VarianceComponents vc;
    vc.var_gamma = 0.3;
    vc.var_epsilon = 0.7;
    const auto curve = approx_tp_curve(vc, 100, 5);
    EXPECT_EQ(curve.values[19], true_positive_prob(irr_multi(0.3, 5.0), 0.2));
    EXPECT_NEAR(curve.values[19], true_positive_prob_raw(vc, SelectionDesign::from_counts(100, 20, 5)), 1e-10);
}

TEST(RunStudy, ReflectionSymmetry) {
    // Per replication the approximation satisfies tp(1 - p) = 1 - 2p + tp(p),
    // and the empirical curve at N - k equals 1 - 2k/N plus the bottom-k
    // overlap, which has the same distribution as the top-k overlap.
    const auto cfg = small_config(14, 1);
    const auto cond = enumerate_conditions(cfg)[0];
    const std::size_t n = cond.n;
    for (std::size_t rep = 0; rep < 20; ++rep) {
        const auto r = run_replication(cfg, cond, rep);
        for (std::size_t k = 1; k < n; ++k) {
            const double p = static_cast<double>(k) / n;
            EXPECT_NEAR(r.approx_tp[n - k - 1], 1.0 - 2.0 * p + r.approx_tp[k - 1], 1e-12);
        }
    }
    SimulationConfig big;
    big.irr1_values = {0.15};
    big.n_values = {100};
    big.j_values = {3};
    big.replications = 20000;
    big.seed = 99;
    const auto& cs = run_study(big).conditions[0];
    for (double p : {0.05, 0.1, 0.2, 0.3}) {
        const auto lo = cs.index_of(p), hi = cs.index_of(1.0 - p);
        const double se = std::sqrt(cs.rmse[lo] * cs.rmse[lo] - cs.bias[lo] * cs.bias[lo]) / std::sqrt(20000.0);
        // The two estimates share the estimation noise; their gap is the
        // top- vs bottom-overlap difference only.
        EXPECT_LE(std::abs(cs.bias[lo] - cs.bias[hi]), 4.0 * se) << p;
    }
}

TEST(RunStudy, SingleReplicationIsIdentity) {
    const auto cfg = small_config(5, 1);
    const auto s = run_study(cfg);
    ASSERT_EQ(s.conditions.size(), 2u);
    for (const auto& cs : s.conditions) {
        const auto r = run_replication(cfg, cs.condition, 0);
        EXPECT_EQ(cs.mean_empirical, r.empirical_tp);
        EXPECT_EQ(cs.mean_approx, r.approx_tp);
        for (std::size_t i = 0; i < cs.bias.size(); ++i) {
            EXPECT_EQ(cs.bias[i], r.approx_tp[i] - r.empirical_tp[i]);
            EXPECT_EQ(cs.rmse[i], std::abs(cs.bias[i]));
        }
    }
}

TEST(RunStudy, FeasibleCurvesAndRmseBound) {
    const auto s = run_study(small_config(8, 60));
    for (const auto& cs : s.conditions) {
        EXPECT_EQ(cs.replications_used + s.failures.size(), 60u);
        for (std::size_t i = 0; i < cs.bias.size(); ++i) {
            const double p = cs.p_select(i);
            EXPECT_GE(cs.rmse[i], std::abs(cs.bias[i]));
            EXPECT_GE(cs.mean_empirical[i], std::max(0.0, 2 * p - 1) - 1e-12);
            EXPECT_LE(cs.mean_empirical[i], p + 1e-12);
            EXPECT_GE(cs.mean_approx[i], 0.0);
            EXPECT_LE(cs.mean_approx[i], p + 1e-12);
            if (i > 0) {
                EXPECT_GE(cs.mean_empirical[i], cs.mean_empirical[i - 1]);
                EXPECT_GE(cs.mean_approx[i], cs.mean_approx[i - 1]);
            }
        }
    }
    for (std::size_t rep = 0; rep < 20; ++rep) {
        const auto r = run_replication(small_config(8, 60), s.conditions[0].condition, rep);
        for (std::size_t i = 0; i < r.empirical_tp.size(); ++i) {
            const double p = (i + 1) / 40.0;
            EXPECT_LE(r.empirical_tp[i], p + 1e-12);
            EXPECT_LE(r.approx_tp[i], p + 1e-12);
            if (i > 0) {
                EXPECT_GE(r.approx_tp[i], r.approx_tp[i - 1]);
            }
        }
    }
}

TEST(RunStudy, DeterministicAcrossThreadCounts) {
    auto a_cfg = small_config(42, 50);
    auto b_cfg = a_cfg;
    b_cfg.threads = 4;
    const auto a = run_study(a_cfg);
    const auto b = run_study(b_cfg);
    const auto c = run_study(a_cfg);
    for (std::size_t i = 0; i < a.conditions.size(); ++i) {
        EXPECT_EQ(a.conditions[i].mean_empirical, b.conditions[i].mean_empirical);
        EXPECT_EQ(a.conditions[i].rmse, b.conditions[i].rmse);
        EXPECT_EQ(a.conditions[i].bias, c.conditions[i].bias);
    }
}

TEST(RunStudy, HighReliabilityIsNearlyUnbiased) {
    SimulationConfig cfg;
    cfg.irr1_values = {0.45};
    cfg.n_values = {100};
    cfg.j_values = {10};
    cfg.replications = 1000;
    cfg.seed = 2022;
    const auto s = run_study(cfg);
    double worst = 0.0;
    for (double b : s.conditions[0].bias) worst = std::max(worst, std::abs(b));
    EXPECT_LE(worst, 0.01);
}

TEST(RunStudy, RmseShrinksWithN) {
    SimulationConfig cfg;
    cfg.irr1_values = {0.30};
    cfg.n_values = {100, 300, 1000};
    cfg.j_values = {5};
    cfg.replications = 100;
    cfg.seed = 11;
    const auto s = run_study(cfg);
    ASSERT_EQ(s.conditions.size(), 3u);
    std::vector<double> at_half;
    for (const auto& cs : s.conditions) at_half.push_back(cs.rmse[cs.index_of(0.5)]);
    EXPECT_GT(at_half[0], at_half[1]);
    EXPECT_GT(at_half[1], at_half[2]);
}

TEST(RunStudy, ConfigValidation) {
    auto cfg = small_config(1, 10);
    cfg.irr1_values = {1.0};
    EXPECT_THROW((void)run_study(cfg), Error);
    cfg = small_config(1, 0);
    EXPECT_THROW((void)run_study(cfg), Error);
    cfg = small_config(1, 10);
    cfg.j_values = {1};
    try {
        (void)run_study(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::usage);
    }
    EXPECT_EQ(enumerate_conditions(desk_preset()).size(), 9u);
    EXPECT_EQ(desk_preset().replications, 200u);
}
