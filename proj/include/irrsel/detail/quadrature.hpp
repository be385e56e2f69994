#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace irrsel::detail {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
template <class F>
QuadratureResult gauss_kronrod15(const F& f, double a, double b) {
    constexpr std::array<double, 8> xgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    constexpr std::array<double, 8> wgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = wgk[7] * fc;
    double gauss = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * xgk[i];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += wgk[i] * sum;
        if (i % 2 == 1) gauss += wg[i / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Recursive bisection until each panel's Gauss/Kronrod discrepancy is below
// its share of the absolute tolerance.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol, int max_depth = 40) {
    const auto whole = gauss_kronrod15(f, a, b);
    std::function<double(double, double, QuadratureResult, double, int)> refine =
        [&](double lo, double hi, QuadratureResult est, double tol, int depth) -> double {
        if (est.error <= tol || depth >= max_depth) return est.value;
        const double mid = 0.5 * (lo + hi);
        const auto left = gauss_kronrod15(f, lo, mid);
        const auto right = gauss_kronrod15(f, mid, hi);
        return refine(lo, mid, left, 0.5 * tol, depth + 1) + refine(mid, hi, right, 0.5 * tol, depth + 1);
    };
    return refine(a, b, whole, abs_tol, 0);
}

} // namespace irrsel::detail
