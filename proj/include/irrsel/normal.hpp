#pragma once

// Univariate and bivariate standard normal numerics.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "irrsel/error.hpp"

namespace irrsel {

/// A probability in [0, 1]. Converts implicitly to double.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw Error(ErrorKind::domain, "bvn-core", "probability outside [0,1]: " + std::to_string(value));
        }
    }
    [[nodiscard]] constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; } // NOLINT(google-explicit-constructor)

private:
    double value_ = 0.0;
};

/// A correlation coefficient in [-1, 1].
class Correlation {
public:
    explicit Correlation(double rho) : rho_(rho) {
        if (!(rho >= -1.0 && rho <= 1.0)) {
            throw Error(ErrorKind::domain, "bvn-core", "correlation outside [-1,1]: " + std::to_string(rho));
        }
    }
    [[nodiscard]] constexpr double value() const noexcept { return rho_; }

private:
    double rho_;
};

namespace detail {

inline double phi_unchecked(double z) noexcept {
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

// Acklam's rational approximation for the lower tail, p in (0, 0.5].
inline double quantile_initial_lower(double p) noexcept {
    constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                         -2.759285104469687e+02, 1.383577518672690e+02,
                                         -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                         -1.556989798598866e+02, 6.680131188771972e+01,
                                         -1.328068155288572e+01};
    constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                         -2.400758277161838e+00, -2.549732539343734e+00,
                                         4.374664141464968e+00,  2.938163982698783e+00};
    constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                         2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double quantile_lower(double p) noexcept {
    double x = quantile_initial_lower(p);
    // One Halley step against the exact cdf.
    const double e = phi_unchecked(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

} // namespace detail

/// Standard normal cdf. Throws on non-finite input.
inline Probability std_normal_cdf(double z) {
    if (!std::isfinite(z)) {
        throw Error(ErrorKind::domain, "bvn-core", "std_normal_cdf: non-finite argument");
    }
    return Probability(detail::phi_unchecked(z));
}

/// Standard normal quantile for p in (0, 1).
///
/// Rational initial guess refined by one Halley step, so |Phi(z) - p| is at
/// the level of the cdf's own rounding. The upper half is computed through
/// the lower tail (1 - p is exact there), which keeps q(p) = -q(1 - p).
inline double std_normal_quantile(double p) {
    if (p == 0.0 || p == 1.0) {
        throw Error(ErrorKind::undefined, "bvn-core", "std_normal_quantile: unbounded quantile at p = " +
                                                          std::to_string(p));
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorKind::domain, "bvn-core", "std_normal_quantile: p outside (0,1)");
    }
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -detail::quantile_lower(1.0 - p);
    return detail::quantile_lower(p);
}

namespace detail {

struct GaussLegendreHalf {
    int size;
    std::array<double, 10> weight;
    std::array<double, 10> node;
};

// Positive halves of the 6-, 12- and 20-point Gauss-Legendre rules on [-1, 1].
inline constexpr std::array<GaussLegendreHalf, 3> kBvnRules = {{
    {3,
     {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
     {0.9324695142031522, 0.6612093864662647, 0.2386191860831970}},
    {6,
     {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
      0.2334925365383547, 0.2491470458134029},
     {0.9815606342467191, 0.9041172563704750, 0.7699026741943050, 0.5873179542866171,
      0.3678314989981802, 0.1252334085114692}},
    {10,
     {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
      0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
      0.1491729864726037, 0.1527533871307259},
     {0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
      0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
      0.2277858511416451, 0.07652652113349733}},
}};

// Drezner-Wesolowsky / Genz scheme for P(X > h, Y > k), |r| < 1, r != 0.
inline double bvn_upper_genz(double h, double k, double r) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto& rule = std::abs(r) < 0.3 ? kBvnRules[0] : (std::abs(r) < 0.75 ? kBvnRules[1] : kBvnRules[2]);

    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = std::asin(r);
        for (int i = 0; i < rule.size; ++i) {
            for (const double sign : {-1.0, 1.0}) {
                const double sn = std::sin(asr * (sign * rule.node[i] + 1.0) / 2.0);
                bvn += rule.weight[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / (2.0 * two_pi) + phi_unchecked(-h) * phi_unchecked(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-0.5 * (bs / as + hk)) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * phi_unchecked(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < rule.size; ++i) {
        for (const double sign : {-1.0, 1.0}) {
            const double t = a * (sign * rule.node[i] + 1.0);
            const double xs = t * t;
            const double rs = std::sqrt(1.0 - xs);
            bvn += a * rule.weight[i] * std::exp(-0.5 * (bs / xs + hk)) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
        }
    }
    bvn = -bvn / two_pi;

    if (r > 0.0) return bvn + phi_unchecked(-std::max(h, k));
    bvn = -bvn;
    if (k > h) {
        bvn += h < 0.0 ? phi_unchecked(k) - phi_unchecked(h) : phi_unchecked(-h) - phi_unchecked(-k);
    }
    return bvn;
}

} // namespace detail

/// Upper orthant probability P(X > h, Y > k) of a standard bivariate normal
/// with correlation rho.
///
/// Gauss-Legendre quadrature of the Drezner-Wesolowsky representation with
/// 6/12/20 points depending on |rho|, switching to the asymptotic expansion
/// for |rho| >= 0.925 (absolute error ~1e-15). rho = 0 and rho = +-1 are
/// evaluated in closed form.
inline Probability bvn_upper_tail(double h, double k, Correlation rho) {
    if (!std::isfinite(h) || !std::isfinite(k)) {
        throw Error(ErrorKind::domain, "bvn-core", "bvn_upper_tail: non-finite limit");
    }
    const double r = rho.value();
    double p = 0.0;
    if (r == 1.0) {
        p = detail::phi_unchecked(-std::max(h, k));
    } else if (r == -1.0) {
        p = std::max(0.0, detail::phi_unchecked(-k) - detail::phi_unchecked(h));
    } else if (r == 0.0) {
        p = detail::phi_unchecked(-h) * detail::phi_unchecked(-k);
    } else {
        p = detail::bvn_upper_genz(h, k, r);
    }
    return Probability(std::clamp(p, 0.0, 1.0));
}

} // namespace irrsel
