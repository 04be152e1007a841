// SPDX-License-Identifier: Apache-2.0
//
// Shapiro-Wilk W with Royston's coefficient approximation and normalizing
// transformation for the p-value (Royston 1995, Applied Statistics AS R94).

#include "synergy/stats.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace synergy::stats {

namespace {

// cc[0] + cc[1] x + ... + cc[n-1] x^(n-1)
template <std::size_t N>
double poly(const std::array<double, N>& cc, double x) {
    double acc = 0.0;
    for (std::size_t i = N; i-- > 0;)
        acc = acc * x + cc[i];
    return acc;
}

constexpr std::array<double, 6> kC1{0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr std::array<double, 6> kC2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr std::array<double, 4> kC3{0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr std::array<double, 4> kC4{1.3822, -0.77857, 0.062767, -0.0020322};
constexpr std::array<double, 4> kC5{-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr std::array<double, 3> kC6{-0.4803, -0.082676, 0.0030302};
constexpr std::array<double, 2> kG{-2.273, 0.459};

// Upper-half coefficients a_1..a_{n/2} (positive, largest first).
std::vector<double> coefficients(std::size_t n) {
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
        return a;
    }
    const double an = static_cast<double>(n);
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25)); // negative
        summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

    std::size_t first_scaled;
    double fac;
    if (n > 5) {
        first_scaled = 2;
        const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
    } else {
        first_scaled = 1;
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i)
        a[i] = -m[i] / fac;
    return a;
}

} // namespace

TestResult shapiro_wilk(Sample sample) {
    const auto n = sample.size();
    if (n < 3)
        throw Error(ErrorKind::SampleTooSmall, "Shapiro-Wilk needs n >= 3, got " + std::to_string(n));
    if (n > 5000)
        throw Error(ErrorKind::SampleTooLarge, "Shapiro-Wilk supports n <= 5000, got " + std::to_string(n));

    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (range == 0.0)
        throw Error(ErrorKind::ZeroVariance, "all values are equal");

    const auto a = coefficients(n);
    const std::size_t half = n / 2;

    // W as the squared correlation between the ordered sample and the
    // antisymmetric coefficient vector (which has zero mean).
    double xbar = 0.0;
    for (double v : x)
        xbar += v / range;
    xbar /= static_cast<double>(n);

    double ssa = 0.0, ssx = 0.0, sax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        double coef = 0.0;
        if (i < half)
            coef = -a[i];
        else if (j < half)
            coef = a[j];
        const double xc = x[i] / range - xbar;
        ssa += coef * coef;
        ssx += xc * xc;
        sax += coef * xc;
    }
    const double ssassx = std::sqrt(ssa * ssx);
    double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx); // 1 - W
    // Residual at rounding level means the sample is exactly linear in the
    // coefficients (e.g. three equally spaced points).
    if (w1 < 64.0 * std::numeric_limits<double>::epsilon())
        w1 = 0.0;
    w1 = std::min(w1, 1.0);
    const double w = 1.0 - w1;

    TestResult r;
    r.method = Method::ShapiroWilk;
    r.statistic = w;
    r.n = {n};

    if (n == 3) {
        // Exact distribution for three observations.
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        r.p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
        return r;
    }

    if (w1 == 0.0) {
        r.p_value = 1.0;
        return r;
    }

    double y = std::log(w1);
    const double an = static_cast<double>(n);
    double mu, sigma;
    if (n <= 11) {
        const double gamma = poly(kG, an);
        if (y >= gamma) {
            r.p_value = 1e-99;
            return r;
        }
        y = -std::log(gamma - y);
        mu = poly(kC3, an);
        sigma = std::exp(poly(kC4, an));
    } else {
        const double xx = std::log(an);
        mu = poly(kC5, xx);
        sigma = std::exp(poly(kC6, xx));
    }
    r.p_value = std::clamp(normal_upper((y - mu) / sigma), 0.0, 1.0);
    return r;
}

} // namespace synergy::stats
