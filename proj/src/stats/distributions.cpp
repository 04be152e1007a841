// SPDX-License-Identifier: Apache-2.0
#include "synergy/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace synergy::stats {

namespace bm = boost::math;

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

} // namespace

double normal_cdf(double z) {
    if (std::isinf(z))
        return z > 0 ? 1.0 : 0.0;
    return bm::cdf(bm::normal_distribution<double>(), z);
}

double normal_upper(double z) {
    if (std::isinf(z))
        return z > 0 ? 0.0 : 1.0;
    return bm::cdf(bm::complement(bm::normal_distribution<double>(), z));
}

double normal_quantile(double p) {
    if (p <= 0.0)
        return -std::numeric_limits<double>::infinity();
    if (p >= 1.0)
        return std::numeric_limits<double>::infinity();
    return bm::quantile(bm::normal_distribution<double>(), p);
}

double chi_squared_upper(double x, double df) {
    if (x <= 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    return clamp01(bm::cdf(bm::complement(bm::chi_squared_distribution<double>(df), x)));
}

double f_upper(double x, double df1, double df2) {
    if (x <= 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    return clamp01(bm::cdf(bm::complement(bm::fisher_f_distribution<double>(df1, df2), x)));
}

double t_two_sided(double t, double df) {
    if (std::isinf(t))
        return 0.0;
    if (t == 0.0)
        return 1.0;
    return clamp01(2.0 * bm::cdf(bm::complement(bm::students_t_distribution<double>(df), std::abs(t))));
}

} // namespace synergy::stats
