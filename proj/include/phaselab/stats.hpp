#ifndef PHASELAB_STATS_HPP
#define PHASELAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace phaselab::stats {

namespace detail {

/// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a+1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

inline double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_cf(a, x);
}

/// Upper tail of the chi-square distribution with k degrees of freedom.
inline double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

struct Chi2Result {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square of observed counts against expected counts.
/// Bins with expectation below `min_expected` are pooled into one group; if
/// even the pooled group stays underfilled the test refuses to run.
inline Chi2Result chi2_gof(const std::vector<double>& observed,
                           const std::vector<double>& expected,
                           double min_expected = 5.0) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi2_gof: size mismatch");
    double stat = 0.0;
    int used = 0;
    double pool_obs = 0.0, pool_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < min_expected) {
            pool_obs += observed[i];
            pool_exp += expected[i];
        } else {
            const double d = observed[i] - expected[i];
            stat += d * d / expected[i];
            ++used;
        }
    }
    if (pool_exp > 0.0) {
        if (pool_exp < min_expected)
            throw std::runtime_error(
                "chi2_gof: pooled expected count below threshold; "
                "increase the trial count or coarsen the binning");
        const double d = pool_obs - pool_exp;
        stat += d * d / pool_exp;
        ++used;
    }
    if (used < 2) throw std::runtime_error("chi2_gof: fewer than two effective bins");
    Chi2Result r;
    r.statistic = stat;
    r.dof = used - 1;
    r.p_value = chi2_sf(stat, static_cast<double>(r.dof));
    return r;
}

/// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double ks_tail(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample KS test against a CDF (asymptotic p-value with the
/// Stephens small-sample correction).
inline KsResult ks_one_sample(std::vector<double> data,
                              const std::function<double(double)>& cdf) {
    if (data.size() < 5) throw std::invalid_argument("ks_one_sample: need at least 5 samples");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d_max = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = cdf(data[i]);
        d_max = std::max(d_max, std::abs(f - static_cast<double>(i) / n));
        d_max = std::max(d_max, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double sn = std::sqrt(n);
    KsResult r;
    r.statistic = d_max;
    r.p_value = ks_tail((sn + 0.12 + 0.11 / sn) * d_max);
    return r;
}

/// Two-sample KS test.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 5 || b.size() < 5)
        throw std::invalid_argument("ks_two_sample: need at least 5 samples each");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d_max = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d_max = std::max(d_max, std::abs(static_cast<double>(i) / na -
                                         static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sn = std::sqrt(ne);
    KsResult r;
    r.statistic = d_max;
    r.p_value = ks_tail((sn + 0.12 + 0.11 / sn) * d_max);
    return r;
}

struct RateEstimate {
    double rate = 0.0;
    double stderr_ = 0.0;
};

inline RateEstimate binomial_rate(double successes, double trials) {
    if (trials < 1.0) throw std::invalid_argument("binomial_rate: trials >= 1 required");
    RateEstimate r;
    r.rate = successes / trials;
    r.stderr_ = std::sqrt(std::max(0.0, r.rate * (1.0 - r.rate) / trials));
    return r;
}

}  // namespace phaselab::stats

#endif
