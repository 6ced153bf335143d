// disklab/stats.hpp — statistical verification harness: two-sample KS test,
// empirical characteristic functions with bootstrap CIs, tail-exponent fits,
// a chi-square uniformity test, reflected-BM hitting-time oracle sampling,
// and binomial calibration helpers.  Thresholds are always caller-supplied:
// pass/fail levels live in config, never in this header.
//
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "disklab/common.hpp"

namespace disklab {

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n = 0;
    bool pass = false;
    std::uint64_t seed = 0;
};

namespace detail {

// Kolmogorov distribution tail Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} e^{-2k^2 lambda^2}.
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0, term;
    for (int k = 1; k <= 100; ++k) {
        term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * sq(k * lambda));
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// Regularized lower incomplete gamma P(a,x) (series + continued fraction).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 0.0;
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {  // series
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a,x)
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov–Smirnov with the asymptotic p-value.
// ---------------------------------------------------------------------------
inline TestReport ks_two_sample(std::vector<double> a, std::vector<double> b,
                                double level = 0.01) {
    if (a.empty() || b.empty()) throw EmptySample("ks_two_sample needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;

    TestReport r;
    r.name = "ks_two_sample";
    r.statistic = d;
    r.p_value = detail::kolmogorov_q(lambda);
    r.n = a.size() + b.size();
    r.pass = r.p_value > level;
    return r;
}

// ---------------------------------------------------------------------------
// Empirical characteristic function at frequency u, with a bootstrap CI for
// its magnitude.
// ---------------------------------------------------------------------------
struct EcfResult {
    complex value{0.0, 0.0};
    double magnitude = 0.0;
    double mag_ci_lo = 0.0;
    double mag_ci_hi = 0.0;
};

inline EcfResult empirical_cf(const std::vector<double>& samples, double u,
                              int n_boot = 200, std::uint64_t seed = 1) {
    if (samples.empty()) throw EmptySample("empirical_cf needs samples");
    complex sum{0.0, 0.0};
    std::vector<double> cs(samples.size()), sn(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        cs[k] = std::cos(u * samples[k]);
        sn[k] = std::sin(u * samples[k]);
        sum += complex(cs[k], sn[k]);
    }
    EcfResult out;
    out.value = sum / static_cast<double>(samples.size());
    out.magnitude = std::abs(out.value);

    if (n_boot > 1) {
        Rng rng(seed);
        std::vector<double> mags(static_cast<std::size_t>(n_boot));
        for (int b = 0; b < n_boot; ++b) {
            complex s{0.0, 0.0};
            for (std::size_t k = 0; k < samples.size(); ++k) {
                const auto idx = static_cast<std::size_t>(rng.bits() % samples.size());
                s += complex(cs[idx], sn[idx]);
            }
            mags[static_cast<std::size_t>(b)] = std::abs(s) / static_cast<double>(samples.size());
        }
        std::sort(mags.begin(), mags.end());
        out.mag_ci_lo = mags[static_cast<std::size_t>(0.025 * n_boot)];
        out.mag_ci_hi = mags[std::min(mags.size() - 1, static_cast<std::size_t>(0.975 * n_boot))];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tail exponent fit: least squares of log empirical tail vs log x over a
// central window spanning `decades` orders of magnitude; bootstrap CI.
// Returns the exponent alpha of P(X > x) ~ x^-alpha.
// ---------------------------------------------------------------------------
struct TailFit {
    double exponent = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n_window = 0;
};

namespace detail {

inline double tail_slope(const std::vector<double>& sorted, double q_lo, double q_hi,
                         double decades) {
    const std::size_t n = sorted.size();
    const auto i_lo = static_cast<std::size_t>(q_lo * static_cast<double>(n));
    const auto i_hi = std::min(n - 2, static_cast<std::size_t>(q_hi * static_cast<double>(n)));
    if (i_hi <= i_lo + 8) throw SampleTooSmall("tail window too small");
    const double x_lo = sorted[i_lo], x_hi = sorted[i_hi];
    if (x_lo <= 0.0) throw RangeError("tail fit needs positive samples");
    const double span = std::log10(x_hi / x_lo);
    if (span < decades) throw RangeError("samples do not span the requested decades");
    // trim to exactly `decades` decades centered in log-space
    const double mid = 0.5 * (std::log10(x_hi) + std::log10(x_lo));
    const double lo = std::pow(10.0, mid - 0.5 * decades);
    const double hi = std::pow(10.0, mid + 0.5 * decades);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
        if (sorted[i] < lo || sorted[i] > hi) continue;
        const double lx = std::log(sorted[i]);
        const double ly =
            std::log(1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 8) throw SampleTooSmall("too few points in the tail window");
    const double dm = static_cast<double>(m);
    const double slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    return -slope;
}

}  // namespace detail

inline TailFit tail_exponent_fit(const std::vector<double>& samples, double decades,
                                 double q_lo = 0.5, double q_hi = 0.995,
                                 int n_boot = 100, std::uint64_t seed = 1) {
    if (samples.size() < 1000) throw SampleTooSmall("tail_exponent_fit needs >= 1000 samples");
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) throw RangeError("constant samples");

    TailFit fit;
    fit.exponent = detail::tail_slope(sorted, q_lo, q_hi, decades);
    fit.n_window = samples.size();

    if (n_boot > 1) {
        Rng rng(seed);
        std::vector<double> boots;
        boots.reserve(static_cast<std::size_t>(n_boot));
        std::vector<double> resample(samples.size());
        for (int b = 0; b < n_boot; ++b) {
            for (auto& v : resample)
                v = samples[static_cast<std::size_t>(rng.bits() % samples.size())];
            std::sort(resample.begin(), resample.end());
            try {
                boots.push_back(detail::tail_slope(resample, q_lo, q_hi, decades));
            } catch (const Error&) {
                // resample occasionally loses range; skip
            }
        }
        if (boots.size() >= 20) {
            std::sort(boots.begin(), boots.end());
            fit.ci_lo = boots[static_cast<std::size_t>(0.025 * static_cast<double>(boots.size()))];
            fit.ci_hi = boots[std::min(boots.size() - 1,
                                       static_cast<std::size_t>(0.975 * static_cast<double>(boots.size())))];
        } else {
            fit.ci_lo = fit.ci_hi = fit.exponent;
        }
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Chi-square uniformity test for angles in [0, 2pi).
// ---------------------------------------------------------------------------
inline TestReport chi2_uniform_angles(const std::vector<double>& angles, int bins = 32,
                                      double level = 0.01) {
    if (angles.empty()) throw EmptySample("chi2_uniform_angles needs samples");
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double a : angles) {
        auto b = static_cast<std::size_t>(wrap_angle(a) / two_pi * bins);
        counts[std::min(b, counts.size() - 1)] += 1.0;
    }
    const double expect = static_cast<double>(angles.size()) / bins;
    double chi2 = 0.0;
    for (double c : counts) chi2 += sq(c - expect) / expect;

    TestReport r;
    r.name = "chi2_uniform_angles";
    r.statistic = chi2;
    r.p_value = 1.0 - detail::gamma_p(0.5 * (bins - 1), 0.5 * chi2);
    r.n = angles.size();
    r.pass = r.p_value > level;
    return r;
}

// ---------------------------------------------------------------------------
// Reflected Brownian motion hitting-time oracle: first time |BM(speed)| from 0
// hits `level`; direct Euler simulation with reflection at 0.
// ---------------------------------------------------------------------------
inline std::vector<double> reflected_bm_hitting_sample(double level, double speed,
                                                       std::size_t n, std::uint64_t seed,
                                                       double step = 0.0) {
    if (level <= 0.0 || speed <= 0.0) throw ConfigError("level and speed must be positive");
    if (step <= 0.0) step = 1e-4 * sq(level) / speed;
    const double vol = std::sqrt(speed * step);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(seed, i);
        double x = 0.0;
        std::size_t k = 0;
        while (x < level) {
            x += vol * rng.normal();
            if (x < 0.0) x = -x;
            ++k;
        }
        out.push_back(static_cast<double>(k) * step);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binomial calibration: is `failures` consistent with Binomial(n, level) at
// two-sided confidence `conf`?  Used by the null-calibration suite.
// ---------------------------------------------------------------------------
inline bool binomial_consistent(std::size_t failures, std::size_t n, double level,
                                double conf = 0.998) {
    // exact binomial CDF by summation
    std::vector<double> pmf(n + 1);
    double logp = std::log(level), logq = std::log1p(-level);
    for (std::size_t k = 0; k <= n; ++k) {
        const double lg = std::lgamma(static_cast<double>(n) + 1.0) -
                          std::lgamma(static_cast<double>(k) + 1.0) -
                          std::lgamma(static_cast<double>(n - k) + 1.0);
        pmf[k] = std::exp(lg + static_cast<double>(k) * logp +
                          static_cast<double>(n - k) * logq);
    }
    const double tail = 0.5 * (1.0 - conf);
    double acc = 0.0;
    std::size_t lo = 0, hi = n;
    for (std::size_t k = 0; k <= n; ++k) {
        acc += pmf[k];
        if (acc >= tail) {
            lo = k;
            break;
        }
    }
    acc = 0.0;
    for (std::size_t k = n + 1; k-- > 0;) {
        acc += pmf[k];
        if (acc >= tail) {
            hi = k;
            break;
        }
    }
    return failures >= lo && failures <= hi;
}

}  // namespace disklab
