// disklab/mating.hpp — Brownian half-plane and cone excursions, the affine
// cone transform, ancestor-free times, local time / inverse local time and
// signed jump ledgers, growth-fragmentation cell masses, and the Poisson
// point process exponent estimator.
//
// Coordinates: Z = (L,R) is the correlated pair (correlation -cos(pi g^2/4),
// per-coordinate variance 1/(eps sin(pi g^2/4)), g = 2-eps); X = (A,B) with
//   A = a_eps (L + R),  B = R - L,
//   a_eps^2 = (1 + cos(pi g^2/4)) / (1 - cos(pi g^2/4)),
// is uncorrelated with per-coordinate variance 2(1+cos)/(eps sin) = pi + o(eps).
// At eps = 0 the limit object is an uncorrelated Brownian excursion in the
// right half-plane from (0,1) to (0,0) with variance pi per unit time.
//
// Cone excursions are detected coordinatewise in the (L,R) frame (where the
// cone is the first quadrant): J = [t1,t2] qualifies when (L,R) dominates its
// value at t2 at every grid point of J and the L coordinates at t1 and t2
// match within end_tol (the upper boundary ray, start (a_eps b, b), b > 0).
//
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "disklab/common.hpp"
#include "disklab/stats.hpp"

namespace disklab {

inline double cone_angle_phi(double eps) { return 0.25 * pi * sq(2.0 - eps); }

inline double a_eps_of(double eps) {
    if (eps == 0.0) return 0.0;
    const double c = std::cos(cone_angle_phi(eps));
    return std::sqrt((1.0 + c) / (1.0 - c));
}

// Per-coordinate variance of X = (A,B) per unit time.
inline double x_variance_of(double eps) {
    if (eps == 0.0) return pi;
    const double phi = cone_angle_phi(eps);
    return 2.0 * (1.0 + std::cos(phi)) / (eps * std::sin(phi));
}

struct PlanarPath {
    std::vector<double> x, y;  // uniform grid, t_k = k * step
    double step = 0.0;
    double epsilon = 0.0;
    double variance = pi;  // per-coordinate per-unit-time variance used

    double duration() const { return step * static_cast<double>(x.size() - 1); }
    std::size_t size() const { return x.size(); }
};

// ---------------------------------------------------------------------------
// sample_half_plane_excursion (eps = 0): duration T from the density
// proportional to t^{-3/2} p_t(1 -> 0) (so 1/T ~ Exp(mean 2 pi)), then
// A = Brownian excursion of length T (Vervaat transform of a bridge) and
// B = independent bridge 1 -> 0, both with variance pi per unit time.
// ---------------------------------------------------------------------------
struct HalfPlaneConfig {
    double step = 1e-4;
    std::size_t min_points = 64;  // refine the grid for very short durations
};

namespace detail {

// Brownian bridge 0 -> `target` of length T (variance `var` per unit time) on
// n+1 grid points.
inline std::vector<double> brownian_bridge(double target, double T, std::size_t n,
                                           double var, Rng& rng) {
    std::vector<double> w(n + 1, 0.0);
    const double vol = std::sqrt(var * T / static_cast<double>(n));
    for (std::size_t k = 1; k <= n; ++k) w[k] = w[k - 1] + vol * rng.normal();
    const double wn = w[n];
    for (std::size_t k = 0; k <= n; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(n);
        w[k] += frac * (target - wn);
    }
    return w;
}

// Vervaat transform: cyclically shift a 0->0 bridge at its argmin to get a
// nonnegative excursion.
inline std::vector<double> vervaat(const std::vector<double>& bridge) {
    const std::size_t n = bridge.size() - 1;
    std::size_t imin = 0;
    for (std::size_t k = 1; k <= n; ++k)
        if (bridge[k] < bridge[imin]) imin = k;
    std::vector<double> exc(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        exc[k] = bridge[(k + imin) % n] - bridge[imin];
    exc[n] = 0.0;
    return exc;
}

}  // namespace detail

inline PlanarPath sample_half_plane_excursion(std::uint64_t seed,
                                              const HalfPlaneConfig& cfg = {}) {
    Rng rng(seed);
    // f_T(t) ~ t^{-3/2} * t^{-1/2} e^{-1/(2 pi t)} = t^{-2} e^{-1/(2 pi t)};
    // substituting u = 1/t gives u ~ Exp(rate 1/(2 pi)).
    const double T = 1.0 / rng.exponential(1.0 / two_pi);
    std::size_t n = std::max(cfg.min_points,
                             static_cast<std::size_t>(std::ceil(T / cfg.step)));

    PlanarPath path;
    path.epsilon = 0.0;
    path.variance = pi;
    path.step = T / static_cast<double>(n);
    path.x = detail::vervaat(detail::brownian_bridge(0.0, T, n, pi, rng));
    path.y = detail::brownian_bridge(-1.0, T, n, pi, rng);
    for (auto& v : path.y) v += 1.0;  // bridge 1 -> 0
    return path;
}

// Oracle duration sampler: the paper's strip conditioning (planar BM from
// (0,1) until first exit of {x > -delta}, conditioned to exit within distance
// delta of the axis).  The exit-position conditioning is integrated
// analytically: duration = first-passage time of the x coordinate to -delta
// (T = delta^2/(pi Z^2), Z standard normal), accepted with probability
// proportional to the N(1, pi T) density at 0.  Naive rejection at delta=0.01
// would accept ~6e-5 of trials; this is the same conditional law.
inline double sample_half_plane_duration_strip_oracle(double delta, Rng& rng) {
    const double wmax = std::sqrt(pi) * std::exp(-0.5);  // max of t^{-1/2} e^{-1/(2 pi t)}
    for (;;) {
        double z = rng.normal();
        if (z == 0.0) continue;
        const double T = sq(delta) / (pi * sq(z));
        const double w = std::exp(-1.0 / (two_pi * T)) / std::sqrt(T);
        if (rng.uniform() < w / wmax) return T;
    }
}

// ---------------------------------------------------------------------------
// Correlated (L,R) Brownian window and the cone transform.
// ---------------------------------------------------------------------------
inline PlanarPath sample_lr_window(double eps, double t_window, double step,
                                   std::uint64_t seed) {
    if (eps <= 0.0) throw ConfigError("sample_lr_window needs eps > 0");
    const double phi = cone_angle_phi(eps);
    const double c2 = 1.0 / (eps * std::sin(phi));  // per-coordinate variance
    const double rho = -std::cos(phi);
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(std::ceil(t_window / step));
    PlanarPath z;
    z.epsilon = eps;
    z.step = step;
    z.variance = c2;
    z.x.assign(n + 1, 0.0);
    z.y.assign(n + 1, 0.0);
    const double vol = std::sqrt(c2 * step);
    const double cross = std::sqrt(1.0 - sq(rho));
    for (std::size_t k = 1; k <= n; ++k) {
        const double g1 = rng.normal(), g2 = rng.normal();
        z.x[k] = z.x[k - 1] + vol * g1;                         // L
        z.y[k] = z.y[k - 1] + vol * (rho * g1 + cross * g2);    // R
    }
    return z;
}

// Pointwise affine transform Z = (L,R) -> X = (A,B).
inline PlanarPath cone_transform(const PlanarPath& z, double eps) {
    const double a = a_eps_of(eps);
    PlanarPath x;
    x.step = z.step;
    x.epsilon = eps;
    x.variance = x_variance_of(eps);
    x.x.resize(z.size());
    x.y.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        x.x[k] = a * (z.x[k] + z.y[k]);
        x.y[k] = z.y[k] - z.x[k];
    }
    return x;
}

inline PlanarPath inverse_cone_transform(const PlanarPath& x, double eps) {
    const double a = a_eps_of(eps);
    if (a == 0.0) throw ConfigError("inverse cone transform undefined at eps = 0");
    PlanarPath z;
    z.step = x.step;
    z.epsilon = eps;
    z.x.resize(x.size());
    z.y.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        z.x[k] = 0.5 * (x.x[k] / a - x.y[k]);
        z.y[k] = 0.5 * (x.x[k] / a + x.y[k]);
    }
    return z;
}

// ---------------------------------------------------------------------------
// Cone-excursion detection and extraction (eps > 0).
// ---------------------------------------------------------------------------
struct ConeExcursionConfig {
    double window = 50.0;
    double step = 1e-3;
    double min_duration = 0.5;
    double end_tol = 1e-3;       // terminal-coordinate match tolerance (L frame)
    double b_lo = 1.0, b_hi = 2.0;  // start-height conditioning band
    int max_retries = 400;
};

namespace detail {

struct ConeCandidate {
    std::size_t t1 = 0, t2 = 0;
    double b = 0.0;  // start height R_{t1} - R_{t2} = B displacement
};

// Find the qualifying cone excursion with the largest left endpoint t1 in the
// (L,R) window: dominance at all grid points, L-terminal match within end_tol,
// duration >= min_duration.
inline std::optional<ConeCandidate> most_recent_cone_excursion(const PlanarPath& lr,
                                                               double min_duration,
                                                               double end_tol) {
    const auto n = lr.size();
    const auto min_len = static_cast<std::size_t>(std::ceil(min_duration / lr.step));
    std::optional<ConeCandidate> best;
    for (std::size_t t2 = n; t2-- > min_len;) {
        const double l2 = lr.x[t2], r2 = lr.y[t2];
        if (best && t2 < best->t1 + min_len) break;  // cannot beat best anymore
        for (std::size_t u = t2; u-- > 0;) {
            if (lr.x[u] < l2 || lr.y[u] < r2) break;  // dominance violated
            if (t2 - u >= min_len && std::abs(lr.x[u] - l2) <= end_tol) {
                if (!best || u > best->t1) best = ConeCandidate{u, t2, lr.y[u] - r2};
                break;  // longer intervals only move t1 left
            }
        }
    }
    return best;
}

}  // namespace detail

// sample_cone_excursion: extract the most recent qualifying excursion from a
// correlated (L,R) window, condition on start height b in [b_lo, b_hi], and
// Brownian-rescale to start exactly (a_eps, 1).
inline PlanarPath sample_cone_excursion(double eps, double min_duration, std::uint64_t seed,
                                        ConeExcursionConfig cfg = {}) {
    if (eps <= 0.0 || eps >= 2.0 - std::sqrt(2.0))
        throw ConfigError("eps must lie in (0, 2 - sqrt(2))");
    cfg.min_duration = min_duration;
    const double a = a_eps_of(eps);

    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        const PlanarPath lr = sample_lr_window(eps, cfg.window, cfg.step,
                                               mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        const auto cand = detail::most_recent_cone_excursion(lr, cfg.min_duration, cfg.end_tol);
        if (!cand || cand->b < cfg.b_lo || cand->b > cfg.b_hi) continue;

        const double b = cand->b;
        PlanarPath out;
        out.epsilon = eps;
        out.variance = x_variance_of(eps);
        out.step = lr.step / sq(b);  // Brownian rescale: space 1/b, time 1/b^2
        const std::size_t m = cand->t2 - cand->t1;
        out.x.resize(m + 1);
        out.y.resize(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double L = (lr.x[cand->t1 + k] - lr.x[cand->t2]) / b;
            const double R = (lr.y[cand->t1 + k] - lr.y[cand->t2]) / b;
            out.x[k] = a * (L + R);
            out.y[k] = R - L;
        }
        // anchor the start exactly at (a_eps, 1): taper the O(end_tol) mismatch
        const double dx = a - out.x[0], dy = 1.0 - out.y[0];
        for (std::size_t k = 0; k <= m; ++k) {
            const double w = 1.0 - static_cast<double>(k) / static_cast<double>(m);
            out.x[k] += dx * w;
            out.y[k] += dy * w;
        }
        return out;
    }
    throw WindowExhausted("no qualifying cone excursion with b in band");
}

// ---------------------------------------------------------------------------
// Ancestor-free times.
// ---------------------------------------------------------------------------
struct AncestorFreeSet {
    double reference_time = 0.0;
    double step = 0.0;
    std::vector<bool> free_mask;  // per grid index in [0, t_index]
    std::vector<std::pair<double, double>> intervals;  // maximal free runs (times)
    struct Gap {
        std::size_t begin = 0, end = 0;  // grid indices of bounding free times
        double displacement = 0.0;       // y(end) - y(begin)
    };
    std::vector<Gap> gaps;

    double lebesgue_free() const {
        std::size_t c = 0;
        for (std::size_t i = 1; i < free_mask.size(); ++i)
            if (free_mask[i] && free_mask[i - 1]) ++c;
        return static_cast<double>(c) * step;
    }
};

namespace detail {

inline void build_gaps(AncestorFreeSet& s, const PlanarPath& x) {
    const std::size_t m = s.free_mask.size();
    for (std::size_t b = 0; b < m;) {
        if (!s.free_mask[b]) {
            ++b;
            continue;
        }
        std::size_t e = b;
        while (e + 1 < m && s.free_mask[e + 1]) ++e;
        s.intervals.emplace_back(static_cast<double>(b) * s.step,
                                 static_cast<double>(e) * s.step);
        b = e + 1;
    }
    std::size_t i = 0;
    while (i < m && !s.free_mask[i]) ++i;  // leading covered stretch, if any
    if (i > 0 && i < m) {
        s.gaps.push_back({0, i, x.y[i] - x.y[0]});
    }
    while (i < m) {
        if (s.free_mask[i]) {
            ++i;
            continue;
        }
        const std::size_t begin = i - 1;  // last free index
        while (i < m && !s.free_mask[i]) ++i;
        const std::size_t end = std::min(i, m - 1);
        s.gaps.push_back({begin, end, x.y[end] - x.y[begin]});
    }
}

// Coverage by cone excursions within [0, t_idx] of the (L,R) frame: for each
// right endpoint t2, walk left while coordinatewise dominance holds; the
// smallest matching t1 covers [t1, t2].
inline std::vector<bool> cone_cover_mask(const PlanarPath& lr, std::size_t t_idx,
                                         double end_tol) {
    std::vector<bool> covered(t_idx + 1, false);
    // diff array for interval marking
    std::vector<int> diff(t_idx + 2, 0);
    for (std::size_t t2 = 1; t2 <= t_idx; ++t2) {
        const double l2 = lr.x[t2], r2 = lr.y[t2];
        std::size_t best_t1 = t2;  // smallest matching t1 found
        bool found = false;
        for (std::size_t u = t2; u-- > 0;) {
            if (lr.x[u] < l2 || lr.y[u] < r2) break;
            if (std::abs(lr.x[u] - l2) <= end_tol || std::abs(lr.y[u] - r2) <= end_tol) {
                best_t1 = u;
                found = true;
            }
        }
        if (found) {
            diff[best_t1] += 1;
            diff[t2 + 1] -= 1;
        }
    }
    int acc = 0;
    for (std::size_t i = 0; i <= t_idx; ++i) {
        acc += diff[i];
        covered[i] = acc > 0;
    }
    return covered;
}

}  // namespace detail

inline AncestorFreeSet ancestor_free_times(const PlanarPath& x, double t_ref,
                                           double end_tol = 1e-9) {
    if (t_ref > x.duration() + 1e-12) throw ConfigError("t_ref beyond path duration");
    const auto t_idx = static_cast<std::size_t>(std::llround(t_ref / x.step));

    AncestorFreeSet s;
    s.reference_time = t_ref;
    s.step = x.step;
    s.free_mask.assign(t_idx + 1, false);

    if (x.epsilon == 0.0) {
        // backward running infima of the first coordinate
        double run_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = t_idx + 1; i-- > 0;) {
            if (x.x[i] < run_min) {
                run_min = x.x[i];
                s.free_mask[i] = true;
            }
        }
    } else {
        const PlanarPath lr = inverse_cone_transform(x, x.epsilon);
        const auto covered = detail::cone_cover_mask(lr, t_idx, end_tol);
        for (std::size_t i = 0; i <= t_idx; ++i) s.free_mask[i] = !covered[i];
    }
    detail::build_gaps(s, x);
    return s;
}

// Literal O(n^2) reference scan (acceptance oracle): checks every candidate
// interval with running minima, no early exits beyond the dominance
// definition itself.
inline std::vector<bool> ancestor_free_oracle_mask(const PlanarPath& x, double t_ref,
                                                   double end_tol = 1e-9) {
    const auto t_idx = static_cast<std::size_t>(std::llround(t_ref / x.step));
    std::vector<bool> covered(t_idx + 1, false);
    if (x.epsilon == 0.0) {
        for (std::size_t s = 0; s <= t_idx; ++s)
            for (std::size_t u = s + 1; u <= t_idx; ++u)
                if (x.x[u] <= x.x[s]) {
                    covered[s] = true;
                    break;
                }
        std::vector<bool> free(t_idx + 1);
        for (std::size_t i = 0; i <= t_idx; ++i) free[i] = !covered[i];
        return free;
    }
    const PlanarPath lr = inverse_cone_transform(x, x.epsilon);
    for (std::size_t t2 = 1; t2 <= t_idx; ++t2) {
        double min_l = lr.x[t2], min_r = lr.y[t2];
        for (std::size_t t1 = t2; t1-- > 0;) {
            min_l = std::min(min_l, lr.x[t1]);
            min_r = std::min(min_r, lr.y[t1]);
            if (min_l < lr.x[t2] || min_r < lr.y[t2]) break;  // dominance fails
            if (std::abs(lr.x[t1] - lr.x[t2]) <= end_tol ||
                std::abs(lr.y[t1] - lr.y[t2]) <= end_tol)
                for (std::size_t u = t1; u <= t2; ++u) covered[u] = true;
        }
    }
    std::vector<bool> free(t_idx + 1);
    for (std::size_t i = 0; i <= t_idx; ++i) free[i] = !covered[i];
    return free;
}

// ---------------------------------------------------------------------------
// Local time and the signed jump ledger.
// ---------------------------------------------------------------------------
struct JumpLedger {
    struct Jump {
        double local_time = 0.0;
        double magnitude = 0.0;
        int sign = 0;
        double duration = 0.0;
    };
    std::vector<Jump> jumps;                 // ordered by time (== local time order)
    std::vector<std::pair<double, double>> local_time_profile;  // (path time, ell)
    std::vector<double> band_delta;          // dyadic band upper edges
    std::vector<std::size_t> band_count;     // N_delta per band
    double finest_stable_delta = 0.0;
    double total_local_time = 0.0;           // c * delta* * N_{delta*}
    double c = 1.0;
    std::size_t dropped_ties = 0;
    double dropped_duration = 0.0;
    double total_gap_duration = 0.0;
};

struct LedgerConfig {
    double c = 1.0;
    double tie_tol = 1e-12;         // |displacement| below this is a dropped tie
    std::size_t min_band_count = 10;  // a band is "stable" with at least this many gaps
    int n_bands = 24;
};

inline JumpLedger local_time_and_jumps(const AncestorFreeSet& s, const PlanarPath& x,
                                       const LedgerConfig& cfg = {}) {
    JumpLedger led;
    led.c = cfg.c;

    double max_mag = 0.0;
    for (const auto& g : s.gaps) max_mag = std::max(max_mag, std::abs(g.displacement));
    if (max_mag <= 0.0 || s.gaps.size() < 8)
        throw ResolutionError("too few complementary excursions for a ledger");

    // dyadic bands: (delta/2, delta], delta = top, top/2, ...
    const double top = std::pow(2.0, std::ceil(std::log2(max_mag)));
    led.band_delta.resize(static_cast<std::size_t>(cfg.n_bands));
    led.band_count.assign(static_cast<std::size_t>(cfg.n_bands), 0);
    for (int j = 0; j < cfg.n_bands; ++j)
        led.band_delta[static_cast<std::size_t>(j)] = top * std::pow(2.0, -j);

    for (const auto& g : s.gaps) {
        const double mag = std::abs(g.displacement);
        if (mag < cfg.tie_tol) continue;
        const int j = std::clamp(static_cast<int>(std::ceil(std::log2(top / mag))), 0,
                                 cfg.n_bands - 1);
        led.band_count[static_cast<std::size_t>(j)]++;
    }
    // finest stable band: smallest delta with enough mass; require >= 3 stable bands
    std::size_t star = 0, n_stable = 0;
    for (std::size_t j = 0; j < led.band_delta.size(); ++j)
        if (led.band_count[j] >= cfg.min_band_count) {
            star = j;
            ++n_stable;
        }
    if (n_stable < 3)
        throw ResolutionError("fewer than 3 resolvable dyadic bands");
    led.finest_stable_delta = led.band_delta[star];

    // running local time: c * delta* * (number of band-star gaps so far)
    std::size_t n_star_seen = 0;
    for (const auto& g : s.gaps) {
        const double mag = std::abs(g.displacement);
        const double dur = static_cast<double>(g.end - g.begin) * s.step;
        led.total_gap_duration += dur;
        if (mag < cfg.tie_tol) {
            led.dropped_ties++;
            led.dropped_duration += dur;
            continue;
        }
        JumpLedger::Jump jmp;
        jmp.local_time = cfg.c * led.finest_stable_delta * static_cast<double>(n_star_seen);
        jmp.magnitude = mag;
        jmp.sign = g.displacement > 0.0 ? 1 : -1;
        jmp.duration = dur;
        led.jumps.push_back(jmp);
        if (mag > 0.5 * led.finest_stable_delta && mag <= led.finest_stable_delta)
            ++n_star_seen;
        led.local_time_profile.emplace_back(static_cast<double>(g.end) * s.step,
                                            cfg.c * led.finest_stable_delta *
                                                static_cast<double>(n_star_seen));
    }
    led.total_local_time =
        cfg.c * led.finest_stable_delta * static_cast<double>(led.band_count[star]);
    return led;
}

// ---------------------------------------------------------------------------
// Growth-fragmentation cell masses: signed vertical displacements of the
// excursions of X strictly to the right of the line x = a.  Sign convention:
// displacement = y(crossing out) - y(crossing in).
// ---------------------------------------------------------------------------
struct GfCell {
    double start = 0.0, end = 0.0;  // times of the bounding crossings
    double mass = 0.0;              // signed displacement
};

inline std::vector<GfCell> gf_cell_masses(const PlanarPath& x, double a) {
    std::vector<GfCell> cells;
    const std::size_t n = x.size();
    std::size_t i = 0;
    while (i < n) {
        if (x.x[i] <= a) {
            ++i;
            continue;
        }
        const std::size_t in = (i == 0) ? 0 : i - 1;  // last index at or below a
        while (i < n && x.x[i] > a) ++i;
        const std::size_t out = std::min(i, n - 1);
        cells.push_back({static_cast<double>(in) * x.step,
                         static_cast<double>(out) * x.step, x.y[out] - x.y[in]});
    }
    return cells;
}

// ---------------------------------------------------------------------------
// PPP exponent estimator: pool complementary-gap durations across paths and
// fit the tail exponent; the intensity dx * y^{-alpha} dy in duration y gives
// tail exponent alpha - 1, so alpha_hat = 1 + fitted tail exponent.
// ---------------------------------------------------------------------------
struct PppConfig {
    double window = 8.0;     // eps > 0 window length
    double step = 1e-3;
    double end_tol = 1e-9;
    double decades = 2.0;
};

inline double estimate_ppp_exponent(double eps, std::size_t n_paths, std::uint64_t seed,
                                    const PppConfig& cfg = {}) {
    if (n_paths < 1000) throw SampleTooSmall("estimate_ppp_exponent needs >= 1000 paths");
    std::vector<double> durations;
    for (std::size_t p = 0; p < n_paths; ++p) {
        PlanarPath x;
        if (eps == 0.0) {
            // uncorrelated (A,B) Brownian window of variance pi: the backward
            // infima relative to the window end carry the same gap-length PPP
            Rng rng(mix_seed(seed, p));
            const auto n = static_cast<std::size_t>(std::ceil(cfg.window / cfg.step));
            x.epsilon = 0.0;
            x.variance = pi;
            x.step = cfg.step;
            x.x.assign(n + 1, 0.0);
            x.y.assign(n + 1, 0.0);
            const double vol = std::sqrt(pi * cfg.step);
            for (std::size_t k = 1; k <= n; ++k) {
                x.x[k] = x.x[k - 1] + vol * rng.normal();
                x.y[k] = x.y[k - 1] + vol * rng.normal();
            }
        } else {
            const PlanarPath lr = sample_lr_window(eps, cfg.window, cfg.step, mix_seed(seed, p));
            x = cone_transform(lr, eps);
        }
        const auto s = ancestor_free_times(x, x.duration(), cfg.end_tol);
        for (const auto& g : s.gaps)
            durations.push_back(static_cast<double>(g.end - g.begin) * x.step);
    }
    if (durations.size() < 10000)
        throw SampleTooSmall("too few pooled excursions for the exponent fit");
    const TailFit fit = tail_exponent_fit(durations, cfg.decades, 0.5, 0.995, 0, seed);
    return 1.0 + fit.exponent;
}

}  // namespace disklab
