// disklab/radial_sle.hpp — theta-process sampling, driving functions, the
// excursion decomposition at dyadic thresholds, Bessel excursion sampling
// (Pitman–Yor recipe), and the uniform-root CLE_4 driving.
//
// The angle process solves
//     d theta = sqrt(kappa') dB + ((kappa'-4)/2) * cot(theta/2) dt,
// instantaneously reflecting at {0, 2pi}; the associated driving function is
//     W_t = root * exp(i * (theta_t - int_0^t cot(theta_s/2) ds)).
// Near the lower barrier the process compares to sqrt(kappa') times a Bessel
// process of dimension delta(kappa') = 3 - 8/kappa'.  (The source derivation
// prints the dimension once with the terms transposed; the drift-matching
// calculation confirms 3 - 8/kappa', which we use throughout.)
//
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "disklab/common.hpp"
#include "disklab/loewner.hpp"

namespace disklab {

inline double delta_of_kappa_prime(double kappa_prime) { return 3.0 - 8.0 / kappa_prime; }
inline double kappa_prime_of_epsilon(double eps) { return 16.0 / sq(2.0 - eps); }

struct ThetaConfig {
    double reflect_tol = 1e-3;   // barrier snap tolerance; also caps |cot| at 1/reflect_tol
    double barrier_guard = 1.0;  // StiffnessError when |capped drift| * step exceeds this
};

struct ThetaPath {
    double kappa_prime = 4.0;
    double x0 = 0.0;
    double step = 1e-4;
    double reflect_tol = 1e-3;
    std::vector<double> values;    // theta at grid times k*step
    std::optional<double> tau0;    // first grid time with value >= 2pi - reflect_tol

    double duration() const { return step * static_cast<double>(values.size() - 1); }
};

// Capped cot(theta/2): the SDE only holds away from the barriers, and the
// excursion bookkeeping owns the barrier behavior.
inline double capped_cot_half(double theta, double reflect_tol) {
    const double cap = 1.0 / reflect_tol;
    if (theta < reflect_tol) return cap;
    if (theta > two_pi - reflect_tol) return -cap;  // |cot| is tiny here anyway
    return std::clamp(1.0 / std::tan(0.5 * theta), -cap, cap);
}

// ---------------------------------------------------------------------------
// simulate_theta: Euler–Maruyama with symmetrized reflection at both barriers.
// If stop_at_top is set, the path ends at the first grid time theta reaches
// 2pi - reflect_tol (tau0); otherwise it runs to t_max (recording tau0 if hit).
// ---------------------------------------------------------------------------
inline ThetaPath simulate_theta(double kappa_prime, double x0, double t_max, double step,
                                std::uint64_t seed, const ThetaConfig& cfg = {},
                                bool stop_at_top = false) {
    if (kappa_prime < 4.0 || kappa_prime >= 8.0)
        throw ConfigError("kappa_prime must lie in [4,8)");
    if (step <= 0.0) throw ConfigError("step must be positive");
    const double drift_coef = 0.5 * (kappa_prime - 4.0);
    if (drift_coef / cfg.reflect_tol * step > cfg.barrier_guard)
        throw StiffnessError("step too large for the capped cot drift near the barriers");

    ThetaPath path;
    path.kappa_prime = kappa_prime;
    path.x0 = x0;
    path.step = step;
    path.reflect_tol = cfg.reflect_tol;

    Rng rng(seed);
    const double vol = std::sqrt(kappa_prime * step);
    const auto n = static_cast<std::size_t>(std::ceil(t_max / step - 1e-12));
    path.values.reserve(n + 1);
    double th = x0;
    path.values.push_back(th);
    if (th >= two_pi - cfg.reflect_tol) path.tau0 = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        if (path.tau0 && stop_at_top) break;
        th += drift_coef * capped_cot_half(th, cfg.reflect_tol) * step + vol * rng.normal();
        if (th < 0.0) th = -th;                       // symmetrized reflection
        if (th > two_pi) th = 2.0 * two_pi - th;
        path.values.push_back(th);
        if (!path.tau0 && th >= two_pi - cfg.reflect_tol)
            path.tau0 = static_cast<double>(k + 1) * step;
    }
    return path;
}

// Run until the first hit of 2pi, extending the window geometrically.
inline ThetaPath simulate_theta_until_top(double kappa_prime, double x0, double step,
                                          std::uint64_t seed, const ThetaConfig& cfg = {},
                                          double initial_window = 64.0, int max_doublings = 12) {
    double window = initial_window;
    for (int attempt = 0; attempt <= max_doublings; ++attempt, window *= 2.0) {
        ThetaPath p = simulate_theta(kappa_prime, x0, window, step, seed, cfg, true);
        if (p.tau0) return p;
    }
    throw WindowExhausted("theta never reached 2pi within the extended window");
}

// ---------------------------------------------------------------------------
// driving_from_theta: W_t = root * exp(i(theta_t - int_0^t cot(theta/2))),
// phase integral by the trapezoid rule on the path grid.
// ---------------------------------------------------------------------------
inline DrivingProcess driving_from_theta(const ThetaPath& path, double root_angle,
                                         bool allow_barrier_crossings = false) {
    DrivingProcess drv;
    drv.step = path.step;
    drv.duration = path.duration();
    drv.angles.reserve(path.values.size());

    double integral = 0.0;
    double prev_cot = capped_cot_half(path.values.front(), path.reflect_tol);
    drv.angles.push_back(wrap_angle(root_angle + path.values.front()));
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        const double th = path.values[k];
        if (!allow_barrier_crossings && k + 1 < path.values.size() && th < path.reflect_tol)
            throw CotDivergence("theta returns to 0 inside the integration range; "
                                "split at excursions first");
        const double cot = capped_cot_half(th, path.reflect_tol);
        integral += 0.5 * (prev_cot + cot) * path.step;
        prev_cot = cot;
        drv.angles.push_back(wrap_angle(root_angle + th - integral));
    }
    return drv;
}

// ---------------------------------------------------------------------------
// Excursion decomposition at threshold 2^-n.
// ---------------------------------------------------------------------------
struct ExcursionRecord {
    double start_time = 0.0;
    double end_time = 0.0;
    std::vector<double> values;
    double max_height = 0.0;
    bool reached_top = false;

    double duration() const { return end_time - start_time; }
};

struct ExcursionDecomposition {
    int threshold_exponent = 0;
    std::vector<ExcursionRecord> records;
    std::size_t stop_index = 0;      // index Lambda of the record reaching 2pi
    DrivingProcess cut_driving;      // concatenated driving over retained excursions
    double tau_n = 0.0;              // total retained duration
};

namespace detail {

// Locate grid excursions away from the lower barrier: an excursion starts at
// the last grid time with value < reflect_tol before the path exceeds the
// threshold and ends at the first later grid time with value < reflect_tol.
struct RawExcursion {
    std::size_t begin = 0, end = 0;  // grid indices, inclusive endpoints
    double max_height = 0.0;
    bool reached_top = false;
};

inline std::vector<RawExcursion> find_excursions(const ThetaPath& path, double threshold) {
    std::vector<RawExcursion> out;
    const double tol = path.reflect_tol;
    const std::size_t n = path.values.size();
    std::size_t last_zero = 0;
    std::size_t i = 0;
    while (i < n) {
        if (path.values[i] < tol) {
            last_zero = i;
            ++i;
            continue;
        }
        // inside an excursion that started at last_zero
        RawExcursion ex;
        ex.begin = last_zero;
        double mx = 0.0;
        bool top = false;
        std::size_t stop = i;
        while (i < n && path.values[i] >= tol) {
            mx = std::max(mx, path.values[i]);
            if (path.values[i] >= two_pi - tol) {
                top = true;
                stop = i;
                break;
            }
            ++i;
        }
        ex.end = top ? stop : std::min(i, n - 1);
        ex.max_height = mx;
        ex.reached_top = top;
        if (mx >= threshold || top) out.push_back(ex);
        if (top) break;
        last_zero = ex.end;
    }
    return out;
}

// Accumulated driving phase theta_t - int_0^t cot(theta/2) over the whole
// path, capped across barrier visits (trapezoid rule).
inline std::vector<double> accumulated_phase(const ThetaPath& path) {
    std::vector<double> phase(path.values.size());
    double integral = 0.0;
    double prev_cot = capped_cot_half(path.values.front(), path.reflect_tol);
    phase[0] = path.values.front();
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        const double cot = capped_cot_half(path.values[k], path.reflect_tol);
        integral += 0.5 * (prev_cot + cot) * path.step;
        prev_cot = cot;
        phase[k] = path.values[k] - integral;
    }
    return phase;
}

}  // namespace detail

inline ExcursionDecomposition excursion_decompose(const ThetaPath& path, int n,
                                                  const std::vector<double>* roots = nullptr) {
    if (!path.tau0)
        throw ConfigError("excursion_decompose requires a path run until its first hit of 2pi");
    const double threshold = std::pow(2.0, -static_cast<double>(n));
    if (threshold < path.step)
        throw ResolutionError("threshold 2^-n below the grid resolution");

    ExcursionDecomposition dec;
    dec.threshold_exponent = n;
    const auto raw = detail::find_excursions(path, threshold);
    if (raw.empty()) throw ResolutionError("no excursion reached the threshold before tau0");

    const auto phase = detail::accumulated_phase(path);

    dec.cut_driving.step = path.step;
    dec.cut_driving.duration = 0.0;
    dec.cut_driving.angles.clear();

    for (std::size_t idx = 0; idx < raw.size(); ++idx) {
        const auto& ex = raw[idx];
        ExcursionRecord rec;
        rec.start_time = static_cast<double>(ex.begin) * path.step;
        rec.end_time = static_cast<double>(ex.end) * path.step;
        rec.values.assign(path.values.begin() + static_cast<std::ptrdiff_t>(ex.begin),
                          path.values.begin() + static_cast<std::ptrdiff_t>(ex.end) + 1);
        rec.max_height = ex.max_height;
        rec.reached_top = ex.reached_top;
        if (ex.reached_top) dec.stop_index = idx;
        dec.records.push_back(std::move(rec));

        // Driving over this block: original root (accumulated phase at S_i) or
        // a caller-supplied root angle, advanced by the in-block phase.
        const double base = (roots != nullptr && idx < roots->size())
                                ? (*roots)[idx] - phase[ex.begin]
                                : 0.0;
        DrivingProcess block;
        block.step = path.step;
        block.duration = static_cast<double>(ex.end - ex.begin) * path.step;
        block.angles.reserve(ex.end - ex.begin + 1);
        for (std::size_t k = ex.begin; k <= ex.end; ++k)
            block.angles.push_back(wrap_angle(base + phase[k]));
        dec.cut_driving.append(block);
        dec.tau_n += block.duration;
    }
    return dec;
}

// ---------------------------------------------------------------------------
// sample_bessel_excursion: Pitman–Yor recipe.
//   * max height X ~ density proportional to x^(delta-3) on [min_height, inf)
//   * Bessel(4-delta) ascent from 0 run until it hits X
//   * if X >= top: stop at top with reached_top
//   * else: concatenate with the time reversal of an independent Bessel(4-delta)
//     ascent from 0 to X (the descent)
// Valid for delta in [1,2): delta(kappa') for kappa' in [4,8).  The height
// density is non-normalizable at delta = 2.
// ---------------------------------------------------------------------------
struct BesselExcursionConfig {
    double dt_rel = 1e-4;   // time step = dt_rel * (target height)^2
    double entrance = 1e-4; // relative entrance level for the ascent
};

namespace detail {

// Bessel(dim) ascent from ~0 run until first passage of `target`; values
// recorded at uniform step h.
inline std::vector<double> bessel_ascent(double dim, double target, double h, Rng& rng,
                                         double entrance_rel) {
    std::vector<double> vals;
    double r = entrance_rel * target;
    const double vol = std::sqrt(h);
    const double dc = 0.5 * (dim - 1.0);
    vals.push_back(0.0);  // idealized start at the barrier
    while (r < target) {
        r += dc / std::max(r, 1e-12 * target) * h + vol * rng.normal();
        if (r < 0.0) r = -r;  // dim >= 2 a.s. avoids 0; reflect the discretization
        vals.push_back(std::min(r, target));
    }
    vals.back() = target;
    return vals;
}

}  // namespace detail

inline ExcursionRecord sample_bessel_excursion(double delta, double min_height, double top,
                                               std::uint64_t seed,
                                               const BesselExcursionConfig& cfg = {}) {
    if (delta < 1.0 || delta >= 2.0)
        throw BadDimension("delta must lie in [1,2) for a normalizable height density");
    if (!(0.0 < min_height && min_height < top))
        throw ConfigError("need 0 < min_height < top");

    Rng rng(seed);
    // Inverse-CDF sample of X: P(X > x) = (x/min_height)^(delta-2).
    const double X = min_height * std::pow(rng.uniform(), 1.0 / (delta - 2.0));
    const double dim = 4.0 - delta;
    const bool reached_top = (X >= top);
    const double target = reached_top ? top : X;
    const double h = cfg.dt_rel * sq(target);

    ExcursionRecord rec;
    rec.values = detail::bessel_ascent(dim, target, h, rng, cfg.entrance);
    if (!reached_top) {
        auto descent = detail::bessel_ascent(dim, target, h, rng, cfg.entrance);
        // time-reverse the independent ascent and append (skip duplicated peak)
        for (auto it = descent.rbegin() + 1; it != descent.rend(); ++it)
            rec.values.push_back(*it);
    }
    rec.reached_top = reached_top;
    rec.max_height = target;
    rec.start_time = 0.0;
    rec.end_time = h * static_cast<double>(rec.values.size() - 1);
    return rec;
}

// ---------------------------------------------------------------------------
// uniform_cle4_driving: kappa' = 4 decomposition with i.i.d. uniform roots.
// ---------------------------------------------------------------------------
struct UniformCle4Result {
    ExcursionDecomposition decomposition;
    std::vector<double> roots;
    ThetaPath path;
};

inline UniformCle4Result uniform_cle4_driving(int n, double t_max, double step,
                                              std::uint64_t seed, const ThetaConfig& cfg = {}) {
    UniformCle4Result out;
    out.path = simulate_theta_until_top(4.0, 0.0, step, mix_seed(seed, 0), cfg, t_max);
    // Count qualifying excursions first, then assign independent uniform roots.
    ExcursionDecomposition base = excursion_decompose(out.path, n);
    Rng rng(mix_seed(seed, 1));
    out.roots.reserve(base.records.size());
    for (std::size_t i = 0; i < base.records.size(); ++i)
        out.roots.push_back(rng.uniform(0.0, two_pi));
    out.decomposition = excursion_decompose(out.path, n, &out.roots);
    return out;
}

// ---------------------------------------------------------------------------
// Uniformization statistic of the first retained root (acceptance target):
// arg X_1^{eps,n} = accumulated driving phase at the start of the first
// excursion of theta^eps exceeding 2^-n.  Uses an adaptive step proportional
// to theta^2 so the sub-threshold excursions that feed the phase integral are
// resolved.
// ---------------------------------------------------------------------------
struct UniformizationConfig {
    double step_rel = 0.02;   // dt = step_rel * (theta/sqrt(kappa'))^2, clamped
    double step_min = 1e-10;
    double step_max = 1e-5;
    double floor = 1e-4;      // cot cap level
};

inline double sample_uniformization_phase(double epsilon, int n, std::uint64_t seed,
                                          const UniformizationConfig& cfg = {}) {
    const double kp = kappa_prime_of_epsilon(epsilon);
    const double drift_coef = 0.5 * (kp - 4.0);
    const double sqk = std::sqrt(kp);
    const double threshold = std::pow(2.0, -static_cast<double>(n));

    Rng rng(seed);
    double th = 0.0, phase = 0.0, phase_at_zero = 0.0;
    for (;;) {
        const double th_eff = std::max(th, cfg.floor);
        const double dt = std::clamp(cfg.step_rel * sq(th_eff / sqk), cfg.step_min, cfg.step_max);
        const double cot = std::min(1.0 / std::tan(0.5 * th_eff), 2.0 / cfg.floor);
        if (th < cfg.floor) phase_at_zero = phase;  // last zero before the crossing
        th += drift_coef * cot * dt + sqk * std::sqrt(dt) * rng.normal();
        if (th < 0.0) th = -th;
        phase += cot * dt;
        if (th >= threshold) return wrap_angle(-phase_at_zero);
    }
}

}  // namespace disklab
