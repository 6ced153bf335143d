// disklab/loewner.hpp — radial Loewner flow engine.
//
// Integrates the radial Loewner ODE
//     d/dt g_t(z) = g_t(z) * (W_t + g_t(z)) / (W_t - g_t(z)),   g_0 = id,
// for a piecewise-constant driving function W_t on the unit circle, tracking
// points, their map derivatives, swallowing times, and the -log conformal
// radius parameterization (|g_t'(0)| = e^t).  Also provides numerical inverse
// maps (Newton iteration on the forward flow) for Caratheodory-type distances
// between domain chains, and composition of contractive disk self-maps in the
// -log CR clock.
//
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "disklab/common.hpp"

namespace disklab {

// ---------------------------------------------------------------------------
// Driving function: angles on a uniform time grid, left-constant hold between
// samples, W_t = exp(i * angle).
// ---------------------------------------------------------------------------
struct DrivingProcess {
    std::vector<double> angles;  // angle at times k * step, k = 0..n
    double step = 0.0;
    double duration = 0.0;

    static DrivingProcess constant(double angle, double duration, double step) {
        DrivingProcess d;
        d.step = step;
        d.duration = duration;
        const auto n = static_cast<std::size_t>(std::ceil(duration / step + 1e-12));
        d.angles.assign(n + 1, angle);
        return d;
    }

    std::size_t n_intervals() const { return angles.empty() ? 0 : angles.size() - 1; }

    // Left-constant hold: W on [k*step, (k+1)*step) is exp(i*angles[k]).
    double angle_at(double t) const {
        if (angles.empty()) throw InvalidDriving("empty driving");
        auto k = static_cast<std::size_t>(std::floor(t / step + 1e-12));
        if (k >= angles.size()) k = angles.size() - 1;
        return angles[k];
    }
    complex at(double t) const { return std::polar(1.0, angle_at(t)); }

    void validate() const {
        if (step <= 0.0) throw InvalidDriving("nonpositive step");
        for (double a : angles)
            if (!std::isfinite(a)) throw InvalidDriving("non-finite driving angle");
    }

    // Append another driving segment (same step) after this one.
    void append(const DrivingProcess& other) {
        if (angles.empty()) {
            *this = other;
            return;
        }
        if (other.angles.empty()) return;
        if (std::abs(step - other.step) > 1e-15)
            throw ConfigError("driving segments must share the grid step");
        // Left-hold convention: this->angles.back() sits at the junction time
        // and is superseded by the next segment's initial angle.
        angles.pop_back();
        angles.insert(angles.end(), other.angles.begin(), other.angles.end());
        duration += other.duration;
    }
};

struct LoewnerConfig {
    double swallow_tol = 1e-5;   // |g - W| below this => swallowed
    double circle_tol = 1e-9;    // 1 - |g| below this => swallowed (see advance_point)
    double h_min = 1e-13;        // substep underflow guard
    double substep_safety = 0.05;  // substep ~ safety * |W-g|^2 near the singularity
    double near_factor = 10.0;   // switch to log-variable implicit midpoint below near_factor * h
    int newton_max = 30;
    double newton_tol = 1e-10;
};

struct TrackedPoint {
    complex z0;
    std::vector<complex> traj;       // g at each driving grid time (frozen after swallow)
    std::vector<complex> log_deriv;  // log g'(z) at each grid time
    std::optional<double> swallow_time;
};

struct DomainChain {
    DrivingProcess driving;
    std::vector<TrackedPoint> tracked;
    std::vector<double> log_deriv0;  // log|g_t'(0)| at each grid time; equals t analytically
    double horizon = 0.0;
    LoewnerConfig config;

    std::size_t grid_index(double t) const {
        auto k = static_cast<std::size_t>(std::llround(t / driving.step));
        return std::min(k, log_deriv0.size() - 1);
    }
};

namespace detail {

// One interval of the flow for a single point with W held constant.
// State: g and log-derivative d = log g'(z).  Uses adaptive RK4 on g away from
// the driving point; within near_factor*h of it, integrates v = log(W - g)
// (where the vector field is tame) by implicit midpoint.  Returns true if the
// point was swallowed during the interval, setting t_swallow.
inline bool advance_point(complex W, double h_total, const LoewnerConfig& cfg,
                          complex& g, complex& logd, double t0, double& t_swallow) {
    auto f = [&](complex gg) { return gg * (W + gg) / (W - gg); };
    auto fd = [&](complex gg) {  // d/dg of the vector field
        const complex u = W - gg;
        return (W + gg) / u + 2.0 * gg * W / (u * u);
    };

    double t = 0.0;
    while (t < h_total - 1e-15) {
        const double dist = std::abs(W - g);
        if (dist < cfg.swallow_tol) {
            t_swallow = t0 + t;
            return true;
        }
        // An unswallowed interior point satisfies |g| < 1 exactly; when the
        // image becomes numerically indistinguishable from the unit circle the
        // conformal radius is below resolution (this happens when a component
        // pinches off away from the driving point), so freeze the point here
        // rather than let roundoff carry it outside the disk.
        if (1.0 - std::abs(g) < cfg.circle_tol) {
            // project back inside so the frozen conformal radius stays positive
            g *= (1.0 - cfg.circle_tol) / std::abs(g);
            t_swallow = t0 + t;
            return true;
        }
        double h = std::min(h_total - t, cfg.substep_safety * dist * dist);
        h = std::max(h, cfg.h_min);
        if (h <= cfg.h_min && dist > 2.0 * cfg.swallow_tol)
            throw SwallowResolutionError("substep underflow away from the driving point");

        if (dist >= cfg.near_factor * h || dist > 0.1) {
            // Explicit RK4 on (g, log g').
            const complex k1 = f(g), l1 = fd(g);
            const complex g2 = g + 0.5 * h * k1;
            const complex k2 = f(g2), l2 = fd(g2);
            const complex g3 = g + 0.5 * h * k2;
            const complex k3 = f(g3), l3 = fd(g3);
            const complex g4 = g + h * k3;
            const complex k4 = f(g4), l4 = fd(g4);
            g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            logd += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        } else {
            // Implicit midpoint on v = log(W - g):
            //   dv/dt = -(W - e^v)(2W - e^v) e^{-2v}.
            auto fv = [&](complex v) {
                const complex ev = std::exp(v);
                const complex gg = W - ev;
                return -gg * (W + gg) / (ev * ev);
            };
            complex v0 = std::log(W - g);
            complex v1 = v0 + h * fv(v0);  // explicit Euler predictor
            for (int it = 0; it < 4; ++it) v1 = v0 + h * fv(0.5 * (v0 + v1));
            const complex gmid = W - std::exp(0.5 * (v0 + v1));
            logd += h * fd(gmid);
            g = W - std::exp(v1);
        }
        t += h;
    }
    return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solve_radial_loewner: run the flow, tracking the given points up to t_max.
// ---------------------------------------------------------------------------
inline DomainChain solve_radial_loewner(const DrivingProcess& driving,
                                        const std::vector<complex>& tracked_points,
                                        double t_max,
                                        const LoewnerConfig& cfg = {}) {
    driving.validate();
    if (t_max > driving.duration + 1e-12)
        throw ConfigError("t_max exceeds driving duration");

    DomainChain chain;
    chain.driving = driving;
    chain.config = cfg;
    chain.horizon = t_max;

    const auto n_steps = std::min<std::size_t>(
        driving.n_intervals(),
        static_cast<std::size_t>(std::ceil(t_max / driving.step - 1e-12)));

    chain.log_deriv0.assign(n_steps + 1, 0.0);
    for (std::size_t k = 1; k <= n_steps; ++k)
        chain.log_deriv0[k] = static_cast<double>(k) * driving.step;
    // (At the center g == 0 identically and the linearized flow is exactly
    //  d log g'(0)/dt = 1; the grid values above ARE the integrated solution.)

    for (const complex& z0 : tracked_points) {
        TrackedPoint tp;
        tp.z0 = z0;
        tp.traj.reserve(n_steps + 1);
        tp.log_deriv.reserve(n_steps + 1);
        complex g = z0;
        complex logd = 0.0;
        tp.traj.push_back(g);
        tp.log_deriv.push_back(logd);

        bool swallowed = false;
        // A point starting at the driving root is swallowed instantly.
        if (std::abs(g - driving.at(0.0)) < cfg.swallow_tol) {
            swallowed = true;
            tp.swallow_time = 0.0;
        }
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double t0 = static_cast<double>(k) * driving.step;
            if (!swallowed) {
                const complex W = std::polar(1.0, driving.angles[k]);
                double ts = 0.0;
                if (detail::advance_point(W, driving.step, cfg, g, logd, t0, ts)) {
                    swallowed = true;
                    tp.swallow_time = ts;
                }
            }
            tp.traj.push_back(g);
            tp.log_deriv.push_back(logd);
        }
        chain.tracked.push_back(std::move(tp));
    }
    return chain;
}

// CR(0; D_t) from the tracked center derivative; equals e^{-t} by the
// parameterization of the chain.
inline double conformal_radius(const DomainChain& chain, double t) {
    if (t > chain.horizon + 1e-12) throw HorizonExceeded("t beyond chain horizon");
    return std::exp(-chain.log_deriv0[chain.grid_index(t)]);
}

// Conformal radius seen from a tracked point z: CR(z; D_t) =
// (1 - |g_t(z)|^2) / |g_t'(z)| (map D_t -> disk by g, then Mobius z -> 0).
inline double conformal_radius_at(const DomainChain& chain, std::size_t point_idx, double t) {
    const auto& tp = chain.tracked.at(point_idx);
    const auto k = chain.grid_index(t);
    const complex g = tp.traj[std::min(k, tp.traj.size() - 1)];
    const complex ld = tp.log_deriv[std::min(k, tp.log_deriv.size() - 1)];
    return (1.0 - std::norm(g)) / std::abs(std::exp(ld));
}

namespace detail {

// Evaluate g_t(w) and g_t'(w) by integrating the forward flow for one point.
inline std::pair<complex, complex> flow_point(const DomainChain& chain, complex w, double t) {
    const auto& drv = chain.driving;
    complex g = w, logd = 0.0;
    const auto n = static_cast<std::size_t>(std::ceil(t / drv.step - 1e-12));
    for (std::size_t k = 0; k < n; ++k) {
        const double h = std::min(drv.step, t - static_cast<double>(k) * drv.step);
        const complex W = std::polar(1.0, drv.angles[k]);
        double ts = 0.0;
        if (advance_point(W, h, chain.config, g, logd, 0.0, ts))
            throw InversionError("query point swallowed before t");
    }
    return {g, std::exp(logd)};
}

// f_t(z) by integrating the time-reversed flow dh/du = -h(W+h)/(W-h) from
// time t down to 0.  The reverse flow pushes points away from the driving
// singularity, so it is well-posed even for z arbitrarily close to W_t.
inline complex invert_by_flow(const DomainChain& chain, complex z, double t) {
    const auto& drv = chain.driving;
    const auto& cfg = chain.config;
    const auto n = static_cast<std::size_t>(std::ceil(t / drv.step - 1e-12));
    complex h = z;
    for (std::size_t k = n; k-- > 0;) {
        const double seg = std::min(drv.step, t - static_cast<double>(k) * drv.step);
        const complex W = std::polar(1.0, drv.angles[k]);
        auto F = [&](complex y) { return -y * (W + y) / (W - y); };
        double done = 0.0;
        while (done < seg - 1e-16) {
            const double dist = std::abs(W - h);
            if (dist < cfg.h_min) throw InversionError("reverse flow hit the driving point");
            const double hs =
                std::min(seg - done, std::max(cfg.h_min, cfg.substep_safety * dist * dist));
            const complex k1 = F(h);
            const complex k2 = F(h + 0.5 * hs * k1);
            const complex k3 = F(h + 0.5 * hs * k2);
            const complex k4 = F(h + hs * k3);
            h += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (std::abs(h) >= 1.0) h *= (1.0 - 1e-12) / std::abs(h);
            done += hs;
        }
    }
    return h;
}

// Invert g_t via Newton iteration seeded at `seed`: solve g_t(w) = z.
// Falls back to the reverse-flow integrator when Newton stalls or the
// iterate wanders into the swallowed region.
inline complex invert_map(const DomainChain& chain, complex z, double t, complex seed) {
    const auto& cfg = chain.config;
    complex w = seed;
    try {
        for (int it = 0; it < cfg.newton_max; ++it) {
            auto [gv, gd] = flow_point(chain, w, t);
            const complex delta = (gv - z) / gd;
            w -= delta;
            if (std::abs(w) >= 1.0) w *= 0.999999 / std::abs(w);
            if (std::abs(delta) < cfg.newton_tol) return w;
        }
    } catch (const InversionError&) {
    }
    return invert_by_flow(chain, z, t);
}

}  // namespace detail

// Inverse map f_t(z) = g_t^{-1}(z) by Newton iteration on the forward flow.
inline complex inverse_map(const DomainChain& chain, complex z, double t,
                           std::optional<complex> seed = std::nullopt) {
    return detail::invert_map(chain, z, t, seed.value_or(z));
}

// ---------------------------------------------------------------------------
// caratheodory_distance: sup over a time grid and a grid of r*D of
// |f^a_t(z) - f^b_t(z)|.  Grid density is a config knob, not hard-coded.
// ---------------------------------------------------------------------------
struct CaratheodoryGrid {
    int n_radial = 8;
    int n_angular = 16;
    int n_times = 21;
};

inline double caratheodory_distance(const DomainChain& a, const DomainChain& b,
                                    double r, double t_max,
                                    const CaratheodoryGrid& grid = {}) {
    if (r <= 0.0 || r >= 1.0) throw ConfigError("r must be in (0,1)");
    if (t_max > a.horizon + 1e-12 || t_max > b.horizon + 1e-12)
        throw HorizonExceeded("t_max beyond a chain horizon");

    std::vector<complex> pts;
    for (int j = 1; j <= grid.n_radial; ++j) {
        const double rho = r * static_cast<double>(j) / grid.n_radial;
        for (int k = 0; k < grid.n_angular; ++k)
            pts.push_back(std::polar(rho, two_pi * k / grid.n_angular));
    }

    double sup = 0.0;
    std::vector<complex> seed_a(pts), seed_b(pts);  // f_0 = identity
    for (int i = 1; i < grid.n_times; ++i) {
        const double t = t_max * static_cast<double>(i) / (grid.n_times - 1);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            seed_a[p] = detail::invert_map(a, pts[p], t, seed_a[p]);
            seed_b[p] = detail::invert_map(b, pts[p], t, seed_b[p]);
            sup = std::max(sup, std::abs(seed_a[p] - seed_b[p]));
        }
    }
    return sup;
}

// ---------------------------------------------------------------------------
// compose_bubble_maps: maps represented by their Loewner driving segments;
// each segment generates a disk self-map fixing 0 with f'(0) = e^{-duration}.
// Composition in reverse chronological order == concatenation of drivings,
// and -log CR times add.
// ---------------------------------------------------------------------------
struct BubbleMap {
    DrivingProcess driving;
    double log_deriv0() const { return -driving.duration; }
};

inline DomainChain compose_bubble_maps(const std::vector<BubbleMap>& bubbles,
                                       const LoewnerConfig& cfg = {}) {
    DrivingProcess combined;
    for (const auto& b : bubbles) {
        if (b.log_deriv0() >= 0.0)
            throw NotContractive("bubble map with f'(0) >= 1");
        b.driving.validate();
        combined.append(b.driving);
    }
    if (combined.angles.empty()) {  // empty list -> identity chain of horizon 0
        combined.step = 1.0;
        combined.angles = {0.0};
        combined.duration = 0.0;
    }
    return solve_radial_loewner(combined, {}, combined.duration, cfg);
}

}  // namespace disklab
