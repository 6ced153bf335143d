// disklab/exploration.hpp — branching exploration toward multiple targets.
//
// A single trunk exploration (theta-process driving, radial Loewner flow,
// pivot target recentered to the origin) is run per tree node.  Separation
// events are detected as grid-time swallow groups of tracked targets (kappa'
// > 4 pinches) and as loop closures (theta hitting 2pi), where the remaining
// targets are classified inside/outside the closing loop by proximity of
// their g-image to the driving point.  Each cut-off group is re-seeded
// deterministically in a fresh disk, with positions derived from the
// pre-swallow g-images; target clocks (-log CR(target; D_t)) accumulate
// additively across nodes.
//
// Branch chains returned per target reuse the DomainChain container with the
// target playing the center role: log_deriv0 holds the TARGET's clock at each
// grid index and `horizon` is the final clock value.  Across re-seeding
// boundaries the concatenated driving is a formal composition (the bubble-map
// semantics of compose_bubble_maps), not a single continuous flow.
//
// Order variables:
//   * kappa' = 4: one uniform rank per equivalence class per separation
//     event; the order matrix is the lexicographic comparison of the rank
//     keys (equivalent to a fair coin per binary event, and transitive by
//     construction).
//   * kappa' > 4: a component cut off by a curve self-pinch is single-colored,
//     and the color (left or right side of the trace) decides the visit order;
//     the side is read from the approach angle of the cut component relative
//     to the driving point just before the pinch.  At a loop closure the
//     inside (continuing) component is the one whose color puts it first.
//     This branch-local bookkeeping is a documented implementation choice.
//
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "disklab/common.hpp"
#include "disklab/loewner.hpp"
#include "disklab/radial_sle.hpp"

namespace disklab {

struct ExplorationConfig {
    double step = 1e-3;
    ThetaConfig theta;
    LoewnerConfig loewner;
    double close_tol = 0.25;      // inside/outside proximity at a loop closure
    double side_amb_tol = 0.5;    // approach-angle band around pi => ambiguous color
    int pre_event_lag = 2;        // grid steps before the event for side readout
    int max_nodes = 512;
    double child_radius = 0.35;   // re-seeded positions scaled inside this radius

    ExplorationConfig() { loewner.swallow_tol = 1e-3; }
};

struct SeparationEventRecord {
    int node = 0;
    bool closure = false;                        // loop closure vs pinch swallow
    double trunk_time = 0.0;                     // node-local trunk time
    std::vector<int> stayed;                     // global target indices
    std::vector<std::vector<int>> cut_classes;   // groups cut off at this event
    std::vector<int> cut_mono;                   // per class: 1 mono, 0 multi, -1 ambiguous
};

struct BranchingExploration {
    double kappa_prime = 4.0;
    std::vector<complex> targets;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    ExplorationConfig config;

    std::map<int, DomainChain> branches;  // target index -> branch chain (see header)
    std::map<std::pair<int, int>, double> separation_times;       // sigma_{z,w}, z's clock
    std::map<std::pair<int, int>, std::size_t> separation_event;  // pair -> event index
    std::map<std::pair<int, int>, std::pair<double, double>> loop_times;  // (target, level)
    std::vector<SeparationEventRecord> events;
    bool tie_break_warning = false;
};

struct OrderMatrix {
    std::map<std::pair<int, int>, int> entries;
    std::map<std::pair<int, std::size_t>, int> equivalence;  // (target, event) -> class
};

namespace detail {

inline complex mobius_to_zero(complex p, complex u) {
    return (u - p) / (1.0 - std::conj(p) * u);
}
inline complex mobius_from_zero(complex p, complex u) {
    return (u + p) / (1.0 + std::conj(p) * u);
}

struct BranchAccum {
    DrivingProcess driving;
    std::vector<complex> traj;
    std::vector<complex> logd;
    std::vector<double> clock;
};

inline DrivingProcess slice_driving(const DrivingProcess& d, std::size_t k_end) {
    DrivingProcess out;
    out.step = d.step;
    k_end = std::min(k_end, d.angles.size() - 1);
    out.angles.assign(d.angles.begin(), d.angles.begin() + static_cast<std::ptrdiff_t>(k_end) + 1);
    out.duration = static_cast<double>(k_end) * d.step;
    return out;
}

struct NodeTask {
    std::vector<int> idx;        // global target indices, sorted
    std::vector<complex> pos;    // positions in this node's disk
    std::vector<double> offset;  // absolute clocks (-log CR) at node entry
};

}  // namespace detail

inline BranchingExploration explore_branching(double kappa_prime,
                                              const std::vector<complex>& targets,
                                              std::uint64_t seed, double horizon,
                                              const ExplorationConfig& cfg = {}) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (std::abs(targets[i]) >= 1.0) throw ConfigError("targets must lie inside the disk");
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (std::abs(targets[i] - targets[j]) < 1e-12)
                throw ConfigError("targets must be pairwise distinct");
    }

    BranchingExploration exp;
    exp.kappa_prime = kappa_prime;
    exp.targets = targets;
    exp.horizon = horizon;
    exp.seed = seed;
    exp.config = cfg;

    std::map<int, detail::BranchAccum> acc;

    detail::NodeTask root;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        root.idx.push_back(static_cast<int>(i));
        root.pos.push_back(targets[i]);
        root.offset.push_back(-std::log(1.0 - std::norm(targets[i])));
    }
    std::deque<detail::NodeTask> queue{root};
    int node_id = 0;
    const bool colors = kappa_prime > 4.0;

    while (!queue.empty()) {
        if (node_id >= cfg.max_nodes) throw HorizonExceeded("exploration tree exceeded max_nodes");
        detail::NodeTask task = std::move(queue.front());
        queue.pop_front();
        const int this_node = node_id++;
        const std::uint64_t node_seed = mix_seed(seed, static_cast<std::uint64_t>(this_node));

        // pivot: smallest global index
        std::size_t piv = 0;
        for (std::size_t j = 1; j < task.idx.size(); ++j)
            if (task.idx[j] < task.idx[piv]) piv = j;
        const complex p = task.pos[piv];
        const double node_h = horizon - task.offset[piv];
        if (node_h <= cfg.step || task.idx.empty()) continue;

        // Recenter the pivot to 0.
        std::vector<int> others;             // positions into task arrays
        std::vector<complex> tracked_pts;
        for (std::size_t j = 0; j < task.idx.size(); ++j) {
            if (j == piv) continue;
            others.push_back(static_cast<int>(j));
            tracked_pts.push_back(detail::mobius_to_zero(p, task.pos[j]));
        }

        // Trunk driving: theta rounds with uniform roots, stopping at each
        // loop closure, until the node horizon.
        DrivingProcess trunk;
        trunk.step = cfg.step;
        struct Closure {
            std::size_t k_tau;   // absolute grid index of the closure
            std::size_t k_tau0;  // last pre-closure grid index with theta < tol
        };
        std::vector<Closure> closures;
        Rng root_rng(mix_seed(node_seed, 1000));
        std::size_t k_abs = 0;
        int round = 0;
        while (static_cast<double>(k_abs) * cfg.step < node_h - 1e-12) {
            const double remaining = node_h - static_cast<double>(k_abs) * cfg.step;
            const ThetaPath th = simulate_theta(kappa_prime, 0.0, remaining, cfg.step,
                                                mix_seed(node_seed, 2000 + round), cfg.theta,
                                                /*stop_at_top=*/true);
            const double root_angle = root_rng.uniform(0.0, two_pi);
            trunk.append(driving_from_theta(th, root_angle, /*allow_barrier_crossings=*/true));
            if (th.tau0) {
                const auto k_tau_local = static_cast<std::size_t>(
                    std::llround(*th.tau0 / cfg.step));
                std::size_t k0 = 0;
                for (std::size_t k = 0; k < k_tau_local; ++k)
                    if (th.values[k] < th.reflect_tol) k0 = k;
                closures.push_back({k_abs + k_tau_local, k_abs + k0});
            }
            k_abs += th.values.size() - 1;
            ++round;
        }

        DomainChain chain = solve_radial_loewner(trunk, tracked_pts, trunk.duration, cfg.loewner);
        const std::size_t n_grid = chain.log_deriv0.size() - 1;

        // Loop times for the pivot (one level per closure).
        for (std::size_t lv = 0; lv < closures.size(); ++lv)
            exp.loop_times[{task.idx[piv], static_cast<int>(lv) + 1}] = {
                task.offset[piv] + static_cast<double>(closures[lv].k_tau0) * cfg.step,
                task.offset[piv] + static_cast<double>(closures[lv].k_tau) * cfg.step};

        // Absolute clock of a tracked target at grid index k.
        auto clock_of = [&](std::size_t slot, std::size_t k) {
            const double cr0 = conformal_radius_at(chain, slot, 0.0);
            const double cr = conformal_radius_at(chain, slot, static_cast<double>(k) * cfg.step);
            return task.offset[static_cast<std::size_t>(others[slot])] +
                   std::log(std::max(cr0, 1e-300) / std::max(cr, 1e-300));
        };

        // --- event scan ------------------------------------------------------
        std::vector<bool> separated(others.size(), false);
        // swallow grid index per tracked target
        std::vector<std::optional<std::size_t>> k_swallow(others.size());
        for (std::size_t s = 0; s < others.size(); ++s)
            if (chain.tracked[s].swallow_time)
                k_swallow[s] = std::min<std::size_t>(
                    n_grid, static_cast<std::size_t>(
                                std::floor(*chain.tracked[s].swallow_time / cfg.step)) + 1);

        struct PendingEvent {
            std::size_t k;
            bool closure;
            std::size_t closure_idx = 0;
        };
        std::vector<PendingEvent> pending;
        {
            std::map<std::size_t, bool> seen;
            for (std::size_t s = 0; s < others.size(); ++s)
                if (k_swallow[s] && !seen.count(*k_swallow[s])) {
                    seen[*k_swallow[s]] = true;
                    pending.push_back({*k_swallow[s], false});
                }
            for (std::size_t c = 0; c < closures.size(); ++c)
                pending.push_back({closures[c].k_tau, true, c});
            std::sort(pending.begin(), pending.end(),
                      [](const PendingEvent& a, const PendingEvent& b) { return a.k < b.k; });
        }

        // color readout of a cut class (kappa' > 4 pinches): the pinched-off
        // component is single-colored, and its color is the side of the trace
        // it sits on; read the side from the approach angle of the cut point
        // relative to the driving point shortly before the pinch.  Left/right
        // symmetry of the driving law makes the two outcomes equally likely
        // for symmetric targets, as the order-variable law requires.
        auto classify_mono = [&](std::size_t rep_slot, std::size_t k_event) -> int {
            const std::size_t k_pre =
                k_event > static_cast<std::size_t>(cfg.pre_event_lag)
                    ? k_event - static_cast<std::size_t>(cfg.pre_event_lag)
                    : 0;
            const complex W = trunk.at(static_cast<double>(k_event) * cfg.step);
            const auto& tr = chain.tracked[rep_slot].traj;
            const complex u = tr[std::min(k_pre, tr.size() - 1)];
            const double phi = wrap_angle(std::arg(u) - std::arg(W));
            if (std::abs(phi - pi) < cfg.side_amb_tol) return -1;  // side unreadable
            return phi < pi ? 1 : 0;
        };

        std::vector<std::size_t> exit_index(others.size(), n_grid);  // branch truncation
        std::vector<detail::NodeTask> children;

        for (const auto& ev : pending) {
            const std::size_t k = std::min(ev.k, n_grid);
            std::vector<int> cut_slots;
            if (ev.closure) {
                const complex W = trunk.at(static_cast<double>(k) * cfg.step);
                for (std::size_t s = 0; s < others.size(); ++s) {
                    if (separated[s]) continue;
                    if (k_swallow[s] && *k_swallow[s] <= k) {
                        cut_slots.push_back(static_cast<int>(s));
                        continue;
                    }
                    const complex u = chain.tracked[s].traj[std::min(k, chain.tracked[s].traj.size() - 1)];
                    if (std::abs(u - W) < cfg.close_tol) cut_slots.push_back(static_cast<int>(s));
                }
            } else {
                for (std::size_t s = 0; s < others.size(); ++s)
                    if (!separated[s] && k_swallow[s] && *k_swallow[s] == k)
                        cut_slots.push_back(static_cast<int>(s));
            }
            if (cut_slots.empty()) continue;
            if (cut_slots.size() >= 3) exp.tie_break_warning = true;

            SeparationEventRecord rec;
            rec.node = this_node;
            rec.closure = ev.closure;
            rec.trunk_time = static_cast<double>(k) * cfg.step;
            rec.stayed.push_back(task.idx[piv]);
            for (std::size_t s = 0; s < others.size(); ++s)
                if (!separated[s] &&
                    std::find(cut_slots.begin(), cut_slots.end(), static_cast<int>(s)) ==
                        cut_slots.end())
                    rec.stayed.push_back(task.idx[static_cast<std::size_t>(others[s])]);
            std::vector<int> cls;
            for (int s : cut_slots) cls.push_back(task.idx[static_cast<std::size_t>(others[static_cast<std::size_t>(s)])]);
            rec.cut_classes.push_back(cls);
            if (ev.closure)
                rec.cut_mono.push_back(0);  // the inside (continuing) component is mono
            else
                rec.cut_mono.push_back(colors
                                           ? classify_mono(static_cast<std::size_t>(cut_slots[0]), k)
                                           : -1);
            const std::size_t event_index = exp.events.size();

            // separation times for every (stay, cut) ordered pair
            const std::size_t k_pre = k > 0 ? k - 1 : 0;
            auto clock_of_global = [&](int g, bool pre) -> double {
                if (g == task.idx[piv])
                    return task.offset[piv] + static_cast<double>(k) * cfg.step;
                for (std::size_t s = 0; s < others.size(); ++s)
                    if (task.idx[static_cast<std::size_t>(others[s])] == g)
                        return clock_of(s, pre ? k_pre : k);
                return 0.0;
            };
            for (int b : cls) {
                const double sig_b = clock_of_global(b, /*pre=*/true);
                for (int a : rec.stayed) {
                    exp.separation_times[{a, b}] = clock_of_global(a, false);
                    exp.separation_times[{b, a}] = sig_b;
                    exp.separation_event[{a, b}] = event_index;
                    exp.separation_event[{b, a}] = event_index;
                }
            }
            exp.events.push_back(rec);

            // child node for the cut class: fresh disk, rescaled pre-event images
            detail::NodeTask child;
            const complex W = trunk.at(static_cast<double>(k) * cfg.step);
            double max_rel = 0.0;
            std::vector<complex> rel(cut_slots.size());
            for (std::size_t q = 0; q < cut_slots.size(); ++q) {
                const auto s = static_cast<std::size_t>(cut_slots[q]);
                const auto& tr = chain.tracked[s].traj;
                rel[q] = tr[std::min(k_pre, tr.size() - 1)] / W - 1.0;
                max_rel = std::max(max_rel, std::abs(rel[q]));
            }
            for (std::size_t q = 0; q < cut_slots.size(); ++q) {
                const auto s = static_cast<std::size_t>(cut_slots[q]);
                const int g = task.idx[static_cast<std::size_t>(others[s])];
                child.idx.push_back(g);
                child.pos.push_back(max_rel > 0.0 ? cfg.child_radius * rel[q] / max_rel
                                                  : complex(0.0, 0.0));
                child.offset.push_back(clock_of(s, k_pre));
                separated[s] = true;
                exit_index[s] = k;
            }
            children.push_back(std::move(child));
        }

        // --- branch accumulation ---------------------------------------------
        auto append_branch = [&](int g, std::size_t slot_or_piv, bool is_pivot,
                                 std::size_t k_end, double off) {
            auto& a = acc[g];
            const DrivingProcess seg = detail::slice_driving(trunk, k_end);
            const bool first = a.driving.angles.empty();
            a.driving.append(seg);
            for (std::size_t k = first ? 0 : 1; k <= k_end; ++k) {
                if (is_pivot) {
                    a.traj.push_back(0.0);
                    a.logd.push_back(complex(static_cast<double>(k) * cfg.step, 0.0));
                    a.clock.push_back(off + static_cast<double>(k) * cfg.step);
                } else {
                    const auto& tp = chain.tracked[slot_or_piv];
                    a.traj.push_back(tp.traj[std::min(k, tp.traj.size() - 1)]);
                    a.logd.push_back(tp.log_deriv[std::min(k, tp.log_deriv.size() - 1)]);
                    a.clock.push_back(clock_of(slot_or_piv, k));
                }
            }
        };
        append_branch(task.idx[piv], 0, true, n_grid, task.offset[piv]);
        for (std::size_t s = 0; s < others.size(); ++s)
            append_branch(task.idx[static_cast<std::size_t>(others[s])], s, false,
                          exit_index[s], 0.0);

        for (auto& child : children) queue.push_back(std::move(child));
    }

    for (auto& [g, a] : acc) {
        DomainChain bc;
        bc.driving = std::move(a.driving);
        TrackedPoint tp;
        tp.z0 = targets[static_cast<std::size_t>(g)];
        tp.traj = std::move(a.traj);
        tp.log_deriv = std::move(a.logd);
        bc.tracked.push_back(std::move(tp));
        bc.log_deriv0 = std::move(a.clock);
        bc.horizon = bc.log_deriv0.empty() ? 0.0 : bc.log_deriv0.back();
        bc.config = cfg.loewner;
        exp.branches.emplace(g, std::move(bc));
    }
    return exp;
}

// ---------------------------------------------------------------------------
// assign_order_variables (kappa' = 4): one uniform rank per equivalence class
// per separation event; the order is the lexicographic comparison of rank
// keys.  Pairs cut in the same class at the same event share their value with
// respect to everything else; antisymmetry and transitivity hold by
// construction.
// ---------------------------------------------------------------------------
inline OrderMatrix assign_order_variables(const BranchingExploration& exp, std::uint64_t seed) {
    const int n = static_cast<int>(exp.targets.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && !exp.separation_times.count({i, j}))
                throw ConfigError("assign_order_variables needs all pairwise separations");

    OrderMatrix om;
    Rng rng(seed);
    std::vector<std::vector<double>> key(static_cast<std::size_t>(n));
    for (std::size_t e = 0; e < exp.events.size(); ++e) {
        const auto& ev = exp.events[e];
        // classes: stay set first, then each cut class
        std::vector<const std::vector<int>*> classes{&ev.stayed};
        for (const auto& c : ev.cut_classes) classes.push_back(&c);
        std::vector<double> rank(classes.size());
        for (auto& r : rank) r = rng.uniform();
        for (std::size_t c = 0; c < classes.size(); ++c)
            for (int g : *classes[c]) {
                key[static_cast<std::size_t>(g)].push_back(rank[c]);
                om.equivalence[{g, e}] = static_cast<int>(c);
            }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            om.entries[{i, j}] =
                (i == j) ? 1
                         : (key[static_cast<std::size_t>(i)] < key[static_cast<std::size_t>(j)] ? 1
                                                                                                : 0);
    return om;
}

// ---------------------------------------------------------------------------
// order_from_colors (kappa' > 4): 1 iff z lies in the newly created
// monocolored component at the separation event of (z, w).
// ---------------------------------------------------------------------------
inline int order_from_colors(const BranchingExploration& exp, complex z, complex w) {
    if (exp.kappa_prime <= 4.0)
        throw ConfigError("order_from_colors applies to kappa' > 4 only");
    auto find_target = [&](complex q) -> int {
        for (std::size_t i = 0; i < exp.targets.size(); ++i)
            if (std::abs(exp.targets[i] - q) < 1e-9) return static_cast<int>(i);
        throw ConfigError("point is not an exploration target");
    };
    const int iz = find_target(z), iw = find_target(w);
    const auto it = exp.separation_event.find({iz, iw});
    if (it == exp.separation_event.end())
        throw ConfigError("pair was never separated within the horizon");
    const auto& ev = exp.events[it->second];

    auto in_class = [&](int g, const std::vector<int>& cls) {
        return std::find(cls.begin(), cls.end(), g) != cls.end();
    };
    // locate each point: stay side or a cut class
    auto side_of = [&](int g) -> int {  // -1 = stay, otherwise cut class index
        if (in_class(g, ev.stayed)) return -1;
        for (std::size_t c = 0; c < ev.cut_classes.size(); ++c)
            if (in_class(g, ev.cut_classes[c])) return static_cast<int>(c);
        throw ConfigError("target not present at the separation event");
    };
    const int sz = side_of(iz), sw = side_of(iw);
    if (sz == sw) throw ConfigError("pair not separated at the recorded event");
    if (sz >= 0 && sw >= 0)
        throw ColorAmbiguity("both targets cut into distinct components simultaneously");

    const int cut_class = std::max(sz, sw);
    const int mono = ev.cut_mono[static_cast<std::size_t>(cut_class)];
    if (mono < 0) throw ColorAmbiguity("unreadable color tag at the pinch point");
    const bool cut_is_mono = (mono == 1);
    const bool z_is_cut = (sz >= 0);
    return (z_is_cut == cut_is_mono) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// extract_loops: per-level loop trace and bubble boundary toward one target,
// all returned in the original disk coordinates.
// ---------------------------------------------------------------------------
struct LoopLevel {
    std::vector<complex> loop;    // trace between tau_0 and tau
    std::vector<complex> bubble;  // boundary of the domain at tau
    double tau0 = 0.0, tau = 0.0;  // in the target's clock
    double neg_log_cr = 0.0;       // numerical -log CR(target; bubble), level frame
    bool counterclockwise = true;  // alternates with nesting level by convention
};

struct LoopExtractionConfig {
    int n_loop_points = 160;
    int n_bubble_points = 128;
    double trace_radius = 0.98;  // curve tip approximated by f_t(r W_t)
};

inline std::vector<LoopLevel> extract_loops(const BranchingExploration& exp, complex target,
                                            int levels, const LoopExtractionConfig& lcfg = {}) {
    int tgt = -1;
    for (std::size_t i = 0; i < exp.targets.size(); ++i)
        if (std::abs(exp.targets[i] - target) < 1e-9) tgt = static_cast<int>(i);
    if (tgt < 0) throw ConfigError("point is not an exploration target");

    const auto& cfg = exp.config;
    const complex p = target;
    std::vector<DomainChain> level_chains;
    std::vector<double> level_taus;
    std::vector<LoopLevel> out;
    double clock = -std::log(1.0 - std::norm(p));

    for (int lv = 1; lv <= levels; ++lv) {
        const std::uint64_t lseed =
            mix_seed(exp.seed, 0xB0B0ULL + 131ULL * static_cast<std::uint64_t>(tgt) +
                                   static_cast<std::uint64_t>(lv));
        const ThetaPath th =
            simulate_theta_until_top(exp.kappa_prime, 0.0, cfg.step, lseed, cfg.theta);
        const double root_angle = Rng(mix_seed(lseed, 1)).uniform(0.0, two_pi);
        if (clock + *th.tau0 > exp.horizon)
            throw HorizonExceeded("loop level exceeds the exploration horizon");

        const auto k_tau = th.values.size() - 1;
        std::size_t k_tau0 = 0;
        for (std::size_t k = 0; k < k_tau; ++k)
            if (th.values[k] < th.reflect_tol) k_tau0 = k;

        const DrivingProcess drv = driving_from_theta(th, root_angle, true);
        DomainChain chain = solve_radial_loewner(drv, {}, drv.duration, cfg.loewner);

        LoopLevel level;
        level.tau0 = clock + static_cast<double>(k_tau0) * cfg.step;
        level.tau = clock + static_cast<double>(k_tau) * cfg.step;
        level.counterclockwise = (lv % 2 == 1);

        auto map_back = [&](complex q) {
            for (std::size_t j = level_chains.size(); j-- > 0;)
                q = inverse_map(level_chains[j], q, level_taus[j], q);
            return detail::mobius_from_zero(p, q);
        };

        // loop trace: f_s(r W_s) for s in [tau0, tau]
        complex seed_pt = lcfg.trace_radius * drv.at(static_cast<double>(k_tau0) * cfg.step);
        const std::size_t stride =
            std::max<std::size_t>(1, (k_tau - k_tau0) / static_cast<std::size_t>(lcfg.n_loop_points));
        for (std::size_t k = k_tau0; k <= k_tau; k += stride) {
            const double s = static_cast<double>(k) * cfg.step;
            seed_pt = detail::invert_map(chain, lcfg.trace_radius * drv.at(s), s, seed_pt);
            level.loop.push_back(map_back(seed_pt));
        }
        // bubble boundary at tau
        const double t_bub = static_cast<double>(k_tau) * cfg.step;
        complex bub_seed = std::polar(lcfg.trace_radius, 0.0);
        for (int a = 0; a <= lcfg.n_bubble_points; ++a) {
            const complex q = std::polar(lcfg.trace_radius, two_pi * a / lcfg.n_bubble_points);
            bub_seed = detail::invert_map(chain, q, t_bub, a == 0 ? q : bub_seed);
            level.bubble.push_back(map_back(bub_seed));
        }
        // numerical -log CR of the target in the bubble (level frame)
        {
            const double h = 1e-4;
            const complex f1 = inverse_map(chain, complex(h, 0.0), t_bub, complex(h, 0.0));
            const complex f2 = inverse_map(chain, complex(-h, 0.0), t_bub, complex(-h, 0.0));
            level.neg_log_cr = -std::log(std::abs(f1 - f2) / (2.0 * h));
        }
        out.push_back(std::move(level));

        level_chains.push_back(std::move(chain));
        level_taus.push_back(t_bub);
        clock += static_cast<double>(k_tau) * cfg.step;
    }
    return out;
}

}  // namespace disklab
