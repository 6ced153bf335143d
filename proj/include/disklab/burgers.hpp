// disklab/burgers.hpp — the five-symbol hamburger/cheeseburger word model:
// i.i.d. word generation, last-come-first-serve reduction with a burger stack
// and pending (never-fulfilled) orders, the (C_n, D_n) trajectories, and
// scaling estimators for the Brownian limit (B^1_t, B^2_{alpha t}),
// alpha = max{1 - 2p, 0}.
//
// Conventions (documented, alternates are a code-local change):
//   * C_n = (#burgers on stack) - (#pending orders, F included)
//   * D_n = (#H on stack - #pending h) - (#C on stack - #pending c);
//     an F resolution therefore counts toward the type it consumed, and a
//     pending F counts toward neither type.
//   * A pending order (h, c or F arriving to no matching burger) stays pending
//     forever: orders never consume burgers produced after them.  This is
//     forced by the trajectory invariant (C increments are exactly +-1) and by
//     associativity of the reduction (reduced words are order-prefix followed
//     by burger-suffix).
//
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disklab/common.hpp"

namespace disklab {

// Symbols: 'H','C' burgers; 'h','c','F' orders.
struct BurgerWord {
    std::string symbols;
    double p = 0.0;  // fresh-order fraction of all orders
};

inline bool is_burger(char s) { return s == 'H' || s == 'C'; }
inline bool is_order(char s) { return s == 'h' || s == 'c' || s == 'F'; }

// i.i.d. symbols: H, C with probability 1/4 each; orders total 1/2 split as
// h, c with probability (1-p)/4 each and F with probability p/2.
inline BurgerWord generate_word(double p, std::size_t n, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw ConfigError("p must lie in [0,1]");
    BurgerWord w;
    w.p = p;
    w.symbols.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        char s;
        if (u < 0.25)
            s = 'H';
        else if (u < 0.5)
            s = 'C';
        else if (u < 0.5 + 0.25 * (1.0 - p))
            s = 'h';
        else if (u < 0.5 + 0.5 * (1.0 - p))
            s = 'c';
        else
            s = 'F';
        w.symbols.push_back(s);
    }
    return w;
}

struct BurgerTrajectory {
    std::vector<int> C_path;  // length n+1, starts at 0, increments +-1
    std::vector<int> D_path;  // length n+1, starts at 0, increments in {-1,0,+1}
};

// Incremental LCFS reduction state; reusable across chunks (the reduction is
// associative under the conventions above).
struct BurgerStack {
    std::vector<char> stack;  // unconsumed burgers, bottom to top
    int pending_h = 0, pending_c = 0, pending_f = 0;

    int stack_h = 0, stack_c = 0;

    void push_burger(char s) {
        stack.push_back(s);
        (s == 'H' ? stack_h : stack_c)++;
    }
    // Consume the topmost burger matching `want` ('H', 'C', or 0 for any).
    // Returns the consumed type or 0 if none available.
    char consume(char want) {
        for (std::size_t i = stack.size(); i-- > 0;) {
            if (want == 0 || stack[i] == want) {
                const char got = stack[i];
                stack.erase(stack.begin() + static_cast<std::ptrdiff_t>(i));
                (got == 'H' ? stack_h : stack_c)--;
                return got;
            }
        }
        return 0;
    }

    void process(char s) {
        switch (s) {
            case 'H':
            case 'C':
                push_burger(s);
                break;
            case 'h':
                if (consume('H') == 0) ++pending_h;
                break;
            case 'c':
                if (consume('C') == 0) ++pending_c;
                break;
            case 'F':
                if (consume(0) == 0) ++pending_f;
                break;
            default:
                throw ConfigError("unknown burger symbol");
        }
    }

    int count() const {
        return static_cast<int>(stack.size()) - pending_h - pending_c - pending_f;
    }
    int discrepancy() const { return (stack_h - pending_h) - (stack_c - pending_c); }
};

inline BurgerTrajectory reduce_and_track(const BurgerWord& word) {
    BurgerTrajectory traj;
    traj.C_path.reserve(word.symbols.size() + 1);
    traj.D_path.reserve(word.symbols.size() + 1);
    traj.C_path.push_back(0);
    traj.D_path.push_back(0);
    BurgerStack st;
    for (char s : word.symbols) {
        st.process(s);
        traj.C_path.push_back(st.count());
        traj.D_path.push_back(st.discrepancy());
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Brute-force oracle: reduce by repeated adjacent moves.  A burger immediately
// followed by a matching order cancels; a burger followed by a mismatched
// typed order commutes (the order slides left).  The fixed point is an
// order-prefix + burger-suffix normal form from which (C, D) are read off.
// ---------------------------------------------------------------------------
inline std::string brute_force_reduce(const std::string& word) {
    std::string w = word;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            if (!is_burger(w[i]) || !is_order(w[i + 1])) continue;
            const char b = w[i], o = w[i + 1];
            const bool match = (o == 'F') || (o == 'h' && b == 'H') || (o == 'c' && b == 'C');
            if (match) {
                w.erase(i, 2);
            } else {
                std::swap(w[i], w[i + 1]);
            }
            changed = true;
            break;
        }
    }
    return w;
}

inline std::pair<int, int> brute_force_counts(const std::string& word) {
    const std::string r = brute_force_reduce(word);
    int nb = 0, no = 0, h_net = 0, c_net = 0;
    for (char s : r) {
        if (is_burger(s)) ++nb;
        if (is_order(s)) ++no;
        if (s == 'H') ++h_net;
        if (s == 'h') --h_net;
        if (s == 'C') ++c_net;
        if (s == 'c') --c_net;
    }
    return {nb - no, h_net - c_net};
}

// ---------------------------------------------------------------------------
// Scaling estimators across trials at a fixed horizon n:
//   alpha_hat = Var(D_n) / Var(C_n)   (time change of the Brownian limit),
//   var_c_per_step = Var(C_n) / n,
//   corr = empirical correlation of (C_n, D_n) across trials.
// ---------------------------------------------------------------------------
struct ScalingEstimates {
    double alpha_hat = 0.0;
    double var_c_per_step = 0.0;
    double corr = 0.0;
};

inline ScalingEstimates scaling_estimates(double p, std::size_t n, std::size_t trials,
                                          std::uint64_t seed) {
    if (n < 10000) throw ConfigError("scaling_estimates needs n >= 1e4");
    std::vector<double> cn(trials), dn(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const BurgerWord w = generate_word(p, n, mix_seed(seed, t));
        BurgerStack st;
        for (char s : w.symbols) st.process(s);
        cn[t] = st.count();
        dn[t] = st.discrepancy();
    }
    ScalingEstimates est;
    const double vc = variance_of(cn), vd = variance_of(dn);
    est.alpha_hat = vd / vc;
    est.var_c_per_step = vc / static_cast<double>(n);
    const double mc = mean_of(cn), md = mean_of(dn);
    double cov = 0.0;
    for (std::size_t t = 0; t < trials; ++t) cov += (cn[t] - mc) * (dn[t] - md);
    cov /= static_cast<double>(trials - 1);
    est.corr = cov / std::sqrt(vc * vd);
    return est;
}

}  // namespace disklab
