// Branching exploration: separation bookkeeping, order variables, color
// readout, and nested loop extraction.
#include <catch2/catch_amalgamated.hpp>

#include "disklab/exploration.hpp"

using namespace disklab;

namespace {

BranchingExploration run_small(double kp, std::uint64_t seed,
                               std::vector<complex> targets = {complex(0.3, 0.0),
                                                               complex(-0.3, 0.1),
                                                               complex(0.0, -0.4)},
                               double horizon = 40.0) {
    ExplorationConfig cfg;
    cfg.step = 2e-3;
    return explore_branching(kp, targets, seed, horizon, cfg);
}

}  // namespace

TEST_CASE("exploration separates all pairs and the clocks are causal") {
    const auto exp = run_small(4.0, 5);
    const int n = static_cast<int>(exp.targets.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            REQUIRE(exp.separation_times.count({i, j}) == 1);
            const double sigma = exp.separation_times.at({i, j});
            REQUIRE(sigma > 0.0);
            REQUIRE(exp.separation_event.count({i, j}) == 1);
        }
    REQUIRE_FALSE(exp.events.empty());
    for (const auto& ev : exp.events) {
        REQUIRE_FALSE(ev.cut_classes.empty());
        REQUIRE(ev.cut_mono.size() == ev.cut_classes.size());
        // stay side and cut classes are disjoint
        for (const auto& cls : ev.cut_classes)
            for (int g : cls)
                REQUIRE(std::find(ev.stayed.begin(), ev.stayed.end(), g) == ev.stayed.end());
    }
}

TEST_CASE("separation is symmetric as an event (same event index both ways)") {
    const auto exp = run_small(4.0, 6);
    for (const auto& [pair, e] : exp.separation_event) {
        const auto rev = std::make_pair(pair.second, pair.first);
        REQUIRE(exp.separation_event.count(rev) == 1);
        REQUIRE(exp.separation_event.at(rev) == e);
    }
}

TEST_CASE("order variables: diagonal one, antisymmetric, transitive") {
    const auto exp = run_small(4.0, 7);
    const auto om = assign_order_variables(exp, 99);
    const int n = static_cast<int>(exp.targets.size());
    for (int i = 0; i < n; ++i) {
        REQUIRE(om.entries.at({i, i}) == 1);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int uij = om.entries.at({i, j});
            const int uji = om.entries.at({j, i});
            REQUIRE((uij == 0 || uij == 1));
            // strict comparison on distinct keys: exactly one direction
            if (uij + uji != 1) {
                // equal keys mean the pair was never split into distinct classes,
                // which contradicts separation bookkeeping
                FAIL("non-antisymmetric order for pair (" << i << "," << j << ")");
            }
        }
    }
    // transitivity on all triples
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j || j == k || i == k) continue;
                if (om.entries.at({i, j}) == 1 && om.entries.at({j, k}) == 1)
                    REQUIRE(om.entries.at({i, k}) == 1);
            }
}

TEST_CASE("order variables are exchangeable in distribution (two targets)") {
    int ones = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        const auto exp = run_small(4.0, 1000 + static_cast<std::uint64_t>(t),
                                   {complex(0.3, 0.0), complex(-0.3, 0.0)});
        const auto om = assign_order_variables(exp, 2000 + static_cast<std::uint64_t>(t));
        ones += om.entries.at({0, 1});
    }
    // Binomial(60, 1/2): a count outside [15, 45] is a > 5-sigma deviation
    REQUIRE(ones >= 15);
    REQUIRE(ones <= 45);
}

TEST_CASE("color readout applies only above kappa' = 4 and is consistent") {
    const auto exp4 = run_small(4.0, 8, {complex(0.3, 0.0), complex(-0.3, 0.0)});
    REQUIRE_THROWS_AS(order_from_colors(exp4, exp4.targets[0], exp4.targets[1]), ConfigError);

    int readable = 0, trials = 0;
    for (std::uint64_t s = 0; s < 12 && readable < 4; ++s) {
        const auto exp = run_small(4.5, 300 + s, {complex(0.3, 0.0), complex(-0.3, 0.0)});
        if (!exp.separation_event.count({0, 1})) continue;
        ++trials;
        try {
            const int u01 = order_from_colors(exp, exp.targets[0], exp.targets[1]);
            const int u10 = order_from_colors(exp, exp.targets[1], exp.targets[0]);
            REQUIRE((u01 == 0 || u01 == 1));
            REQUIRE(u01 + u10 == 1);
            ++readable;
        } catch (const ColorAmbiguity&) {
            // ambiguous pinches are allowed, but not all of them
        }
    }
    REQUIRE(trials > 0);
    REQUIRE(readable > 0);
}

TEST_CASE("nested loops alternate orientation and accumulate clock") {
    ExplorationConfig cfg;
    cfg.step = 2e-3;
    const complex target(0.0, 0.0);
    const auto exp = explore_branching(4.0, {target}, 17, 2000.0, cfg);
    const auto loops = extract_loops(exp, target, 2);
    REQUIRE(loops.size() == 2);
    REQUIRE(loops[0].counterclockwise);
    REQUIRE_FALSE(loops[1].counterclockwise);
    REQUIRE(loops[0].tau0 < loops[0].tau);
    REQUIRE(loops[0].tau <= loops[1].tau0 + 1e-9);
    // every traced point lies in the closed unit disk
    for (const auto& lv : loops) {
        REQUIRE_FALSE(lv.loop.empty());
        REQUIRE_FALSE(lv.bubble.empty());
        for (const auto& q : lv.loop) REQUIRE(std::abs(q) <= 1.0 + 1e-6);
        for (const auto& q : lv.bubble) REQUIRE(std::abs(q) <= 1.0 + 1e-6);
    }
    // for the centered target the -log CR clock equals the chain duration
    REQUIRE(loops[0].neg_log_cr == Catch::Approx(loops[0].tau).margin(1e-3));

    REQUIRE_THROWS_AS(extract_loops(exp, complex(0.9, 0.9), 1), ConfigError);
}
