// Statistical helpers: self-consistency against synthetic data with known
// distributions.
#include <catch2/catch_amalgamated.hpp>

#include "disklab/stats.hpp"

using namespace disklab;

TEST_CASE("two-sample KS accepts same-law samples and rejects different laws") {
    Rng rng(1);
    std::vector<double> a, b, c;
    for (int i = 0; i < 3000; ++i) {
        a.push_back(rng.normal());
        b.push_back(rng.normal());
        c.push_back(rng.normal() + 0.4);
    }
    REQUIRE(ks_two_sample(a, b, 0.01).pass);
    REQUIRE_FALSE(ks_two_sample(a, c, 0.01).pass);
    REQUIRE_THROWS_AS(ks_two_sample({}, {1.0}), EmptySample);
}

TEST_CASE("empirical characteristic function magnitude with bootstrap CI") {
    Rng rng(2);
    std::vector<double> uni;
    for (int i = 0; i < 5000; ++i) uni.push_back(rng.uniform(0.0, two_pi));
    const auto r = empirical_cf(uni, 1.0, 200, 3);
    // |E e^{iU}| = 0 for uniform angles; ecf magnitude ~ 1/sqrt(n)
    REQUIRE(r.magnitude < 0.05);
    REQUIRE(r.mag_ci_lo <= r.mag_ci_hi);
    REQUIRE(r.mag_ci_hi < 0.08);

    std::vector<double> degenerate(5000, 0.7);
    REQUIRE(empirical_cf(degenerate, 1.0, 50, 4).magnitude == Catch::Approx(1.0));
}

TEST_CASE("tail exponent fit recovers a known Pareto index") {
    // the [q_lo, q_hi] window of a Pareto(alpha) spans log10(q_lo/(1-q_hi))/alpha
    // decades, so pick the requested width accordingly
    struct Case {
        double alpha, decades;
    };
    for (const Case c : {Case{0.5, 2.0}, Case{1.2, 1.2}}) {
        Rng rng(static_cast<std::uint64_t>(10 * c.alpha));
        std::vector<double> pareto;
        for (int i = 0; i < 40000; ++i)
            pareto.push_back(std::pow(rng.uniform(), -1.0 / c.alpha));
        const auto fit = tail_exponent_fit(pareto, c.decades, 0.5, 0.995, 100, 5);
        INFO("alpha " << c.alpha << " fit " << fit.exponent);
        REQUIRE(std::abs(fit.exponent - c.alpha) < 0.1);
        REQUIRE(fit.ci_lo < c.alpha + 0.1);
        REQUIRE(fit.ci_hi > c.alpha - 0.1);
    }
    REQUIRE_THROWS_AS(tail_exponent_fit({1.0, 2.0}, 2.0), SampleTooSmall);
    std::vector<double> flat(2000, 1.0);
    REQUIRE_THROWS_AS(tail_exponent_fit(flat, 2.0), RangeError);
}

TEST_CASE("chi-square angle uniformity") {
    Rng rng(6);
    std::vector<double> uni, clustered;
    for (int i = 0; i < 4000; ++i) {
        uni.push_back(rng.uniform(0.0, two_pi));
        clustered.push_back(wrap_angle(0.3 * rng.normal()));
    }
    REQUIRE(chi2_uniform_angles(uni, 32, 0.01).pass);
    REQUIRE_FALSE(chi2_uniform_angles(clustered, 32, 0.01).pass);
}

TEST_CASE("reflected BM hitting-time sample matches the scaling property") {
    // tau(L, speed) =d (L/speed)^2 tau(1, 1): compare rescaled samples by KS
    const auto a = reflected_bm_hitting_sample(1.0, 1.0, 1500, 7, 1e-4);
    auto b = reflected_bm_hitting_sample(2.0, 1.0, 1500, 8, 4e-4);
    for (double& v : b) v /= 4.0;
    REQUIRE(ks_two_sample(a, b, 0.01).pass);
}

TEST_CASE("binomial consistency band") {
    // 200 trials at level 0.01: 2 expected failures; 0..? consistent, 20 not
    REQUIRE(binomial_consistent(2, 200, 0.01));
    REQUIRE(binomial_consistent(0, 200, 0.01));
    REQUIRE_FALSE(binomial_consistent(20, 200, 0.01));
}
