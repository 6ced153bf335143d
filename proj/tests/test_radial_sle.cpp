// Reflected angle process, excursion decomposition, height-biased Bessel
// excursions, and loop-root randomization.
#include <catch2/catch_amalgamated.hpp>

#include "disklab/radial_sle.hpp"
#include "disklab/stats.hpp"

using namespace disklab;

TEST_CASE("parameter maps") {
    REQUIRE(delta_of_kappa_prime(4.0) == Catch::Approx(1.0));
    REQUIRE(delta_of_kappa_prime(8.0) == Catch::Approx(2.0));
    REQUIRE(kappa_prime_of_epsilon(0.0) == Catch::Approx(4.0));
    REQUIRE(kappa_prime_of_epsilon(0.5) == Catch::Approx(16.0 / 2.25));
}

TEST_CASE("theta stays within the reflected band and respects domain checks") {
    const auto p = simulate_theta(4.5, 1.0, 2.0, 1e-4, 42);
    for (double v : p.values) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= two_pi + 1e-12);
    }
    REQUIRE_THROWS_AS(simulate_theta(3.9, 0.0, 1.0, 1e-4, 1), ConfigError);
    REQUIRE_THROWS_AS(simulate_theta(8.0, 0.0, 1.0, 1e-4, 1), ConfigError);
    // drift/step stiffness guard
    REQUIRE_THROWS_AS(simulate_theta(7.9, 0.0, 1.0, 1e-2, 1), StiffnessError);
}

TEST_CASE("at kappa'=4 the hitting time of the top matches a reflected BM oracle") {
    // zero drift: theta is a reflected Brownian motion with speed sqrt(4)=2
    const int n_samples = 400;
    std::vector<double> sim;
    sim.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const auto p = simulate_theta_until_top(4.0, 0.0, 2e-3, 9000 + i);
        sim.push_back(*p.tau0);
    }
    const auto oracle = reflected_bm_hitting_sample(two_pi, 2.0, n_samples, 77, 2e-3);
    const auto rep = ks_two_sample(sim, oracle, 0.01);
    INFO("KS p-value " << rep.p_value);
    REQUIRE(rep.pass);
}

TEST_CASE("driving from theta splits at barrier returns unless allowed") {
    auto p = simulate_theta(4.0, 1.0, 4.0, 1e-3, 5);
    bool revisits = false;
    for (std::size_t k = 1; k + 1 < p.values.size(); ++k)
        if (p.values[k] < p.reflect_tol) revisits = true;
    if (revisits) REQUIRE_THROWS_AS(driving_from_theta(p, 0.0), CotDivergence);
    REQUIRE_NOTHROW(driving_from_theta(p, 0.0, true));
}

TEST_CASE("excursion decomposition partitions retained time and flags the top hit") {
    const auto p = simulate_theta_until_top(4.0, 0.0, 1e-3, 314);
    const int n = 5;
    const auto dec = excursion_decompose(p, n);
    REQUIRE_FALSE(dec.records.empty());
    const double threshold = std::pow(2.0, -n);
    double total = 0.0;
    for (const auto& r : dec.records) {
        REQUIRE(r.max_height >= threshold);
        total += r.duration();
    }
    REQUIRE(dec.tau_n == Catch::Approx(total));
    REQUIRE(dec.cut_driving.duration == Catch::Approx(total));
    REQUIRE(dec.records[dec.stop_index].reached_top);
    // the top-reaching record is the last retained one
    REQUIRE(dec.stop_index == dec.records.size() - 1);

    // decreasing the threshold (larger n) retains at least as many records
    const auto dec2 = excursion_decompose(p, n + 2);
    REQUIRE(dec2.records.size() >= dec.records.size());
    REQUIRE(dec2.tau_n >= dec.tau_n - 1e-9);

    REQUIRE_THROWS_AS(excursion_decompose(p, 12), ResolutionError);  // 2^-12 < step
    auto q = simulate_theta(4.0, 0.0, 0.5, 1e-3, 3);
    if (!q.tau0) REQUIRE_THROWS_AS(excursion_decompose(q, 4), ConfigError);
}

TEST_CASE("bessel excursion maxima follow the height-biased law") {
    // P(X > x | X > m) = (x/m)^(delta-2)  =>  (m/X)^(2-delta) ~ Uniform(0,1)
    const double delta = 1.5, m = 0.1, top = 1e9;
    std::vector<double> u;
    for (int i = 0; i < 2000; ++i) {
        const auto rec = sample_bessel_excursion(delta, m, top, 500 + i);
        u.push_back(std::pow(m / rec.max_height, 2.0 - delta));
    }
    Rng rng(1234);
    std::vector<double> uniforms;
    for (int i = 0; i < 2000; ++i) uniforms.push_back(rng.uniform());
    REQUIRE(ks_two_sample(u, uniforms, 0.01).pass);
}

TEST_CASE("bessel excursion shape invariants") {
    const auto rec = sample_bessel_excursion(1.2, 0.3, 1.0, 99);
    REQUIRE(rec.values.front() == Catch::Approx(0.0));
    double peak = 0.0;
    for (double v : rec.values) {
        REQUIRE(v >= 0.0);
        peak = std::max(peak, v);
    }
    REQUIRE(peak == Catch::Approx(rec.max_height));
    if (!rec.reached_top) REQUIRE(rec.values.back() == Catch::Approx(0.0));
    REQUIRE_THROWS_AS(sample_bessel_excursion(2.0, 0.1, 1.0, 1), BadDimension);
    REQUIRE_THROWS_AS(sample_bessel_excursion(0.9, 0.1, 1.0, 1), BadDimension);
    REQUIRE_THROWS_AS(sample_bessel_excursion(1.5, 1.0, 0.5, 1), ConfigError);
}

TEST_CASE("loop roots are independent uniforms on the circle") {
    std::vector<double> roots;
    for (int i = 0; roots.size() < 600; ++i) {
        const auto r = uniform_cle4_driving(4, 64.0, 1e-3, 7000 + i);
        roots.insert(roots.end(), r.roots.begin(), r.roots.end());
    }
    REQUIRE(chi2_uniform_angles(roots, 16, 0.01).pass);
}

TEST_CASE("uniformization phase sampler produces angles and respects the grid") {
    const double ph = sample_uniformization_phase(0.4, 6, 11);
    REQUIRE(ph >= 0.0);
    REQUIRE(ph < two_pi);
    // different seeds decorrelate
    const double ph2 = sample_uniformization_phase(0.4, 6, 12);
    REQUIRE(ph != ph2);
}
