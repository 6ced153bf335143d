// Half-plane / cone excursions, ancestor-free times, jump ledgers, cell
// masses, and the gap-duration exponent.
#include <catch2/catch_amalgamated.hpp>

#include "disklab/mating.hpp"
#include "disklab/stats.hpp"

using namespace disklab;

TEST_CASE("cone geometry constants") {
    REQUIRE(cone_angle_phi(0.0) == Catch::Approx(pi));
    REQUIRE(a_eps_of(0.0) == 0.0);
    REQUIRE(x_variance_of(0.0) == Catch::Approx(pi));
    // variance is continuous down to eps = 0
    REQUIRE(x_variance_of(1e-4) == Catch::Approx(pi).margin(1e-2));
    const double eps = 0.3, phi = cone_angle_phi(eps);
    REQUIRE(sq(a_eps_of(eps)) ==
            Catch::Approx((1.0 + std::cos(phi)) / (1.0 - std::cos(phi))));
}

TEST_CASE("half-plane excursion anchors and positivity") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto x = sample_half_plane_excursion(100 + s);
        REQUIRE(x.x.front() == Catch::Approx(0.0));
        REQUIRE(x.y.front() == Catch::Approx(1.0));
        REQUIRE(x.x.back() == Catch::Approx(0.0));
        REQUIRE(x.y.back() == Catch::Approx(0.0).margin(1e-12));
        for (double v : x.x) REQUIRE(v >= -1e-12);
    }
}

TEST_CASE("half-plane duration law: reciprocal is exponential of mean 2 pi") {
    std::vector<double> recip;
    Rng rng(42);
    std::vector<double> expo;
    for (int i = 0; i < 3000; ++i) {
        recip.push_back(1.0 / sample_half_plane_excursion(5000 + i).duration());
        expo.push_back(rng.exponential(1.0 / two_pi));
    }
    REQUIRE(ks_two_sample(recip, expo, 0.01).pass);
}

TEST_CASE("duration sampler matches the strip-conditioning oracle") {
    Rng rng(7);
    std::vector<double> oracle, direct;
    for (int i = 0; i < 4000; ++i) {
        oracle.push_back(sample_half_plane_duration_strip_oracle(0.01, rng));
        direct.push_back(1.0 / rng.exponential(1.0 / two_pi));
    }
    const auto rep = ks_two_sample(oracle, direct, 0.01);
    INFO("KS statistic " << rep.statistic << " p " << rep.p_value);
    REQUIRE(rep.pass);
    REQUIRE(rep.statistic < 0.03);
}

TEST_CASE("cone transform round trip and decorrelation") {
    const double eps = 0.25;
    const auto lr = sample_lr_window(eps, 4.0, 1e-3, 9);
    const auto x = cone_transform(lr, eps);
    const auto back = inverse_cone_transform(x, eps);
    for (std::size_t k = 0; k < lr.size(); k += 97) {
        REQUIRE(back.x[k] == Catch::Approx(lr.x[k]).margin(1e-12));
        REQUIRE(back.y[k] == Catch::Approx(lr.y[k]).margin(1e-12));
    }

    // increments of A and B are uncorrelated with variance x_variance_of(eps)
    std::vector<double> da, db;
    for (std::size_t k = 1; k < x.size(); ++k) {
        da.push_back(x.x[k] - x.x[k - 1]);
        db.push_back(x.y[k] - x.y[k - 1]);
    }
    const double va = variance_of(da) / x.step, vb = variance_of(db) / x.step;
    const double v_expect = x_variance_of(eps);
    REQUIRE(va == Catch::Approx(v_expect).epsilon(0.1));
    REQUIRE(vb == Catch::Approx(v_expect).epsilon(0.1));
    double cov = 0.0;
    for (std::size_t k = 0; k < da.size(); ++k) cov += da[k] * db[k];
    cov /= static_cast<double>(da.size());
    REQUIRE(std::abs(cov / (x.step * v_expect)) < 0.1);
}

TEST_CASE("cone excursion starts exactly at (a_eps, 1) and ends at the origin") {
    const double eps = 0.3;
    const auto x = sample_cone_excursion(eps, 0.5, 31);
    REQUIRE(x.x.front() == Catch::Approx(a_eps_of(eps)));
    REQUIRE(x.y.front() == Catch::Approx(1.0));
    REQUIRE(x.x.back() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(x.y.back() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(x.duration() >= 0.5 / sq(2.0));  // rescale divides time by b^2 <= 4
    REQUIRE_THROWS_AS(sample_cone_excursion(0.0, 0.5, 1), ConfigError);
    REQUIRE_THROWS_AS(sample_cone_excursion(0.8, 0.5, 1), ConfigError);
}

TEST_CASE("ancestor-free times: monotone trivial cases") {
    PlanarPath inc;
    inc.step = 1.0;
    inc.epsilon = 0.0;
    inc.x = {0.0, 1.0, 2.0, 3.0};
    inc.y = {0.0, 0.0, 0.0, 0.0};
    const auto s_inc = ancestor_free_times(inc, 3.0);
    for (bool f : s_inc.free_mask) REQUIRE(f);  // nothing later ever dips below
    REQUIRE(s_inc.gaps.empty());

    PlanarPath dec = inc;
    dec.x = {3.0, 2.0, 1.0, 0.0};
    const auto s_dec = ancestor_free_times(dec, 3.0);
    for (std::size_t i = 0; i + 1 < s_dec.free_mask.size(); ++i)
        REQUIRE_FALSE(s_dec.free_mask[i]);  // every time has a later lower value
    REQUIRE(s_dec.free_mask.back());
}

TEST_CASE("production scan equals the quadratic oracle") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        // eps = 0 random walks
        Rng rng(700 + s);
        PlanarPath x;
        x.step = 1e-2;
        x.epsilon = 0.0;
        const std::size_t n = 500 + 100 * s;
        x.x.assign(n + 1, 0.0);
        x.y.assign(n + 1, 0.0);
        for (std::size_t k = 1; k <= n; ++k) {
            x.x[k] = x.x[k - 1] + 0.1 * rng.normal();
            x.y[k] = x.y[k - 1] + 0.1 * rng.normal();
        }
        const auto prod = ancestor_free_times(x, x.duration());
        const auto orac = ancestor_free_oracle_mask(x, x.duration());
        REQUIRE(prod.free_mask == orac);
    }
    for (std::uint64_t s = 0; s < 5; ++s) {
        const double eps = 0.2;
        const auto lr = sample_lr_window(eps, 1.5, 2e-3, 800 + s);
        const auto x = cone_transform(lr, eps);
        const double tol = 1e-3;
        const auto prod = ancestor_free_times(x, x.duration(), tol);
        const auto orac = ancestor_free_oracle_mask(x, x.duration(), tol);
        REQUIRE(prod.free_mask == orac);
    }
}

TEST_CASE("gap bookkeeping: gaps partition covered time, displacements consistent") {
    Rng rng(55);
    PlanarPath x;
    x.step = 1e-3;
    x.epsilon = 0.0;
    const std::size_t n = 20000;
    x.x.assign(n + 1, 0.0);
    x.y.assign(n + 1, 0.0);
    const double vol = std::sqrt(pi * x.step);
    for (std::size_t k = 1; k <= n; ++k) {
        x.x[k] = x.x[k - 1] + vol * rng.normal();
        x.y[k] = x.y[k - 1] + vol * rng.normal();
    }
    const auto s = ancestor_free_times(x, x.duration());
    // the union of gaps and free runs covers [0, t_ref]
    double gap_dur = 0.0;
    for (const auto& g : s.gaps) {
        REQUIRE(g.end > g.begin);
        REQUIRE(g.displacement == Catch::Approx(x.y[g.end] - x.y[g.begin]).margin(1e-15));
        gap_dur += static_cast<double>(g.end - g.begin) * s.step;
    }
    REQUIRE(gap_dur + s.lebesgue_free() ==
            Catch::Approx(s.reference_time).margin(2.0 * s.step));

    // second-coordinate conservation across gaps and free runs
    double recon = x.y[0];
    for (const auto& g : s.gaps) recon += g.displacement;
    for (std::size_t i = 1; i < s.free_mask.size(); ++i)
        if (s.free_mask[i] && s.free_mask[i - 1]) recon += x.y[i] - x.y[i - 1];
    REQUIRE(recon == Catch::Approx(x.y[s.free_mask.size() - 1]).margin(1e-9));
}

TEST_CASE("jump ledger structure") {
    Rng rng(66);
    PlanarPath x;
    x.step = 1e-3;
    x.epsilon = 0.0;
    const std::size_t n = 40000;
    x.x.assign(n + 1, 0.0);
    x.y.assign(n + 1, 0.0);
    const double vol = std::sqrt(pi * x.step);
    for (std::size_t k = 1; k <= n; ++k) {
        x.x[k] = x.x[k - 1] + vol * rng.normal();
        x.y[k] = x.y[k - 1] + vol * rng.normal();
    }
    const auto s = ancestor_free_times(x, x.duration());
    const auto led = local_time_and_jumps(s, x);

    REQUIRE(led.jumps.size() + led.dropped_ties == s.gaps.size());
    REQUIRE(led.finest_stable_delta > 0.0);
    std::size_t star_count = 0;
    for (std::size_t j = 0; j < led.band_delta.size(); ++j)
        if (led.band_delta[j] == led.finest_stable_delta) star_count = led.band_count[j];
    REQUIRE(led.total_local_time ==
            Catch::Approx(led.c * led.finest_stable_delta *
                          static_cast<double>(star_count)));
    // local time is nondecreasing along the ledger
    for (std::size_t k = 1; k < led.jumps.size(); ++k)
        REQUIRE(led.jumps[k].local_time >= led.jumps[k - 1].local_time);
    // signed magnitudes match field conventions
    for (const auto& j : led.jumps) {
        REQUIRE(j.magnitude > 0.0);
        REQUIRE((j.sign == 1 || j.sign == -1));
    }

    AncestorFreeSet tiny;
    tiny.step = 1.0;
    tiny.free_mask = {true, true};
    REQUIRE_THROWS_AS(local_time_and_jumps(tiny, x), ResolutionError);
}

TEST_CASE("cell masses: single crossing run") {
    PlanarPath x;
    x.step = 1.0;
    x.x = {0.0, 1.0, 2.0, 1.0, 0.0};
    x.y = {5.0, 6.0, 7.0, 8.0, 9.0};
    const auto cells = gf_cell_masses(x, 0.5);
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].start == Catch::Approx(0.0));
    REQUIRE(cells[0].end == Catch::Approx(4.0));
    REQUIRE(cells[0].mass == Catch::Approx(9.0 - 5.0));

    const auto none = gf_cell_masses(x, 10.0);
    REQUIRE(none.empty());
}

TEST_CASE("gap-duration exponent near 3/2 at the critical point") {
    const double alpha = estimate_ppp_exponent(0.0, 1000, 2);
    INFO("alpha_hat " << alpha);
    REQUIRE(std::abs(alpha - 1.5) < 0.1);
    REQUIRE_THROWS_AS(estimate_ppp_exponent(0.0, 10, 1), SampleTooSmall);
}
