// Radial Loewner engine: parameterization, monotonicity, inversion,
// Caratheodory distance, and bubble-map composition.
#include <catch2/catch_amalgamated.hpp>

#include "disklab/loewner.hpp"
#include "disklab/radial_sle.hpp"

using namespace disklab;

namespace {

// Random piecewise-constant driving with Brownian-like increments.
DrivingProcess random_driving(double t_max, double step, std::uint64_t seed,
                              double speed = 2.0) {
    Rng rng(seed);
    DrivingProcess d;
    d.step = step;
    d.duration = t_max;
    const auto n = static_cast<std::size_t>(std::llround(t_max / step));
    d.angles.resize(n + 1);
    d.angles[0] = rng.uniform(0.0, two_pi);
    for (std::size_t k = 1; k <= n; ++k)
        d.angles[k] = d.angles[k - 1] + speed * std::sqrt(step) * rng.normal();
    return d;
}

// Numerical |g_t'(0)| via Richardson-extrapolated central differences on
// tracked points at +-zeta, +-2 zeta (independent of the chain's stored
// log_deriv0 identity).
double numeric_center_log_deriv(const DomainChain& chain, double t, double zeta = 1e-3) {
    const auto k = chain.grid_index(t);
    auto at = [&](std::size_t p) { return chain.tracked[p].traj[k]; };
    const complex d1 = (at(0) - at(1)) / (2.0 * zeta);        // +-zeta
    const complex d2 = (at(2) - at(3)) / (4.0 * zeta);        // +-2 zeta
    return std::log(std::abs((4.0 * d1 - d2) / 3.0));
}

}  // namespace

TEST_CASE("center derivative matches the -log CR clock numerically") {
    const double zeta = 1e-3;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto drv = random_driving(1.0, 1e-3, 100 + s);
        const std::vector<complex> pts{zeta, -zeta, 2.0 * zeta, -2.0 * zeta};
        const auto chain = solve_radial_loewner(drv, pts, 1.0);
        for (double t : {0.25, 0.5, 1.0}) {
            REQUIRE(std::abs(numeric_center_log_deriv(chain, t, zeta) - t) < 1e-4);
        }
    }
}

TEST_CASE("tracked modulus is nondecreasing and stays in the disk") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto drv = random_driving(1.0, 1e-3, 200 + s);
        Rng rng(300 + s);
        std::vector<complex> pts;
        for (int i = 0; i < 8; ++i)
            pts.push_back(std::polar(rng.uniform(0.1, 0.9), rng.uniform(0.0, two_pi)));
        const auto chain = solve_radial_loewner(drv, pts, 1.0);
        for (const auto& tp : chain.tracked) {
            double prev = std::abs(tp.z0);
            for (std::size_t k = 0; k < tp.traj.size(); ++k) {
                if (tp.swallow_time && static_cast<double>(k) * drv.step > *tp.swallow_time)
                    break;
                const double m = std::abs(tp.traj[k]);
                REQUIRE(m <= 1.0 + 1e-6);  // integrator slack just before a swallow
                REQUIRE(m >= prev - 1e-8);
                prev = m;
            }
        }
    }
}

TEST_CASE("conformal radius of the center is exactly e^{-t}") {
    const auto drv = DrivingProcess::constant(1.3, 0.7, 1e-3);
    const auto chain = solve_radial_loewner(drv, {}, 0.7);
    REQUIRE(conformal_radius(chain, 0.0) == Catch::Approx(1.0));
    REQUIRE(conformal_radius(chain, 0.7) == Catch::Approx(std::exp(-0.7)));
    REQUIRE_THROWS_AS(conformal_radius(chain, 0.8), HorizonExceeded);
}

TEST_CASE("conformal radius seen from an interior point shrinks") {
    const auto drv = random_driving(0.8, 1e-3, 404);
    const complex z(0.25, -0.1);
    const auto chain = solve_radial_loewner(drv, {z}, 0.8);
    const double cr0 = conformal_radius_at(chain, 0, 0.0);
    REQUIRE(cr0 == Catch::Approx(1.0 - std::norm(z)));
    double prev = cr0;
    for (double t = 0.1; t <= 0.8 + 1e-12; t += 0.1) {
        const double cr = conformal_radius_at(chain, 0, t);
        REQUIRE(cr <= prev + 1e-9);
        prev = cr;
    }
}

TEST_CASE("a point at the driving root is swallowed immediately") {
    const auto drv = DrivingProcess::constant(0.0, 0.3, 1e-3);
    const auto chain = solve_radial_loewner(drv, {complex(0.999999, 0.0)}, 0.3);
    REQUIRE(chain.tracked[0].swallow_time.has_value());
}

TEST_CASE("Newton and reverse-flow inverses agree and invert the forward map") {
    const auto drv = random_driving(0.6, 1e-3, 505);
    const complex z0(0.3, 0.25);
    const auto chain = solve_radial_loewner(drv, {z0}, 0.6);
    REQUIRE_FALSE(chain.tracked[0].swallow_time.has_value());
    const complex gz = chain.tracked[0].traj.back();

    const complex back_newton = inverse_map(chain, gz, 0.6, z0);
    REQUIRE(std::abs(back_newton - z0) < 1e-7);

    const complex back_flow = detail::invert_by_flow(chain, gz, 0.6);
    REQUIRE(std::abs(back_flow - z0) < 1e-5);
}

TEST_CASE("reverse flow inverts even near the driving singularity") {
    const auto drv = random_driving(0.5, 1e-3, 606);
    const auto chain = solve_radial_loewner(drv, {}, 0.5);
    // Query very close to the current driving point, where Newton from a cold
    // seed tends to stall.
    const complex q = 0.98 * drv.at(0.5 - 1e-9);
    const complex w = inverse_map(chain, q, 0.5);
    auto [g, gd] = detail::flow_point(chain, w, 0.5);
    REQUIRE(std::abs(g - q) < 1e-5);
}

TEST_CASE("Caratheodory distance: identical chains at zero, perturbed chains close") {
    const auto a = solve_radial_loewner(random_driving(0.5, 1e-3, 707), {}, 0.5);
    REQUIRE(caratheodory_distance(a, a, 0.8, 0.5) == Catch::Approx(0.0).margin(1e-12));

    auto drv_b = random_driving(0.5, 1e-3, 707);
    for (auto& ang : drv_b.angles) ang += 1e-4;
    const auto b = solve_radial_loewner(drv_b, {}, 0.5);
    const double d = caratheodory_distance(a, b, 0.8, 0.5);
    REQUIRE(d > 0.0);
    REQUIRE(d < 0.05);

    auto drv_c = random_driving(0.5, 1e-3, 909);
    const auto c = solve_radial_loewner(drv_c, {}, 0.5);
    REQUIRE(caratheodory_distance(a, c, 0.8, 0.5) > d);
}

TEST_CASE("bubble composition concatenates drivings and adds -log CR clocks") {
    BubbleMap b1{random_driving(0.3, 1e-3, 111)};
    BubbleMap b2{random_driving(0.5, 1e-3, 222)};
    const auto chain = compose_bubble_maps({b1, b2});
    REQUIRE(chain.horizon == Catch::Approx(0.8));
    REQUIRE(conformal_radius(chain, 0.8) == Catch::Approx(std::exp(-0.8)));

    // composed map evaluated at a point == sequential evaluation
    const complex z(0.2, 0.1);
    const auto c1 = solve_radial_loewner(b1.driving, {z}, 0.3);
    const complex mid = c1.tracked[0].traj.back();
    const auto c2 = solve_radial_loewner(b2.driving, {mid}, 0.5);
    const auto cc = solve_radial_loewner(chain.driving, {z}, 0.8);
    REQUIRE(std::abs(cc.tracked[0].traj.back() - c2.tracked[0].traj.back()) < 1e-9);
}

TEST_CASE("composition rejects non-contractive segments") {
    BubbleMap empty;
    empty.driving.step = 1e-3;
    empty.driving.duration = 0.0;
    empty.driving.angles = {0.0};
    REQUIRE_THROWS_AS(compose_bubble_maps({empty}), NotContractive);
}

TEST_CASE("invalid drivings are rejected") {
    DrivingProcess bad;
    bad.step = -1.0;
    bad.angles = {0.0, 0.1};
    REQUIRE_THROWS_AS(bad.validate(), InvalidDriving);
    DrivingProcess nan_drv = DrivingProcess::constant(0.0, 0.1, 1e-3);
    nan_drv.angles[3] = std::nan("");
    REQUIRE_THROWS_AS(nan_drv.validate(), InvalidDriving);
}
