#include <doctest.h>

#include "hyperstab/error.hpp"
#include "hyperstab/system.hpp"

#include <cmath>

using namespace hyperstab;

TEST_CASE("validate_system accepts ordered constant speeds") {
    const auto sys = HyperbolicSystem::with_constant_speeds({-2, -1, 1}, 2);
    CHECK(validate_system(sys, Grid(16)).valid());
}

TEST_CASE("validate_system rejects equal negative speeds") {
    const auto sys = HyperbolicSystem::with_constant_speeds({-1, -1, 1}, 2);
    const auto report = validate_system(sys, Grid(16));
    REQUIRE_FALSE(report.valid());
    CHECK(report.violations.front().node == 0);
    CHECK(report.violations.front().component == 1);
    CHECK(report.violations.front().other == 2);
    CHECK_THROWS_AS(ensure_valid(sys, Grid(16)), ValidationError);
}

TEST_CASE("validate_system rejects a sign change inside the negative block") {
    auto sys = HyperbolicSystem::with_constant_speeds({-1, -0.5, 1}, 2);
    sys.speeds[1] = Profile::affine(-0.5, 1.0);  // x - 0.5
    const auto report = validate_system(sys, Grid(16));
    REQUIRE_FALSE(report.valid());
    const auto& first = report.violations.front();
    CHECK(first.component == 2);
    CHECK(first.node == 8);  // x = 0.5
}

TEST_CASE("validate_system rejects degenerate block sizes") {
    CHECK_FALSE(validate_system(HyperbolicSystem::with_constant_speeds({-2, -1}, 2), Grid(8)).valid());
    CHECK_FALSE(validate_system(HyperbolicSystem::with_constant_speeds({1, 2}, 0), Grid(8)).valid());
    CHECK_FALSE(validate_system(HyperbolicSystem::with_constant_speeds({-1}, 1), Grid(8)).valid());
}

TEST_CASE("grid rejects fewer than eight cells") {
    CHECK_THROWS_AS(Grid(7), ValidationError);
    const Grid g(8);
    CHECK(g.size() == 9);
    CHECK(g.weights()[0] == doctest::Approx(1.0 / 16));
}

TEST_CASE("phi on constant and affine speeds") {
    auto sys = HyperbolicSystem::with_constant_speeds({-2, -1.5, 1}, 2);
    const Grid grid(64);
    CHECK(phi(sys, grid, 1, 1.0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(phi(sys, grid, 1, 0.0) == 0.0);
    CHECK(phi(sys, grid, 2, 0.0) == 0.0);
    CHECK_THROWS_AS(phi(sys, grid, 3, 0.5), ValidationError);

    // lambda_2 = -1 - x, lambda_1 = -3 - x keeps the ordering
    sys.speeds[0] = Profile::affine(-3, -1);
    sys.speeds[1] = Profile::affine(-1, -1);
    const double h = grid.spacing();
    // trapezoid error bound h^2/12 * max|f''| with f = -1/(1+x), |f''| <= 2
    CHECK(std::abs(phi(sys, grid, 2, 1.0) + std::log(2.0)) <= h * h / 6);
}

TEST_CASE("phi_inverse inverts phi") {
    auto sys = HyperbolicSystem::with_constant_speeds({-2, -1, 1}, 2);
    const Grid grid(32);
    CHECK(*phi_inverse(sys, grid, 2, -0.3) == doctest::Approx(0.3).epsilon(1e-11));
    CHECK(*phi_inverse(sys, grid, 2, 0.0) == doctest::Approx(0.0).epsilon(1e-11));
    CHECK_FALSE(phi_inverse(sys, grid, 2, 0.1).has_value());
    CHECK_FALSE(phi_inverse(sys, grid, 2, -1.1).has_value());

    sys.speeds[0] = Profile::affine(-3, -1);
    sys.speeds[1] = Profile::affine(-1, -1);
    const TravelTime tt(sys.speed(2), grid);
    CHECK(*tt.inverse(tt.total()) == doctest::Approx(1.0).epsilon(1e-11));
    // analytic inverse of -ln(1+x) is reached up to quadrature error
    CHECK(*phi_inverse(sys, Grid(512), 2, -std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("travel time is strictly decreasing and round trips at every node") {
    const Grid grid(100);
    for (const auto& speed : {Profile::constant(-0.7), Profile::affine(-1, -2), Profile::polynomial({-1, 0.3, -0.5, 0.1}),
                              Profile::tabulated({-1, -2, -1.5, -0.5, -3})}) {
        const TravelTime tt(speed, grid);
        const auto nodes = tt.nodes();
        for (int k = 0; k < grid.cells(); ++k) CHECK(nodes[k + 1] < nodes[k]);
        for (int k = 0; k < grid.size(); ++k) {
            const auto x = tt.inverse(nodes[k]);
            REQUIRE(x.has_value());
            CHECK(std::abs(*x - grid.node(k)) <= 1e-10);
        }
    }
}

TEST_CASE("control times for constant speeds") {
    const Grid grid(64);
    const auto s3 = HyperbolicSystem::with_constant_speeds({-2, -1, 1}, 2);
    CHECK(std::abs(optimal_time(s3, grid) - 2.0) <= 1e-12);
    CHECK(std::abs(naive_time(s3, grid) - 2.5) <= 1e-12);

    const auto two = HyperbolicSystem::with_constant_speeds({-1, 1}, 1);
    CHECK(std::abs(optimal_time(two, grid) - 2.0) <= 1e-12);
    CHECK(naive_time(two, grid) == optimal_time(two, grid));

    const auto four = HyperbolicSystem::with_constant_speeds({-4, -2, -1, 1}, 3);
    CHECK(std::abs(naive_time(four, grid) - 2.75) <= 1e-12);
    CHECK(std::abs(optimal_time(four, grid) - 2.0) <= 1e-12);
}

TEST_CASE("optimal time with an affine positive speed") {
    auto sys = HyperbolicSystem::with_constant_speeds({-1, 1}, 1);
    sys.speeds[1] = Profile::affine(1, 1);
    CHECK(std::abs(optimal_time(sys, Grid(1024)) - (1 + std::log(2.0))) <= 1e-8);
}

TEST_CASE("naive minus optimal is the sum of the faster negative transits") {
    auto sys = HyperbolicSystem::with_constant_speeds({-3, -2, -1, 0.5, 2}, 3);
    sys.speeds[0] = Profile::affine(-3, -1);
    sys.speeds[3] = Profile::affine(0.5, 0.25);
    const Grid grid(50);
    const double gap = naive_time(sys, grid) - optimal_time(sys, grid);
    CHECK(gap == doctest::Approx(transit_time(sys.speed(1), grid) + transit_time(sys.speed(2), grid)));
    CHECK(gap > 0);
}

TEST_CASE("quadrature converges at second order or better for affine speeds") {
    auto sys = HyperbolicSystem::with_constant_speeds({-2, -1, 1}, 2);
    sys.speeds[0] = Profile::affine(-3, -1);
    sys.speeds[1] = Profile::affine(-1, -1);
    sys.speeds[2] = Profile::affine(1, 1);
    const double ln2 = std::log(2.0);
    for (int n = 8; n <= 64; n *= 2) {
        const double e_phi = std::abs(phi(sys, Grid(n), 2, 1.0) + ln2);
        const double e_phi2 = std::abs(phi(sys, Grid(2 * n), 2, 1.0) + ln2);
        CHECK(e_phi / e_phi2 >= 3.5);
        const double e_t = std::abs(optimal_time(sys, Grid(n)) - 2 * ln2);
        const double e_t2 = std::abs(optimal_time(sys, Grid(2 * n)) - 2 * ln2);
        CHECK(e_t / e_t2 >= 3.5);
    }
}
