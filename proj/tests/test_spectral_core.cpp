#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "qcarpet/qcarpet.hpp"
#include "oracles.hpp"

using namespace qcarpet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("well configuration is validated", "[well]") {
    REQUIRE_NOTHROW(WellConfig{1.0, 1.0, 0.0});
    REQUIRE_THROWS_AS((WellConfig{0.0, 1.0, 0.0}), validation_error);
    REQUIRE_THROWS_AS((WellConfig{-2.0, 1.0, 0.0}), validation_error);
    REQUIRE_THROWS_AS((WellConfig{1.0, 0.0, 0.0}), validation_error);
    double nan = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS((WellConfig{nan, 1.0, 0.0}), validation_error);
    REQUIRE_THROWS_AS((WellConfig{1.0, 1.0, nan}), validation_error);
}

TEST_CASE("revival time value and scaling", "[well]") {
    WellConfig w1{1.0, 1.0, 0.0};
    REQUIRE_THAT(w1.revival_time(), WithinRel(oracles::kRevivalTimeL1, 1e-15));
    WellConfig w2{2.0, 1.0, 0.0};
    REQUIRE(w2.revival_time() == 4.0 * w1.revival_time());
    WellConfig wh{1.0, 2.0, 0.0};
    REQUIRE(wh.revival_time() == 0.5 * w1.revival_time());
}

TEST_CASE("aperture validation and placement", "[well]") {
    REQUIRE_THROWS_AS((SlitAperture{0.0, 0.0}), validation_error);
    REQUIRE_THROWS_AS((SlitAperture{0.0, -0.1}), validation_error);
    double nan = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS((SlitAperture{nan, 0.1}), validation_error);
    SlitAperture s{0.245, 0.01};
    REQUIRE_THAT(s.lo(), WithinAbs(0.24, 1e-16));
    REQUIRE_THAT(s.hi(), WithinAbs(0.25, 1e-16));
    WellConfig well{1.0, 1.0, 0.0};
    REQUIRE_NOTHROW(require_slit_in_well(well, s));
    REQUIRE_THROWS_AS(require_slit_in_well(well, SlitAperture{0.6, 0.01}), validation_error);
    // a window touching a wall is rejected: strict interior required
    REQUIRE_THROWS_AS(require_slit_in_well(well, SlitAperture{0.495, 0.01}), validation_error);
}

TEST_CASE("eigenfunction point values", "[well]") {
    WellConfig well{1.0, 1.0, 0.0};
    REQUIRE_THAT(eigenfunction(1, 0.0, well), WithinRel(std::sqrt(2.0), 1e-15));
    REQUIRE(eigenfunction(2, 0.0, well) == 0.0);
    REQUIRE_THAT(eigenfunction(3, 0.25, well), WithinAbs(1.0, 1e-14));
    for (int n = 1; n <= 50; ++n) {
        REQUIRE(eigenfunction(n, 0.5, well) == 0.0);
        REQUIRE(eigenfunction(n, -0.5, well) == 0.0);
    }
    REQUIRE_THROWS_AS(eigenfunction(0, 0.0, well), std::domain_error);
    REQUIRE_THROWS_AS(eigenfunction(1, 0.51, well), std::domain_error);
    REQUIRE_THROWS_AS(eigenfunction(1, -0.51, well), std::domain_error);
}

TEST_CASE("eigenfunctions are orthonormal under independent quadrature", "[well]") {
    WellConfig well{1.0, 1.0, 0.0};
    const int picks[] = {1, 2, 3, 5, 8, 13, 21, 34, 50};
    const auto& rule = num::gauss_legendre(12);
    const int panels = 64;
    for (int n : picks) {
        for (int m : picks) {
            num::kahan acc;
            for (int p = 0; p < panels; ++p) {
                double lo = -0.5 + (double)p / panels;
                double hw = 0.5 / panels;
                for (std::size_t i = 0; i < rule.x.size(); ++i) {
                    double y = lo + hw * (rule.x[i] + 1.0);
                    acc.add(rule.w[i] * hw * eigenfunction(n, y, well) *
                            eigenfunction(m, y, well));
                }
            }
            double target = (n == m) ? 1.0 : 0.0;
            REQUIRE_THAT(acc.sum(), WithinAbs(target, 1e-10));
        }
    }
    // cross-check low modes against long-double Simpson quadrature
    for (int n = 1; n <= 8; ++n) {
        for (int m = n; m <= 8; ++m) {
            auto f = [&](long double y) {
                return (long double)eigenfunction(n, (double)y, well) *
                       (long double)eigenfunction(m, (double)y, well);
            };
            long double v = oracles::simpson(f, -0.5L, 0.5L, 16384);
            long double target = (n == m) ? 1.0L : 0.0L;
            REQUIRE(fabsl(v - target) <= 1e-12L);
        }
    }
}

TEST_CASE("mode frequencies", "[well]") {
    WellConfig well{1.0, 1.0, 0.0};
    REQUIRE_THAT(eigenenergy(1, well), WithinRel(0.5 * num::pi * num::pi, 1e-15));
    REQUIRE(eigenenergy(2, well) == 4.0 * eigenenergy(1, well));
    WellConfig wide{50.0, 1.0, 0.0};
    REQUIRE_THAT(eigenenergy(500, wide), WithinRel(oracles::kFiftyPiSq, 1e-14));
    REQUIRE_THROWS_AS(eigenenergy(0, well), std::domain_error);
    REQUIRE_THROWS_AS(eigenenergy(-3, well), std::domain_error);
}

TEST_CASE("window coefficients match frozen references", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    auto c = slit_coefficients(well, slit, 10);
    REQUIRE(c.order() == 10);
    REQUIRE_THAT(c.c(1), WithinRel(oracles::kC1, 1e-14));
    REQUIRE_THAT(c.c(2), WithinRel(oracles::kC2, 1e-14));
    REQUIRE_THAT(c.c(7), WithinRel(oracles::kC7, 1e-14));
    REQUIRE_THROWS_AS(slit_coefficients(well, slit, 0), validation_error);
}

TEST_CASE("centered window kills even modes exactly", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    auto c = slit_coefficients(well, SlitAperture{0.0, 0.17}, 1000);
    for (int n = 2; n <= 1000; n += 2) REQUIRE(c.c(n) == 0.0);
}

TEST_CASE("near-full window approaches the open-well overlap", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    double a = 0.999999;
    auto c = slit_coefficients(well, SlitAperture{0.0, a}, 2001);
    for (int n = 1; n <= 9; n += 2) {
        // flat unit window: c_n -> 2 sqrt(2) / (n pi) for every odd n
        double s = num::sinpi(0.5 * n);
        double target = 2.0 * std::sqrt(2.0) / (n * num::pi) * s * s;
        REQUIRE_THAT(c.c(n), WithinAbs(target, 2e-5));
    }
    for (int n = 2; n <= 2000; n += 2) REQUIRE(c.c(n) == 0.0);
    REQUIRE(parseval_deficit(c) <= 1e-3);
}

TEST_CASE("norm deficit matches frozen references and shrinks", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    auto big = slit_coefficients(well, slit, 50000);
    auto at = [&](int N) {
        ModalCoefficients part;
        part.values.assign(big.values.begin(), big.values.begin() + N);
        return parseval_deficit(part);
    };
    REQUIRE_THAT(at(100), WithinRel(oracles::kDeficitN100, 2e-9));
    REQUIRE_THAT(at(1000), WithinRel(oracles::kDeficitN1000, 2e-9));
    REQUIRE_THAT(at(10000), WithinRel(oracles::kDeficitN10000, 2e-9));
    REQUIRE_THAT(at(50000), WithinRel(oracles::kDeficitN50000, 2e-9));
    REQUIRE(at(100) > at(1000));
    REQUIRE(at(1000) > at(10000));
    REQUIRE(at(10000) > at(50000));
    // partial norms are nondecreasing and never exceed unity
    num::kahan run;
    double prev = 0.0;
    for (double v : big.values) {
        run.add(v * v);
        REQUIRE(run.sum() >= prev);
        prev = run.sum();
    }
    REQUIRE(run.sum() <= 1.0 + 1e-12);
    // floored at zero when a vector over-counts
    ModalCoefficients over;
    over.values = {1.0000001};
    REQUIRE(parseval_deficit(over) == 0.0);
}

TEST_CASE("coefficients are invariant under uniform rescaling", "[coefficients]") {
    WellConfig w1{1.0, 1.0, 0.0};
    SlitAperture s1{0.245, 0.01};
    double s = 2.7;
    WellConfig w2{s * 1.0, 1.0, 0.0};
    SlitAperture s2{s * 0.245, s * 0.01};
    auto c1 = slit_coefficients(w1, s1, 1000);
    auto c2 = slit_coefficients(w2, s2, 1000);
    for (int n = 1; n <= 1000; ++n)
        REQUIRE_THAT(c2.c(n), WithinAbs(c1.c(n), 1e-12));
}

TEST_CASE("quadrature coefficients match the closed form", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    auto closed = slit_coefficients(well, slit, 1000);
    auto quad = coefficients_by_quadrature(well, CollapseProfile::rectangular(slit), 1000);
    double worst = 0.0;
    for (int n = 1; n <= 1000; ++n)
        worst = std::max(worst, std::fabs(quad.c(n) - closed.c(n)));
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("quadrature reproduces a pure mode profile", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    auto u3 = [&](double y) { return eigenfunction(3, y, well); };
    auto prof = CollapseProfile::general(u3, -0.5 + 1e-9, 0.5 - 1e-9);
    auto c = coefficients_by_quadrature(well, prof, 10);
    REQUIRE_THAT(c.c(3), WithinAbs(1.0, 1e-8));
    for (int n = 1; n <= 10; ++n)
        if (n != 3) REQUIRE(std::fabs(c.c(n)) <= 1e-10);
}

TEST_CASE("even profile has no even-mode content", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    double h = 0.1;
    double amp = std::sqrt(3.0 / (2.0 * h));
    auto tent = [=](double y) { return amp * (1.0 - std::fabs(y) / h); };
    auto prof = CollapseProfile::general(tent, -h, h);
    auto c = coefficients_by_quadrature(well, prof, 40);
    for (int n = 2; n <= 40; n += 2) REQUIRE(std::fabs(c.c(n)) <= 1e-13);
    // odd modes carry all the mass
    REQUIRE(c.sum_sq() >= 0.99);
}

TEST_CASE("quadrature input validation", "[coefficients]") {
    WellConfig well{1.0, 1.0, 0.0};
    auto bad = CollapseProfile::general([](double) { return 2.0; }, -0.1, 0.1);
    REQUIRE_THROWS_AS(coefficients_by_quadrature(well, bad, 10), validation_error);
    auto outside = CollapseProfile::general([](double) { return 1.0; }, 0.4, 0.6);
    REQUIRE_THROWS_AS(coefficients_by_quadrature(well, outside, 10), validation_error);
}

TEST_CASE("grid builders produce exact endpoints", "[grid]") {
    auto y = symmetric_linspace(1.0, 5);
    REQUIRE(y == std::vector<double>{-0.5, -0.25, 0.0, 0.25, 0.5});
    auto y2 = symmetric_linspace(3.0, 1024);
    REQUIRE(y2.front() == -1.5);
    REQUIRE(y2.back() == 1.5);
    auto y3 = symmetric_linspace(2.0, 129);
    REQUIRE(y3[64] == 0.0);
    REQUIRE_THROWS_AS(symmetric_linspace(1.0, 1), validation_error);

    auto t = uniform_times(0.0, 4.0, 5);
    REQUIRE(t == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
    REQUIRE(uniform_times(0.3, 9.0, 1) == std::vector<double>{0.3});
    REQUIRE(uniform_times(0.0, 7.7, 100).back() == 7.7);
    REQUIRE_THROWS_AS(uniform_times(1.0, 0.5, 4), validation_error);

    WellConfig well{1.0, 1.0, 0.5};
    SpaceTimeGrid ok{symmetric_linspace(1.0, 9), uniform_times(0.5, 1.0, 3)};
    REQUIRE_NOTHROW(require_grid_valid(ok, well));
    SpaceTimeGrid early{symmetric_linspace(1.0, 9), uniform_times(0.0, 1.0, 3)};
    REQUIRE_THROWS_AS(require_grid_valid(early, well), validation_error);
    SpaceTimeGrid outside{{-0.6, 0.0}, {0.5}};
    REQUIRE_THROWS_AS(require_grid_valid(outside, well), validation_error);
    SpaceTimeGrid backwards{{0.0, -0.1}, {0.5}};
    REQUIRE_THROWS_AS(require_grid_valid(backwards, well), validation_error);
    SpaceTimeGrid empty{{}, {0.5}};
    REQUIRE_THROWS_AS(require_grid_valid(empty, well), validation_error);
}
