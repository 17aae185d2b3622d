#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "qcarpet/qcarpet.hpp"
#include "oracles.hpp"

using namespace qcarpet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("lattice sampling reproduces the spectral norm", "[lattice]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    auto c = slit_coefficients(well, slit, 500);
    auto st = sample_state(c, well, 4096);
    REQUIRE(st.points() == 4096);
    REQUIRE(st.spacing == 1.0 / 4097.0);
    REQUIRE_THAT(st.norm(), WithinRel(c.sum_sq(), 1e-10));
    auto y = st.lattice();
    REQUIRE(y.front() > -0.5);
    REQUIRE(y.back() < 0.5);
    REQUIRE_THAT(y.front(), WithinAbs(-0.5 + st.spacing, 1e-15));
    // the lattice must resolve the highest retained mode
    REQUIRE_THROWS_AS(sample_state(c, well, 499), validation_error);
}

TEST_CASE("lowest mode is stationary under grid evolution", "[timedomain]") {
    WellConfig well{1.0, 1.0, 0.0};
    ModalCoefficients c;
    c.values = {1.0};
    auto st = sample_state(c, well, 1024);
    auto before = st.density();
    auto after = crank_nicolson_evolve(st, well, 1e-4, 1000);
    double peak = 0.0;
    for (double v : before) peak = std::max(peak, v);
    double worst = 0.0;
    auto ad = after.density();
    for (std::size_t i = 0; i < ad.size(); ++i)
        worst = std::max(worst, std::fabs(ad[i] - before[i]));
    // the sampled mode is an exact discrete eigenvector: only phase evolves
    REQUIRE(worst <= 1e-8 * peak);
    REQUIRE_THAT(after.norm(), WithinRel(st.norm(), 1e-12));
}

TEST_CASE("long-run norm conservation", "[timedomain]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.1, 0.2};
    auto c = slit_coefficients(well, slit, 32);
    auto st = sample_state(c, well, 1024);
    auto out = crank_nicolson_evolve(st, well, 1e-5, 100000);
    REQUIRE_THAT(out.norm(), WithinRel(st.norm(), 1e-8));
}

TEST_CASE("two-mode beat period", "[timedomain]") {
    WellConfig well{1.0, 1.0, 0.0};
    double r = 1.0 / std::sqrt(2.0);
    ModalCoefficients c;
    c.values = {r, r};
    const int M = 1024;
    auto st = sample_state(c, well, M);
    // overlap of the density with the u1*u2 cross profile oscillates at the
    // mode gap frequency; its crossing spacing is half the beat period
    std::vector<double> g((std::size_t)M);
    auto y = st.lattice();
    for (int i = 0; i < M; ++i)
        g[(std::size_t)i] = eigenfunction(1, y[(std::size_t)i], well) *
                            eigenfunction(2, y[(std::size_t)i], well);
    const double dt = 1e-4;
    const int steps = 9000;
    std::vector<double> s((std::size_t)steps + 1);
    auto overlap = [&](const LatticeState& state) {
        num::kahan acc;
        for (int i = 0; i < M; ++i) acc.add(std::norm(state.psi[(std::size_t)i]) * g[(std::size_t)i]);
        return state.spacing * acc.sum();
    };
    s[0] = overlap(st);
    LatticeState cur = st;
    for (int k = 1; k <= steps; ++k) {
        cur = crank_nicolson_evolve(cur, well, dt, 1);
        s[(std::size_t)k] = overlap(cur);
    }
    double smax = *std::max_element(s.begin(), s.end());
    double smin = *std::min_element(s.begin(), s.end());
    double mid = 0.5 * (smax + smin);
    std::vector<double> crossings;
    for (int k = 0; k < steps; ++k) {
        double a = s[(std::size_t)k] - mid, b = s[(std::size_t)k + 1] - mid;
        if (a >= 0.0 && b < 0.0)
            crossings.push_back(dt * (k + a / (a - b)));
    }
    REQUIRE(crossings.size() >= 2);
    double period = crossings[1] - crossings[0];
    REQUIRE_THAT(period, WithinRel(oracles::kTwoModeBeatPeriod, 1e-3));
}

TEST_CASE("grid evolution matches the spectral propagator", "[timedomain]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    auto c = slit_coefficients(well, slit, 50);
    auto st = sample_state(c, well, 8192);
    const double dt = 1e-6;
    const long steps = 2000;
    auto evolved = crank_nicolson_evolve(st, well, dt, steps);
    auto ref = density_slice(c, well, evolved.lattice(), dt * (double)steps);
    double err = l2_density_distance(evolved.density(), ref.density);
    REQUIRE(err <= 1e-3);
}

TEST_CASE("grid evolution error scales as dt squared", "[timedomain]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    auto c = slit_coefficients(well, slit, 50);
    const int M = 32768;
    auto st = sample_state(c, well, M);
    const double t_end = 2e-3;
    auto err_at = [&](double dt) {
        long steps = std::lround(t_end / dt);
        auto evolved = crank_nicolson_evolve(st, well, dt, steps);
        auto ref = density_slice(c, well, evolved.lattice(), t_end);
        return l2_density_distance(evolved.density(), ref.density);
    };
    double coarse = err_at(4e-6);
    double fine = err_at(2e-6);
    double ratio = coarse / fine;
    INFO("coarse=" << coarse << " fine=" << fine << " ratio=" << ratio);
    REQUIRE(ratio >= 3.2);
    REQUIRE(ratio <= 4.8);
}

TEST_CASE("grid evolution input validation", "[timedomain]") {
    WellConfig well{1.0, 1.0, 0.0};
    ModalCoefficients c;
    c.values = {1.0};
    auto st = sample_state(c, well, 1024);
    REQUIRE_THROWS_AS(crank_nicolson_evolve(st, well, 0.0, 10), validation_error);
    REQUIRE_THROWS_AS(crank_nicolson_evolve(st, well, -1e-6, 10), validation_error);
    auto small = sample_state(c, well, 512);
    REQUIRE_THROWS_AS(crank_nicolson_evolve(small, well, 1e-6, 10), validation_error);
}

TEST_CASE("far-field envelope shape", "[reference]") {
    SlitAperture slit{0.245, 0.01};
    const double hm = 1.0;
    const double t = 4e-5;
    std::vector<double> y(2001);
    for (int k = 0; k <= 2000; ++k) y[(std::size_t)k] = 0.245 + (k - 1000) * 1e-4;
    auto env = fraunhofer_envelope(slit, t, y, hm);
    REQUIRE(env[1000] == 1.0);
    // first zero sits at 2 pi (hbar/m) t / a from the center
    double zero = 2.0 * num::pi * hm * t / slit.width;
    std::size_t first = 0;
    for (std::size_t k = 1001; k + 1 < env.size(); ++k) {
        if (env[k] <= env[k - 1] && env[k] <= env[k + 1] && env[k] < 0.01) {
            first = k;
            break;
        }
    }
    REQUIRE(first > 0);
    REQUIRE_THAT(y[first] - slit.center, WithinRel(zero, 0.01));
    REQUIRE(env[first] <= 1e-4);
    for (int k = 1; k <= 1000; ++k)
        REQUIRE_THAT(env[(std::size_t)(1000 + k)],
                     WithinAbs(env[(std::size_t)(1000 - k)], 1e-12));
    REQUIRE_THROWS_AS(fraunhofer_envelope(slit, 0.0, y, hm), std::domain_error);
}

TEST_CASE("free-space reference recovers the window at early times", "[reference]") {
    SlitAperture slit{0.245, 0.01};
    const double hm = 1.0;
    std::vector<double> y(4001);
    for (int k = 0; k <= 4000; ++k) y[(std::size_t)k] = 0.245 + (k - 2000) * 2.5e-5;
    auto rho = fresnel_reference(slit, 1e-9, y, hm);
    // center of the plateau
    REQUIRE_THAT(rho[2000], WithinRel(1.0 / slit.width, 0.02));
    // one full width outside the edge the density has collapsed
    REQUIRE(rho[2000 + 400] <= 1.0);
    REQUIRE(rho[2000 - 400] <= 1.0);
    // total probability integrates to one
    double total = num::trapezoid_uniform(rho, 2.5e-5);
    REQUIRE_THAT(total, WithinRel(1.0, 0.02));
    REQUIRE_THROWS_AS(fresnel_reference(slit, 0.0, y, hm), std::domain_error);
}

TEST_CASE("free-space reference is symmetric about the window center", "[reference]") {
    SlitAperture slit{0.245, 0.01};
    auto rho = fresnel_reference(slit, 2e-5, [] {
        std::vector<double> y(1025);
        for (int k = 0; k <= 1024; ++k) y[(std::size_t)k] = 0.245 + (k - 512) * 6.25e-5;
        return y;
    }(), 1.0);
    double peak = *std::max_element(rho.begin(), rho.end());
    for (int k = 1; k <= 512; ++k)
        REQUIRE_THAT(rho[(std::size_t)(512 + k)],
                     WithinAbs(rho[(std::size_t)(512 - k)], 1e-9 * peak));
}

TEST_CASE("free-space reference converges to the far-field envelope", "[reference]") {
    SlitAperture slit{0.245, 0.01};
    const double hm = 1.0;
    std::vector<double> y(4097);
    for (int k = 0; k <= 4096; ++k) y[(std::size_t)k] = 0.245 + (k - 2048) * 2.5e-4;
    auto corr_at = [&](double t) {
        auto fres = fresnel_reference(slit, t, y, hm);
        auto env = fraunhofer_envelope(slit, t, y, hm);
        return sinc_correlation(fres, env);
    };
    double c1 = corr_at(2e-5);
    double c2 = corr_at(2e-4);
    double c3 = corr_at(2e-3);
    REQUIRE(c2 >= c1 - 1e-12);
    REQUIRE(c3 >= c2 - 1e-12);
    REQUIRE(c3 >= 0.99999);
}

TEST_CASE("free-space window of validity", "[reference]") {
    WellConfig well{1.0, 1.0, 0.0};
    SlitAperture slit{0.245, 0.01};
    double limit = free_space_validity_limit(well, slit, 500);
    REQUIRE_THAT(limit, WithinRel(0.25 / (500.0 * num::pi), 1e-14));
    // wider wells extend the free-flight window proportionally
    WellConfig big{2.0, 1.0, 0.0};
    REQUIRE(free_space_validity_limit(big, slit, 500) > 4.0 * limit);
    REQUIRE_THROWS_AS(free_space_validity_limit(well, slit, 0), validation_error);
}
