#pragma once

// Time evolution of the collapsed state: phase-exact reduction of
// exp(-i E_n (t - t_M)/hbar), scalar amplitude evaluation, the vectorized
// slice kernel (twin sin/cos recurrences, periodically reseeded, Kahan
// accumulation in fixed ascending-n order), and data-parallel carpets whose
// bytes do not depend on the worker count.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qcarpet/coefficients.hpp"
#include "qcarpet/grid.hpp"
#include "qcarpet/numerics.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

// Phase of mode n at scaled time tau = (t - t_M)/T, reduced to [0, 2 pi).
// Compensated so that rational tau with small denominator gives exact
// multiples of pi/2; in particular tau = 1 returns exactly 0 for every n.
inline double reduced_phase(std::int64_t n, double tau) {
    if (n < 1) throw std::domain_error("reduced_phase: n must be >= 1");
    if (!(tau >= 0.0)) throw std::domain_error("reduced_phase: tau must be >= 0");
    double nd = (double)n;
    double nn = nd * nd;
    if (nn > 9007199254740992.0)   // 2^53: n^2 no longer exact
        throw std::domain_error("reduced_phase: n^2 exceeds exact integer range");
    return num::two_pi * num::frac_prod(nn, tau);
}

// Direct scalar evaluation of the truncated series at one point.
inline std::complex<double> amplitude_at(const ModalCoefficients& coeffs,
                                         const WellConfig& well,
                                         double y, double t) {
    if (!(t >= well.t_measure))
        throw std::domain_error("amplitude_at: t must be >= t_measure");
    double tau = (t - well.t_measure) / well.revival_time();
    num::kahan re, im;
    for (int n = 1; n <= coeffs.order(); ++n) {
        double u = eigenfunction(n, y, well);
        double ph = reduced_phase(n, tau);
        double cu = coeffs.c(n) * u;
        re.add(cu * std::cos(ph));
        im.add(-cu * std::sin(ph));
    }
    return {re.sum(), im.sum()};
}

struct WaveSlice {
    std::vector<std::complex<double>> amplitude;
    double t = 0.0;
};

struct SliceResult {
    WaveSlice wave;
    std::vector<double> density;
};

namespace detail {

// Reseed cadence for the three-term recurrences. Drift between reseeds stays
// well under 1e-10 of the density peak.
inline constexpr int kReseedPeriod = 4096;
inline constexpr int kTileSize = 512;

// u_n(y) = sqrt(2/L) sin(n alpha + n pi/2) with alpha = pi y / L.
// The n pi/2 offset maps (n mod 4) = 0,1,2,3 onto +sin, +cos, -sin, -cos of
// n alpha, so only sin(n alpha), cos(n alpha) are recursed.
inline void slice_kernel(const ModalCoefficients& coeffs, const WellConfig& well,
                         const std::vector<double>& y_samples, double t,
                         double* out_re, double* out_im) {
    const int N = coeffs.order();
    const int M = (int)y_samples.size();
    const double L = well.length;
    const double half = 0.5 * L;
    const double tau = (t - well.t_measure) / well.revival_time();
    if (!(tau >= 0.0))
        throw std::domain_error("density_slice: t must be >= t_measure");

    const double root = std::sqrt(2.0 / L);

    // per-mode phase-rotated coefficients with the quadrant sign folded in:
    // p = sgn c cos(phi), q = -sgn c sin(phi); basis is sin for even n,
    // cos for odd n
    std::vector<double> pv((std::size_t)N), qv((std::size_t)N);
    for (int n = 1; n <= N; ++n) {
        double ph = reduced_phase(n, tau);
        double sgn = ((n & 3) == 0 || (n & 3) == 1) ? 1.0 : -1.0;
        double sc = sgn * root * coeffs.c(n);
        pv[(std::size_t)n - 1] = sc * std::cos(ph);
        qv[(std::size_t)n - 1] = -sc * std::sin(ph);
    }
    const double* P = pv.data();
    const double* Q = qv.data();

    std::vector<double> wbuf(kTileSize), two_c1(kTileSize),
        sp(kTileSize), sc_(kTileSize), cp(kTileSize), cc(kTileSize),
        re_s(kTileSize), re_c(kTileSize), im_s(kTileSize), im_c(kTileSize);

    for (int tile = 0; tile < M; tile += kTileSize) {
        const int tn = std::min(kTileSize, M - tile);
        double* w = wbuf.data();
        for (int j = 0; j < tn; ++j) {
            double yj = y_samples[(std::size_t)(tile + j)];
            if (!(yj >= -half) || !(yj <= half))
                throw std::domain_error("density_slice: y sample outside the well");
            w[j] = yj / L;   // alpha / pi
        }
        for (int j = 0; j < tn; ++j) {
            two_c1[j] = 2.0 * num::cospi(w[j]);
            sp[j] = 0.0;                  // sin(0)
            sc_[j] = num::sinpi(w[j]);    // sin(alpha)
            cp[j] = 1.0;                  // cos(0)
            cc[j] = num::cospi(w[j]);     // cos(alpha)
            re_s[j] = re_c[j] = im_s[j] = im_c[j] = 0.0;
        }

        for (int n = 1; n <= N; ++n) {
            if (n > 1) {
                if (n % kReseedPeriod == 1) {
                    // reseed both recurrence lags from compensated direct trig
                    for (int j = 0; j < tn; ++j) {
                        double p0 = (double)n * w[j];
                        double e0 = std::fma((double)n, w[j], -p0);
                        sc_[j] = num::sinpi2(p0, e0);
                        cc[j] = num::cospi2(p0, e0);
                        double p1 = (double)(n - 1) * w[j];
                        double e1 = std::fma((double)(n - 1), w[j], -p1);
                        sp[j] = num::sinpi2(p1, e1);
                        cp[j] = num::cospi2(p1, e1);
                    }
                } else {
                    for (int j = 0; j < tn; ++j) {
                        double sn = std::fma(two_c1[j], sc_[j], -sp[j]);
                        sp[j] = sc_[j];
                        sc_[j] = sn;
                        double cn = std::fma(two_c1[j], cc[j], -cp[j]);
                        cp[j] = cc[j];
                        cc[j] = cn;
                    }
                }
            }
            const double pn = P[n - 1], qn = Q[n - 1];
            const double* basis = ((n & 1) == 0) ? sc_.data() : cc.data();
            for (int j = 0; j < tn; ++j) {
                double b = basis[j];
                double x = pn * b;
                double yk = x - re_c[j];
                double tk = re_s[j] + yk;
                re_c[j] = (tk - re_s[j]) - yk;
                re_s[j] = tk;
                double x2 = qn * b;
                double y2 = x2 - im_c[j];
                double t2 = im_s[j] + y2;
                im_c[j] = (t2 - im_s[j]) - y2;
                im_s[j] = t2;
            }
        }
        for (int j = 0; j < tn; ++j) {
            out_re[tile + j] = re_s[j];
            out_im[tile + j] = im_s[j];
        }
    }
}

} // namespace detail

inline SliceResult density_slice(const ModalCoefficients& coeffs,
                                 const WellConfig& well,
                                 const std::vector<double>& y_samples, double t) {
    const std::size_t M = y_samples.size();
    std::vector<double> re(M), im(M);
    detail::slice_kernel(coeffs, well, y_samples, t, re.data(), im.data());
    SliceResult out;
    out.wave.t = t;
    out.wave.amplitude.resize(M);
    out.density.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
        out.wave.amplitude[j] = {re[j], im[j]};
        out.density[j] = re[j] * re[j] + im[j] * im[j];
    }
    return out;
}

// Rows are independent slices; workers own disjoint row ranges, so the result
// is bit-identical for any worker count.
inline DensityField carpet(const ModalCoefficients& coeffs, const WellConfig& well,
                           const SpaceTimeGrid& grid, unsigned workers = 1) {
    require_grid_valid(grid, well);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t R = grid.t.size(), M = grid.y.size();
    DensityField field;
    field.grid = grid;
    field.values.resize(R * M);

    auto run_rows = [&](std::size_t r0, std::size_t r1) {
        std::vector<double> re(M), im(M);
        for (std::size_t r = r0; r < r1; ++r) {
            detail::slice_kernel(coeffs, well, grid.y, grid.t[r], re.data(), im.data());
            double* row = field.values.data() + r * M;
            for (std::size_t j = 0; j < M; ++j) row[j] = re[j] * re[j] + im[j] * im[j];
        }
    };

    if (workers <= 1 || R <= 1) {
        run_rows(0, R);
        return field;
    }
    unsigned nw = (unsigned)std::min<std::size_t>(workers, R);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned wi = 0; wi < nw; ++wi) {
        std::size_t r0 = R * wi / nw, r1 = R * (wi + 1) / nw;
        pool.emplace_back(run_rows, r0, r1);
    }
    for (auto& th : pool) th.join();
    return field;
}

} // namespace qcarpet
