#pragma once

// Independent verification backends: a Crank-Nicolson evolver on a Dirichlet
// lattice (no shared machinery with the eigenbasis route), plus free-space
// Fresnel and Fraunhofer reference curves for pattern identification.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qcarpet/coefficients.hpp"
#include "qcarpet/numerics.hpp"
#include "qcarpet/propagator.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

// Interior amplitudes on a uniform lattice spanning (-L/2, +L/2) with zero
// walls; spacing h = L/(M+1).
struct LatticeState {
    std::vector<std::complex<double>> psi;
    double length = 0.0;
    double spacing = 0.0;

    std::size_t points() const { return psi.size(); }
    double y_at(std::size_t i) const { return -0.5 * length + spacing * (double)(i + 1); }
    double norm() const {
        std::vector<double> sq(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) sq[i] = std::norm(psi[i]);
        return spacing * num::pairwise_sum(sq);
    }
    std::vector<double> density() const {
        std::vector<double> d(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) d[i] = std::norm(psi[i]);
        return d;
    }
    std::vector<double> lattice() const {
        std::vector<double> y(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) y[i] = y_at(i);
        return y;
    }
};

// Truncated spectral state at t_measure sampled on the lattice. Requires the
// top mode to be resolvable: N pi/L < pi/h, i.e. N <= M.
inline LatticeState sample_state(const ModalCoefficients& coeffs,
                                 const WellConfig& well, int M) {
    if (M < 1) throw validation_error("sample_state: M must be >= 1");
    if (coeffs.order() > M)
        throw validation_error("sample_state: lattice cannot resolve the top mode; need M >= N");
    LatticeState st;
    st.length = well.length;
    st.spacing = well.length / (double)(M + 1);
    st.psi.resize((std::size_t)M);
    std::vector<double> y(st.lattice());
    std::vector<double> re((std::size_t)M), im((std::size_t)M);
    detail::slice_kernel(coeffs, well, y, well.t_measure, re.data(), im.data());
    for (std::size_t i = 0; i < (std::size_t)M; ++i) st.psi[i] = {re[i], im[i]};
    return st;
}

// (1 + i dt H/(2 hbar))^-1 (1 - i dt H/(2 hbar)) per step, H/hbar the 3-point
// Laplacian times -(hbar/m)/2; constant-coefficient Thomas solve with the
// elimination factors precomputed once.
inline LatticeState crank_nicolson_evolve(const LatticeState& initial,
                                          const WellConfig& well,
                                          double dt, long steps) {
    using cd = std::complex<double>;
    if (!(dt > 0.0)) throw validation_error("crank_nicolson_evolve: dt must be > 0");
    if (steps < 0) throw validation_error("crank_nicolson_evolve: negative step count");
    const std::size_t M = initial.points();
    if (M < 1024) throw validation_error("crank_nicolson_evolve: lattice too coarse; need M >= 1024");

    const double h = initial.spacing;
    const double gamma = well.hbar_over_m / (2.0 * h * h);
    const cd off{0.0, -0.5 * dt * gamma};      // -i dt gamma / 2
    const cd diag{1.0, dt * gamma};
    const cd rdiag{1.0, -dt * gamma};
    const cd roff{0.0, 0.5 * dt * gamma};

    std::vector<cd> cp(M), inv_m(M);
    cd m = diag;
    inv_m[0] = 1.0 / m;
    cp[0] = off * inv_m[0];
    for (std::size_t j = 1; j < M; ++j) {
        m = diag - off * cp[j - 1];
        inv_m[j] = 1.0 / m;
        cp[j] = off * inv_m[j];
    }

    LatticeState st = initial;
    std::vector<cd> rhs(M), f(M);
    for (long s = 0; s < steps; ++s) {
        const cd* p = st.psi.data();
        rhs[0] = rdiag * p[0] + roff * p[1];
        for (std::size_t j = 1; j + 1 < M; ++j)
            rhs[j] = rdiag * p[j] + roff * (p[j - 1] + p[j + 1]);
        rhs[M - 1] = rdiag * p[M - 1] + roff * p[M - 2];

        f[0] = rhs[0] * inv_m[0];
        for (std::size_t j = 1; j < M; ++j)
            f[j] = (rhs[j] - off * f[j - 1]) * inv_m[j];
        st.psi[M - 1] = f[M - 1];
        for (std::size_t j = M - 1; j-- > 0;)
            st.psi[j] = f[j] - cp[j] * st.psi[j + 1];
    }
    return st;
}

// Far-field intensity shape sinc^2(a (y - y0) / (2 (hbar/m) t)), unit peak.
// t is the elapsed time since the collapse.
inline std::vector<double> fraunhofer_envelope(const SlitAperture& slit, double t,
                                               const std::vector<double>& y_samples,
                                               double hbar_over_m) {
    if (!(t > 0.0)) throw std::domain_error("fraunhofer_envelope: need t > 0");
    std::vector<double> out(y_samples.size());
    double scale = slit.width / (2.0 * hbar_over_m * t);
    for (std::size_t j = 0; j < y_samples.size(); ++j) {
        double u = scale * (y_samples[j] - slit.center);
        double s = (u == 0.0) ? 1.0 : std::sin(u) / u;
        out[j] = s * s;
    }
    return out;
}

// Free-space evolution of the ideal rectangle through the exact Fresnel
// propagator: |Psi|^2 = (1/(2a)) [ (C(w+) - C(w-))^2 + (S(w+) - S(w-))^2 ]
// with w+- = (y - y0 +- a/2) / sqrt(pi (hbar/m) t). t is elapsed time.
inline std::vector<double> fresnel_reference(const SlitAperture& slit, double t,
                                             const std::vector<double>& y_samples,
                                             double hbar_over_m) {
    if (!(t > 0.0)) throw std::domain_error("fresnel_reference: need t > 0");
    std::vector<double> out(y_samples.size());
    double s = std::sqrt(num::pi * hbar_over_m * t);
    double inv2a = 1.0 / (2.0 * slit.width);
    for (std::size_t j = 0; j < y_samples.size(); ++j) {
        double d = y_samples[j] - slit.center;
        auto [cp_, sp_] = num::fresnel_cs((d + 0.5 * slit.width) / s);
        auto [cm_, sm_] = num::fresnel_cs((d - 0.5 * slit.width) / s);
        double dc = cp_ - cm_, ds = sp_ - sm_;
        out[j] = inv2a * (dc * dc + ds * ds);
    }
    return out;
}

// The free-space references are meaningful only until wall reflections
// arrive: t <= (slit edge to nearest wall) / ((hbar/m) k_eff), k_eff = N pi/L.
inline double free_space_validity_limit(const WellConfig& well,
                                        const SlitAperture& slit, int N) {
    if (N < 1) throw validation_error("free_space_validity_limit: N must be >= 1");
    double half = 0.5 * well.length;
    double d1 = std::min(half - slit.lo(), slit.lo() + half);
    double d2 = std::min(half - slit.hi(), slit.hi() + half);
    double dist = std::min(d1, d2);
    double k_eff = (double)N * num::pi / well.length;
    return dist / (well.hbar_over_m * k_eff);
}

} // namespace qcarpet
