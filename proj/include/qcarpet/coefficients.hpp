#pragma once

// Expansion coefficients of a collapsed state in the well eigenbasis:
// closed form for the rectangular window, adaptive Gauss-Legendre panel
// quadrature for arbitrary profiles, and Parseval diagnostics.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qcarpet/numerics.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

struct ModalCoefficients {
    std::vector<double> values;   // values[i] = c_{i+1}

    int order() const { return (int)values.size(); }
    double c(int n) const { return values.at((std::size_t)n - 1); }
    double sum_sq() const {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
        return num::pairwise_sum(sq);
    }
};

// 1 - sum c_n^2: the norm lost to truncation. Floored at 0.
inline double parseval_deficit(const ModalCoefficients& coeffs) {
    double d = 1.0 - coeffs.sum_sq();
    return d < 0.0 ? 0.0 : d;
}

// Normalized collapse profile on a stated support window. Rectangular is the
// default; General carries an arbitrary real profile function.
struct CollapseProfile {
    enum class Kind { rectangular, general };

    Kind kind;
    double support_lo;
    double support_hi;
    std::function<double(double)> f;

    static CollapseProfile rectangular(const SlitAperture& slit) {
        CollapseProfile p;
        p.kind = Kind::rectangular;
        p.support_lo = slit.lo();
        p.support_hi = slit.hi();
        double amp = 1.0 / std::sqrt(slit.width);
        p.f = [amp](double) { return amp; };
        return p;
    }

    static CollapseProfile general(std::function<double(double)> fn,
                                   double lo, double hi) {
        if (!(hi > lo)) throw validation_error("CollapseProfile: empty support");
        CollapseProfile p;
        p.kind = Kind::general;
        p.support_lo = lo;
        p.support_hi = hi;
        p.f = std::move(fn);
        return p;
    }
};

// Closed form of c_n = (1/sqrt a) int_{y0-a/2}^{y0+a/2} u_n(y) dy, written in
// product form to avoid the cancellation of the cosine-difference
// antiderivative at small a/L:
//   c_n = (1/sqrt a) sqrt(2/L) (2L/(n pi)) sin(n pi a/(2L)) sin(n pi (y0+L/2)/L)
inline ModalCoefficients slit_coefficients(const WellConfig& well,
                                           const SlitAperture& slit, int N) {
    if (N < 1) throw validation_error("slit_coefficients: N must be >= 1");
    require_slit_in_well(well, slit);
    double L = well.length;
    double half_ratio = 0.5 * (slit.width / L);           // a/(2L)
    double center_ratio = (slit.center + 0.5 * L) / L;    // exactly 0.5 for y0 = 0
    double pref = std::sqrt(2.0 / L) / std::sqrt(slit.width) * (2.0 * L / num::pi);
    ModalCoefficients mc;
    mc.values.resize((std::size_t)N);
    for (int n = 1; n <= N; ++n) {
        mc.values[(std::size_t)n - 1] = pref / n *
            num::sinpi(n * half_ratio) * num::sinpi(n * center_ratio);
    }
    return mc;
}

// Panel count and node budget scale with n * support/L so every oscillation
// of u_n gets >= 8 nodes.
inline ModalCoefficients coefficients_by_quadrature(const WellConfig& well,
                                                    const CollapseProfile& profile,
                                                    int N) {
    if (N < 1) throw validation_error("coefficients_by_quadrature: N must be >= 1");
    double half = 0.5 * well.length;
    if (!(profile.support_lo > -half) || !(profile.support_hi < half))
        throw validation_error("coefficients_by_quadrature: profile support outside the well");

    double lo = profile.support_lo, hi = profile.support_hi;
    double width = hi - lo;

    // normalization check: int |profile|^2 = 1 within 1e-8
    {
        const auto& rule = num::gauss_legendre(8);
        int panels = 64;
        double ph = width / panels;
        num::kahan acc;
        for (int p = 0; p < panels; ++p) {
            double a0 = lo + p * ph;
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                double y = a0 + 0.5 * ph * (rule.x[i] + 1.0);
                double v = profile.f(y);
                acc.add(rule.w[i] * 0.5 * ph * v * v);
            }
        }
        if (std::fabs(acc.sum() - 1.0) > 1e-8)
            throw validation_error("coefficients_by_quadrature: profile is not normalized");
    }

    ModalCoefficients mc;
    mc.values.resize((std::size_t)N);
    for (int n = 1; n <= N; ++n) {
        double cycles = n * width / well.length;
        int panels = std::max(1, (int)std::ceil(cycles));
        int total = std::max(4, (int)std::ceil(8.0 * cycles));
        // at least 12 nodes per panel: each panel spans at most half an
        // oscillation, and order 12 puts that panel's error below 1e-15
        int order = std::max(12, (total + panels - 1) / panels);
        const auto& rule = num::gauss_legendre(order);
        double ph = width / panels;
        num::kahan acc;
        for (int p = 0; p < panels; ++p) {
            double a0 = lo + p * ph;
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                double y = a0 + 0.5 * ph * (rule.x[i] + 1.0);
                acc.add(rule.w[i] * 0.5 * ph * profile.f(y) * eigenfunction(n, y, well));
            }
        }
        mc.values[(std::size_t)n - 1] = acc.sum();
    }
    return mc;
}

} // namespace qcarpet
