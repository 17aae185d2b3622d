#pragma once

// Infinite square well on [-L/2, +L/2]: configuration, slit window, and the
// orthonormal eigenbasis u_n(y) = sqrt(2/L) sin(n pi (y + L/2)/L) with
// E_n/hbar = n^2 pi^2 (hbar/m) / (2 L^2).

#include <cmath>
#include <stdexcept>
#include <string>

#include "qcarpet/numerics.hpp"

namespace qcarpet {

// Raised when an input violates a documented precondition on values
// (as opposed to being outside a function's mathematical domain).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WellConfig {
    double length;        // L > 0
    double hbar_over_m;   // > 0
    double t_measure;     // collapse instant t_M

    WellConfig(double L, double hm, double t_M = 0.0)
        : length(L), hbar_over_m(hm), t_measure(t_M) {
        if (!(L > 0.0) || !std::isfinite(L))
            throw validation_error("WellConfig: length must be positive and finite");
        if (!(hm > 0.0) || !std::isfinite(hm))
            throw validation_error("WellConfig: hbar_over_m must be positive and finite");
        if (!std::isfinite(t_M))
            throw validation_error("WellConfig: t_measure must be finite");
    }

    // Exact density recurrence period: every mode phase returns to 2 pi k.
    double revival_time() const {
        return 4.0 * length * length / (num::pi * hbar_over_m);
    }
};

struct SlitAperture {
    double center;  // y0
    double width;   // a > 0

    SlitAperture(double y0, double a) : center(y0), width(a) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw validation_error("SlitAperture: width must be positive and finite");
        if (!std::isfinite(y0))
            throw validation_error("SlitAperture: center must be finite");
    }

    double lo() const { return center - 0.5 * width; }
    double hi() const { return center + 0.5 * width; }
};

inline void require_slit_in_well(const WellConfig& well, const SlitAperture& slit) {
    double half = 0.5 * well.length;
    if (!(slit.lo() > -half) || !(slit.hi() < half))
        throw validation_error("slit window [" + std::to_string(slit.lo()) + ", " +
                               std::to_string(slit.hi()) +
                               "] must lie strictly inside the well");
}

// u_n(y); exactly 0 at y = +-L/2. Throws outside the well or for n < 1.
inline double eigenfunction(int n, double y, const WellConfig& well) {
    if (n < 1) throw std::domain_error("eigenfunction: n must be >= 1");
    double half = 0.5 * well.length;
    if (!(y >= -half) || !(y <= half))
        throw std::domain_error("eigenfunction: y outside the well");
    double w = y / well.length + 0.5;   // exactly 0/1 at the walls
    return std::sqrt(2.0 / well.length) * num::sinpi((double)n * w);
}

// E_n / hbar (angular frequency of mode n).
inline double eigenenergy(int n, const WellConfig& well) {
    if (n < 1) throw std::domain_error("eigenenergy: n must be >= 1");
    double L = well.length;
    return (double)n * n * num::pi * num::pi * well.hbar_over_m / (2.0 * L * L);
}

} // namespace qcarpet
