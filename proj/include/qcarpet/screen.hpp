#pragma once

// Longitudinal flight mapping: a beam moving at v_x = hbar_over_m * k_x turns
// screen distance D into elapsed time t = t_measure + D / v_x, so transverse
// patterns can be indexed by screen position instead of time.

#include <stdexcept>
#include <vector>

#include "qcarpet/coefficients.hpp"
#include "qcarpet/propagator.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

struct BeamConfig {
    double k_x;   // longitudinal wavenumber
    double v_x;   // longitudinal speed, hbar_over_m * k_x

    BeamConfig(double k_x_, const WellConfig& well) : k_x(k_x_) {
        if (!(k_x > 0.0)) throw validation_error("BeamConfig: k_x must be > 0");
        v_x = well.hbar_over_m * k_x;
    }
};

// Arrival time at a screen D past the collapse plane.
inline double time_of_flight(double D, const BeamConfig& beam,
                             const WellConfig& well) {
    if (D < 0.0) throw std::domain_error("time_of_flight: negative distance");
    return well.t_measure + D / beam.v_x;
}

// Screen distance reached at time t >= t_measure.
inline double distance_of_time(double t, const BeamConfig& beam,
                               const WellConfig& well) {
    if (t < well.t_measure)
        throw std::domain_error("distance_of_time: t before the collapse time");
    return (t - well.t_measure) * beam.v_x;
}

// Screen distance of the first full revival.
inline double revival_distance(const BeamConfig& beam, const WellConfig& well) {
    return beam.v_x * well.revival_time();
}

// Transverse density on a screen at distance D. Same evaluation path as a
// time slice; the mapping is the only difference.
inline std::vector<double> screen_pattern(const ModalCoefficients& coeffs,
                                          const WellConfig& well,
                                          const BeamConfig& beam,
                                          const std::vector<double>& y_samples,
                                          double D) {
    return density_slice(coeffs, well, y_samples, time_of_flight(D, beam, well))
        .density;
}

} // namespace qcarpet
