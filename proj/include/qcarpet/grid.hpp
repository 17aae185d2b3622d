#pragma once

// Evaluation lattices. The symmetric linspace is built from exactly negating
// integer ratios so y[j] == -y[M-1-j] bitwise; mirror-symmetry checks and the
// carpet's byte-level column symmetry rely on that.

#include <stdexcept>
#include <vector>

#include "qcarpet/well.hpp"

namespace qcarpet {

struct SpaceTimeGrid {
    std::vector<double> y;   // strictly increasing, inside [-L/2, +L/2]
    std::vector<double> t;   // nondecreasing, >= t_measure
};

// M points spanning [-L/2, +L/2] with bitwise mirror pairs.
inline std::vector<double> symmetric_linspace(double L, int M) {
    if (M < 2) throw validation_error("symmetric_linspace: need >= 2 points");
    std::vector<double> y((std::size_t)M);
    double denom = (double)(M - 1);
    for (int j = 0; j < M; ++j)
        y[(std::size_t)j] = (0.5 * L) * ((double)(2 * j - (M - 1)) / denom);
    return y;
}

// K times from t0 to t1 inclusive; the endpoints are hit exactly.
inline std::vector<double> uniform_times(double t0, double t1, int K) {
    if (K < 1) throw validation_error("uniform_times: need >= 1 point");
    if (!(t1 >= t0)) throw validation_error("uniform_times: t1 must be >= t0");
    std::vector<double> t((std::size_t)K);
    if (K == 1) { t[0] = t0; return t; }
    double span = t1 - t0;
    double denom = (double)(K - 1);
    for (int r = 0; r < K; ++r)
        t[(std::size_t)r] = t0 + span * ((double)r / denom);
    return t;
}

inline void require_grid_valid(const SpaceTimeGrid& grid, const WellConfig& well) {
    if (grid.y.empty() || grid.t.empty())
        throw validation_error("SpaceTimeGrid: empty axis");
    double half = 0.5 * well.length;
    for (std::size_t j = 0; j < grid.y.size(); ++j) {
        if (!(grid.y[j] >= -half) || !(grid.y[j] <= half))
            throw validation_error("SpaceTimeGrid: y sample outside the well");
        if (j > 0 && !(grid.y[j] > grid.y[j - 1]))
            throw validation_error("SpaceTimeGrid: y samples must be strictly increasing");
    }
    for (std::size_t r = 0; r < grid.t.size(); ++r) {
        if (!(grid.t[r] >= well.t_measure))
            throw validation_error("SpaceTimeGrid: t sample before t_measure");
        if (r > 0 && !(grid.t[r] >= grid.t[r - 1]))
            throw validation_error("SpaceTimeGrid: t samples must be nondecreasing");
    }
}

// Row r is the density slice at grid.t[r]; column c follows grid.y[c].
struct DensityField {
    SpaceTimeGrid grid;
    std::vector<double> values;   // row-major, rows().cols()

    std::size_t rows() const { return grid.t.size(); }
    std::size_t cols() const { return grid.y.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    const double* row(std::size_t r) const { return values.data() + r * cols(); }
};

} // namespace qcarpet
