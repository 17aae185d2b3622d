#pragma once

// Convenience umbrella for the whole library.

#include "qcarpet/numerics.hpp"
#include "qcarpet/well.hpp"
#include "qcarpet/coefficients.hpp"
#include "qcarpet/grid.hpp"
#include "qcarpet/propagator.hpp"
#include "qcarpet/oracle.hpp"
#include "qcarpet/analysis.hpp"
#include "qcarpet/screen.hpp"
#include "qcarpet/io.hpp"
