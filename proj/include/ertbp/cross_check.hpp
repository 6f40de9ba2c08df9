// Independent reference integrator: adaptive Gragg-Bulirsch-Stoer
// extrapolation over the modified midpoint rule. It evaluates the equations
// of motion through the pointwise core-dynamics functions and shares no
// stepping code with the Taylor integrator.
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/real.hpp"

namespace ertbp {

struct CrossCheckOptions {
    unsigned precision_digits = kDefaultPrecisionDigits;
    unsigned max_columns = 16;          ///< extrapolation table depth
    std::size_t max_steps = 1'000'000;
    AccelerationOptions accel;
};

struct CrossCheckStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
};

/// Integrates from state0 to exactly t_end with mixed absolute/relative local
/// error `tolerance`. Throws ToleranceNotMet when the tolerance sits below the
/// working precision or the step size collapses.
PhaseState<Real> cross_check_integrate(const PhaseState<Real>& state0, const Real& t_end,
                                       const SystemParams<Real>& params, const Real& tolerance,
                                       const CrossCheckOptions& options = {},
                                       CrossCheckStats* stats = nullptr);

}  // namespace ertbp
