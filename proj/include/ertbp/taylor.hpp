// Taylor-series integrator for the coupled system (theta, z, v).
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/jet.hpp"
#include "ertbp/linalg.hpp"
#include "ertbp/real.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ertbp {

enum class StepMode { Fixed, Adaptive };

struct IntegratorConfig {
    unsigned order = 9;
    unsigned precision_digits = kDefaultPrecisionDigits;
    /// Fixed step in ut. Unset means T/10000 for the configured eccentricity.
    std::optional<Real> step;
    StepMode mode = StepMode::Fixed;
    /// Local error target of the adaptive mode; ignored in fixed mode.
    Real adaptive_tolerance = Real(1e-30);
    AccelerationOptions accel;

    /// Order 9, 35 digits and the 30-digit printed step T/10000 for e = 0.048.
    static IntegratorConfig reference();

    void validate() const;
    /// Step actually used by the fixed mode.
    Real resolved_step(const SystemParams<Real>& params) const;
};

/// The step 0.0005856497259353531319661467 = T/10000 at 30 digits.
Real reference_step();

struct Trajectory {
    std::vector<PhaseState<Real>> samples;
    IntegratorConfig config;
};

/// Solution jets of the state at one expansion point.
struct SolutionJets {
    Real t0;
    Jet<Real> theta, z1, z2, v1, v2;

    explicit SolutionJets(unsigned order)
        : theta(order), z1(order), z2(order), v1(order), v2(order) {}

    PhaseState<Real> eval(const Real& h) const;
};

/// Builds order-N jets of (theta, z, v) around `state` by recursive
/// application of the right-hand side in jet arithmetic.
SolutionJets build_jets(const PhaseState<Real>& state, const SystemParams<Real>& params,
                        unsigned order, const AccelerationOptions& accel = {});

/// One step of the fixed-step size (or an adaptive step in adaptive mode).
PhaseState<Real> taylor_step(const PhaseState<Real>& state, const SystemParams<Real>& params,
                             const IntegratorConfig& config);

/// One step of explicit size h.
PhaseState<Real> taylor_step(const PhaseState<Real>& state, const SystemParams<Real>& params,
                             const IntegratorConfig& config, const Real& h);

/// Integrates to exactly t_end. Full steps of the configured size are taken
/// from state0.t; the last jet is evaluated at the residual time.
PhaseState<Real> propagate(const PhaseState<Real>& state0, const Real& t_end,
                           const SystemParams<Real>& params, const IntegratorConfig& config);

/// States at each of `sample_times` (sorted, inside [state0.t, t_end]). Each
/// sample is a partial Taylor step from the last grid point at or before it.
Trajectory propagate_dense(const PhaseState<Real>& state0, const Real& t_end,
                           std::span<const Real> sample_times, const SystemParams<Real>& params,
                           const IntegratorConfig& config);

/// True anomaly of the primaries at each sample time, from theta(0) = 0,
/// integrated alone with the same Taylor machinery.
std::vector<Real> propagate_theta(std::span<const Real> sample_times, const Real& e,
                                  const IntegratorConfig& config);

/// Planar state plus the 4x4 state-transition matrix d(z,v)(t)/d(z,v)(t0).
struct StateWithStm {
    PhaseState<Real> state;
    Mat4<Real> stm;
};

/// Integrates the state jointly with the variational equations
/// Phi' = [[0, I], [G, 0]] Phi, Phi(t0) = I, G = d(acceleration)/dz.
StateWithStm propagate_with_stm(const PhaseState<Real>& state0, const Real& t_end,
                                const SystemParams<Real>& params, const IntegratorConfig& config);

}  // namespace ertbp
