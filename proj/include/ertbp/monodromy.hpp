// Monodromy matrix of the planar spacecraft state over one period, its
// eigenvalues (Floquet multipliers) and a linear-stability report.
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/linalg.hpp"
#include "ertbp/real.hpp"
#include "ertbp/taylor.hpp"

#include <array>
#include <string_view>

namespace ertbp {

enum class StmMethod { Variational, CentralDifference };

struct Monodromy {
    Mat4<Real> matrix;  ///< d(z(T), v(T)) / d(z(0), v(0))
    Real period;
    StmMethod method = StmMethod::Variational;
    PhaseState<Real> final_state;  ///< unperturbed state at t0 + period
};

struct StmOptions {
    StmMethod method = StmMethod::Variational;
    /// Symmetric perturbation of the central-difference path, in ud (ud/ut
    /// for velocities).
    Real delta = Real(1e-10);
    /// Worker threads for the eight perturbed propagations; 0 = hardware.
    unsigned workers = 0;
};

/// theta is excluded from the matrix: the primaries do not feel the
/// spacecraft, so only the four planar coordinates are linearized.
Monodromy state_transition_matrix(const PhaseState<Real>& state0, const Real& period,
                                  const SystemParams<Real>& params, const IntegratorConfig& config,
                                  const StmOptions& options = {});

/// Monic characteristic polynomial coefficients c0..c3 of
/// lambda^4 + c3 lambda^3 + c2 lambda^2 + c1 lambda + c0 (Faddeev-LeVerrier).
std::array<Real, 4> characteristic_polynomial(const Mat4<Real>& m);

/// Roots of a monic real quartic. The quartic is split into two real
/// quadratics through the largest root of its resolvent cubic, so nonreal
/// roots come out in exact conjugate pairs; each root then receives one
/// Newton polish on the full quartic. Ill-conditioned splits are redone at
/// 200 digits. Roots are ordered by decreasing real part, with the
/// positive-imaginary member of a pair first.
std::array<Complex<Real>, 4> quartic_roots(const std::array<Real, 4>& coeffs);

/// Eigenvalues of a real 4x4 matrix (with multiplicity).
std::array<Complex<Real>, 4> eigenvalues_4x4(const Mat4<Real>& m);

enum class Stability { Stable, Unstable, Marginal };
std::string_view to_string(Stability s);

struct StabilityReport {
    std::array<Complex<Real>, 4> eigenvalues;
    std::array<Real, 4> moduli;
    std::array<Real, 4> moduli_minus_one;
    Stability classification = Stability::Marginal;
    /// Some modulus is within tolerance of one; the spectral test cannot
    /// separate the multiplier from the unit circle.
    bool on_unit_circle = false;
    bool distinct = false;
    Real modulus_tolerance;
};

/// Stable iff every |lambda| <= 1 + tolerance and all four eigenvalues are
/// pairwise separated by more than tolerance; unstable if some modulus
/// exceeds 1 + tolerance; marginal otherwise (repeated multipliers).
StabilityReport classify_stability(const std::array<Complex<Real>, 4>& eigenvalues,
                                   const Real& tolerance);

}  // namespace ertbp
