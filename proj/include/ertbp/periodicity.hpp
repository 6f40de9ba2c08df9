// One-period closure of an initial condition and its refinement toward a
// periodic orbit by Newton shooting or a bounded lattice search.
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/linalg.hpp"
#include "ertbp/real.hpp"
#include "ertbp/taylor.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ertbp {

struct ClosureResidual {
    Vec2<Real> dz;     ///< z(T) - z(0), ud
    Vec2<Real> dv;     ///< v(T) - v(0), ud/ut
    Vec2<Real> dz_si;  ///< m
    Vec2<Real> dv_si;  ///< m/s
    PhaseState<Real> final_state;
};

/// Residual after propagating `ic` over `period` (default: the primaries'
/// period T). SI fields use the unit system of `params`.
ClosureResidual closure_residual(const PhaseState<Real>& ic, const SystemParams<Real>& params,
                                 const IntegratorConfig& config,
                                 const std::optional<Real>& period = std::nullopt);

/// Scalar merit sqrt(|dz_si|^2 + (|dv_si| * velocity_weight_s)^2) in meters.
Real residual_norm(const ClosureResidual& r, const Real& velocity_weight_s = Real(1));

using Vec4 = std::array<Real, 4>;

Vec4 planar_components(const PhaseState<Real>& s);
PhaseState<Real> with_planar_components(PhaseState<Real> s, const Vec4& c);

/// Residual F(x) = phi_T(x) - x of a shooting map together with its
/// Jacobian (M - I).
struct ShootingEval {
    Vec4 residual;  ///< normalized units
    Mat4<Real> jacobian;
};
using ShootingMap = std::function<ShootingEval(const Vec4&)>;
using ResidualOnly = std::function<Vec4(const Vec4&)>;

/// Weights turning a normalized residual into the SI merit:
/// sqrt((length_scale |dz|)^2 + (velocity_scale |dv|)^2).
struct ResidualScale {
    Real length_scale = Real(1);
    Real velocity_scale = Real(1);

    static ResidualScale si(const SystemParams<Real>& params, const Real& velocity_weight_s);
    Real norm(const Vec4& residual) const;
};

enum class RefineMethod { Newton, DampedNewton, Grid };
std::string_view to_string(RefineMethod m);

/// MinimumNorm solves (M - I) dx = -F by truncated SVD, which stays defined
/// on families of periodic orbits where M - I is rank deficient. Strict
/// throws SingularJacobian when |det(M - I)| falls below det_floor.
enum class JacobianPolicy { MinimumNorm, Strict };

struct NewtonOptions {
    unsigned max_iterations = 10;
    bool damped = false;
    unsigned max_halvings = 8;
    JacobianPolicy policy = JacobianPolicy::MinimumNorm;
    Real threshold_m = Real(1);
    Real velocity_weight_s = Real(1);
    Real det_floor = Real(1e-30);
    /// Singular values below sv_cutoff * sigma_max are treated as zero.
    Real sv_cutoff = Real(1e-14);
};

struct RefinementIterate {
    Vec4 candidate;
    Real residual_norm;  ///< m
    /// Jacobian diagnostics at this candidate; absent for lattice points and
    /// for the last iterate when no further step was taken.
    std::optional<Real> det_jacobian;
    std::optional<Real> condition;  ///< sigma_max / sigma_min, inf if singular
    std::optional<unsigned> rank;
    Real step_scale = Real(1);
};

struct RefinementReport {
    PhaseState<Real> initial;
    PhaseState<Real> final;
    std::vector<RefinementIterate> iterations;
    bool converged = false;
    RefineMethod method = RefineMethod::Newton;
    Real threshold_m;
    std::string note;
};

/// Newton iteration on an arbitrary shooting map. The first iterate is the
/// seed itself.
RefinementReport newton_solve(const Vec4& seed, const ShootingMap& map, const ResidualOnly& residual,
                              const ResidualScale& scale, const NewtonOptions& options);

/// Newton shooting for closure over the primaries' period, with the
/// Jacobian M - I rebuilt from the variational equations at each iterate.
RefinementReport newton_refine(const PhaseState<Real>& ic0, const SystemParams<Real>& params,
                               const IntegratorConfig& config, const NewtonOptions& options = {});

struct GridOptions {
    unsigned samples_per_axis = 3;
    Vec4 half_widths{Real(0), Real(0), Real(0), Real(0)};
    std::size_t budget = 100'000;
    Real velocity_weight_s = Real(1);
    Real threshold_m = Real(1);
    /// Concurrent candidate evaluations; 0 = hardware concurrency.
    unsigned workers = 0;
};

/// Exhaustive search over the samples_per_axis^4 lattice centered on
/// `center`. Every lattice point is recorded in index order (axis 0 most
/// significant); the best is the first minimum in that order. Points that
/// hit a primary are recorded with an infinite norm.
RefinementReport grid_search(const PhaseState<Real>& center, const SystemParams<Real>& params,
                             const IntegratorConfig& config, const GridOptions& options);

/// Singular values of a 4x4 matrix (descending) by one-sided Jacobi.
struct Svd4 {
    Mat4<Real> u;
    Vec4 sigma;
    Mat4<Real> v;
};
Svd4 svd4(const Mat4<Real>& a);

}  // namespace ertbp
