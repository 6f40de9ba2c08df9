#include "ertbp/periodicity.hpp"

#include "ertbp/errors.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <thread>
#include <utility>

namespace ertbp {

namespace {

Real infinity() { return std::numeric_limits<Real>::infinity(); }

PhaseState<Real> adopt_state(const PhaseState<Real>& s) {
    return {adopt(s.t), adopt(s.theta), {adopt(s.z.x), adopt(s.z.y)}, {adopt(s.v.x), adopt(s.v.y)}};
}

Vec4 add_scaled(const Vec4& x, const Real& k, const Vec4& d) {
    return {Real(x[0] + k * d[0]), Real(x[1] + k * d[1]), Real(x[2] + k * d[2]), Real(x[3] + k * d[3])};
}

// Pseudo-inverse solve of a x = b keeping singular values above the cutoff.
Vec4 min_norm_solve(const Svd4& s, const Vec4& b, const Real& cutoff, unsigned& rank) {
    Vec4 x{Real(0), Real(0), Real(0), Real(0)};
    rank = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        if (!(s.sigma[j] > cutoff)) continue;
        ++rank;
        Real ub(0);
        for (std::size_t i = 0; i < 4; ++i) ub += s.u(i, j) * b[i];
        ub /= s.sigma[j];
        for (std::size_t i = 0; i < 4; ++i) x[i] += ub * s.v(i, j);
    }
    return x;
}

}  // namespace

ClosureResidual closure_residual(const PhaseState<Real>& ic_in, const SystemParams<Real>& params,
                                 const IntegratorConfig& config, const std::optional<Real>& period) {
    PrecisionScope scope(config.precision_digits);
    const PhaseState<Real> ic = adopt_state(ic_in);
    const Real T = period ? adopt(*period) : orbital_period(adopt(params.e));
    ClosureResidual r;
    r.final_state = propagate(ic, Real(ic.t + T), params, config);
    r.dz = r.final_state.z - ic.z;
    r.dv = r.final_state.v - ic.v;
    const UnitSystem<Real> u = unit_system(params);
    auto si = [&](const Vec2<Real>& w, Quantity q) {
        return Vec2<Real>{convert(w.x, q, Direction::ToSi, u), convert(w.y, q, Direction::ToSi, u)};
    };
    r.dz_si = si(r.dz, Quantity::Length);
    r.dv_si = si(r.dv, Quantity::Velocity);
    return r;
}

Real residual_norm(const ClosureResidual& r, const Real& velocity_weight_s) {
    Real v = norm(r.dv_si) * velocity_weight_s;
    return sqrt(Real(norm2(r.dz_si) + v * v));
}

Vec4 planar_components(const PhaseState<Real>& s) { return {s.z.x, s.z.y, s.v.x, s.v.y}; }

PhaseState<Real> with_planar_components(PhaseState<Real> s, const Vec4& c) {
    s.z = {c[0], c[1]};
    s.v = {c[2], c[3]};
    return s;
}

ResidualScale ResidualScale::si(const SystemParams<Real>& params, const Real& velocity_weight_s) {
    const UnitSystem<Real> u = unit_system(params);
    return {u.ud_in_m, Real(u.ud_in_m / u.ut_in_s * velocity_weight_s)};
}

Real ResidualScale::norm(const Vec4& f) const {
    Real dz2 = f[0] * f[0] + f[1] * f[1];
    Real dv2 = f[2] * f[2] + f[3] * f[3];
    return sqrt(Real(length_scale * length_scale * dz2 + velocity_scale * velocity_scale * dv2));
}

std::string_view to_string(RefineMethod m) {
    switch (m) {
        case RefineMethod::Newton: return "newton";
        case RefineMethod::DampedNewton: return "damped_newton";
        case RefineMethod::Grid: return "grid";
    }
    return "unknown";
}

Svd4 svd4(const Mat4<Real>& a) {
    // Hestenes rotations orthogonalize the columns of w = a v.
    Mat4<Real> w = a;
    Mat4<Real> v = Mat4<Real>::identity();
    const Real eps = pow(Real(10), -Real(working_precision()));
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < 3; ++p) {
            for (std::size_t q = p + 1; q < 4; ++q) {
                Real alpha(0), beta(0), gamma(0);
                for (std::size_t i = 0; i < 4; ++i) {
                    alpha += w(i, p) * w(i, p);
                    beta += w(i, q) * w(i, q);
                    gamma += w(i, p) * w(i, q);
                }
                if (gamma == 0 || abs(gamma) <= eps * sqrt(Real(alpha * beta))) continue;
                rotated = true;
                const Real zeta = (beta - alpha) / (2 * gamma);
                const Real t = (zeta >= 0 ? Real(1) : Real(-1)) / (abs(zeta) + sqrt(Real(1 + zeta * zeta)));
                const Real c = 1 / sqrt(Real(1 + t * t));
                const Real s = c * t;
                for (std::size_t i = 0; i < 4; ++i) {
                    Real wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                    Real vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    Vec4 norms;
    for (std::size_t j = 0; j < 4; ++j) {
        Real n(0);
        for (std::size_t i = 0; i < 4; ++i) n += w(i, j) * w(i, j);
        norms[j] = sqrt(n);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });
    Svd4 out;
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = norms[j];
        for (std::size_t i = 0; i < 4; ++i) {
            out.v(i, k) = v(i, j);
            out.u(i, k) = norms[j] > 0 ? Real(w(i, j) / norms[j]) : Real(0);
        }
    }
    return out;
}

RefinementReport newton_solve(const Vec4& seed, const ShootingMap& map, const ResidualOnly& residual,
                              const ResidualScale& scale, const NewtonOptions& options) {
    RefinementReport report;
    report.method = options.damped ? RefineMethod::DampedNewton : RefineMethod::Newton;
    report.threshold_m = options.threshold_m;

    Vec4 x = seed;
    ShootingEval ev = map(x);
    Real merit = scale.norm(ev.residual);
    report.iterations.push_back({x, merit, std::nullopt, std::nullopt, std::nullopt, Real(1)});

    for (unsigned it = 0;; ++it) {
        if (merit < options.threshold_m) {
            report.converged = true;
            break;
        }
        if (it >= options.max_iterations) {
            report.note = "iteration limit reached";
            break;
        }
        RefinementIterate& cur = report.iterations.back();
        const Real det = determinant(ev.jacobian);
        const Svd4 s = svd4(ev.jacobian);
        cur.det_jacobian = det;
        cur.condition = s.sigma[3] > 0 ? Real(s.sigma[0] / s.sigma[3]) : infinity();
        if (options.policy == JacobianPolicy::Strict && abs(det) < options.det_floor) {
            throw Error(ErrorKind::SingularJacobian,
                        "|det(M - I)| = " + format_sci(abs(det), 4) + " is below the floor " +
                            format_sci(options.det_floor, 3) + "; condition estimate " +
                            format_sci(*cur.condition, 4));
        }
        const Vec4 rhs{Real(-ev.residual[0]), Real(-ev.residual[1]), Real(-ev.residual[2]),
                       Real(-ev.residual[3])};
        unsigned rank = 0;
        const Vec4 step = min_norm_solve(s, rhs, Real(options.sv_cutoff * s.sigma[0]), rank);
        cur.rank = rank;
        if (rank == 0) {
            report.note = "Jacobian vanished; no step possible";
            break;
        }

        Real k(1);
        Vec4 next = add_scaled(x, k, step);
        if (options.damped) {
            Real trial = scale.norm(residual(next));
            unsigned halvings = 0;
            while (!(trial < merit) && halvings < options.max_halvings) {
                k /= 2;
                ++halvings;
                next = add_scaled(x, k, step);
                trial = scale.norm(residual(next));
            }
            if (!(trial < merit)) {
                report.note = "no decrease after " + std::to_string(options.max_halvings) + " halvings";
                break;
            }
        }
        x = next;
        ev = map(x);
        merit = scale.norm(ev.residual);
        report.iterations.push_back({x, merit, std::nullopt, std::nullopt, std::nullopt, k});
    }
    return report;
}

RefinementReport newton_refine(const PhaseState<Real>& ic0_in, const SystemParams<Real>& params,
                               const IntegratorConfig& config, const NewtonOptions& options) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    const PhaseState<Real> ic0 = adopt_state(ic0_in);
    const Real T = orbital_period(adopt(params.e));
    const Real t_end = ic0.t + T;

    ShootingMap map = [&](const Vec4& c) {
        StateWithStm s = propagate_with_stm(with_planar_components(ic0, c), t_end, params, config);
        Vec4 fin = planar_components(s.state);
        ShootingEval ev;
        for (std::size_t i = 0; i < 4; ++i) ev.residual[i] = fin[i] - c[i];
        ev.jacobian = s.stm - Mat4<Real>::identity();
        return ev;
    };
    ResidualOnly residual = [&](const Vec4& c) {
        Vec4 fin = planar_components(propagate(with_planar_components(ic0, c), t_end, params, config));
        Vec4 f;
        for (std::size_t i = 0; i < 4; ++i) f[i] = fin[i] - c[i];
        return f;
    };
    RefinementReport report =
        newton_solve(planar_components(ic0), map, residual,
                     ResidualScale::si(params, adopt(options.velocity_weight_s)), options);
    report.initial = ic0;
    report.final = with_planar_components(ic0, report.iterations.back().candidate);
    return report;
}

RefinementReport grid_search(const PhaseState<Real>& center_in, const SystemParams<Real>& params,
                             const IntegratorConfig& config, const GridOptions& options) {
    config.validate();
    if (options.samples_per_axis < 1)
        throw Error(ErrorKind::InvalidArgument, "samples_per_axis must be at least 1");
    const std::size_t n = options.samples_per_axis;
    const double total = static_cast<double>(n) * n * n * n;
    if (total > static_cast<double>(options.budget)) {
        throw Error(ErrorKind::BudgetExceeded, "lattice of " + std::to_string(n) + "^4 points exceeds the budget of " +
                                                   std::to_string(options.budget) + " propagations");
    }
    PrecisionScope scope(config.precision_digits);
    const PhaseState<Real> center = adopt_state(center_in);
    const Vec4 c0 = planar_components(center);
    const std::size_t count = n * n * n * n;
    const Real T = orbital_period(adopt(params.e));
    const ResidualScale scale = ResidualScale::si(params, adopt(options.velocity_weight_s));

    auto lattice_point = [&](std::size_t index) {
        Vec4 c;
        std::size_t rest = index;
        for (int axis = 3; axis >= 0; --axis) {
            const std::size_t k = rest % n;
            rest /= n;
            const auto a = static_cast<std::size_t>(axis);
            const Real w = adopt(options.half_widths[a]);
            Real offset = n == 1 ? Real(0) : Real(-w + 2 * w * Real(k) / Real(n - 1));
            c[a] = c0[a] + offset;
        }
        return c;
    };

    RefinementReport report;
    report.method = RefineMethod::Grid;
    report.initial = center;
    report.iterations.resize(count);
    auto evaluate = [&](std::size_t index) {
        Vec4 c = lattice_point(index);
        Real merit;
        try {
            Vec4 fin = planar_components(propagate(with_planar_components(center, c), Real(center.t + T), params, config));
            Vec4 f;
            for (std::size_t i = 0; i < 4; ++i) f[i] = fin[i] - c[i];
            merit = scale.norm(f);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CollisionSingularity) throw;
            merit = infinity();
        }
        report.iterations[index] = {std::move(c), std::move(merit), std::nullopt, std::nullopt, std::nullopt, Real(1)};
    };

    unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) evaluate(i);
    } else {
        // Strided partition; results land in their own slots.
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < count; i += workers) evaluate(i);
            }));
        }
        for (auto& j : jobs) j.get();
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < count; ++i)
        if (report.iterations[i].residual_norm < report.iterations[best].residual_norm) best = i;
    report.final = with_planar_components(center, report.iterations[best].candidate);
    report.threshold_m = adopt(options.threshold_m);
    report.converged = report.iterations[best].residual_norm < report.threshold_m;
    report.note = "best lattice index " + std::to_string(best) + " of " + std::to_string(count);
    return report;
}

}  // namespace ertbp
