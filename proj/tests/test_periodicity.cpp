#include "doctest.h"
#include "support.hpp"

#include "ertbp/periodicity.hpp"

using namespace ertbp;

namespace {

struct LinearMap {
    Mat4<Real> a;
    Vec4 root;

    Vec4 residual(const Vec4& x) const {
        Vec4 d;
        for (std::size_t i = 0; i < 4; ++i) d[i] = x[i] - root[i];
        return a * d;
    }
    ShootingMap map() const {
        return [this](const Vec4& x) { return ShootingEval{residual(x), a}; };
    }
    ResidualOnly only() const {
        return [this](const Vec4& x) { return residual(x); };
    }
};

LinearMap random_linear_map() {
    LinearMap m;
    for (auto& x : m.a.a) x = test::uniform(-1, 1);
    for (std::size_t i = 0; i < 4; ++i) m.a(i, i) += 3;  // well conditioned
    for (auto& x : m.root) x = test::uniform(-1, 1);
    return m;
}

Real dist(const Vec4& a, const Vec4& b) {
    Real m(0);
    for (std::size_t i = 0; i < 4; ++i) m = max(m, Real(abs(a[i] - b[i])));
    return m;
}

IntegratorConfig kepler_cfg() { return test::kepler_config(400, 20); }

}  // namespace

TEST_CASE("closure over zero time is zero") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto r = closure_residual(reference_initial_state<Real>(), p, IntegratorConfig::reference(), Real(0));
    CHECK(r.dz.x == 0);
    CHECK(r.dz.y == 0);
    CHECK(r.dv.x == 0);
    CHECK(r.dv.y == 0);
    CHECK(residual_norm(r) == 0);
}

TEST_CASE("SI residual fields are exact conversions") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto u = unit_system(p);
    const Real span = orbital_period(p.e) / 10;
    const auto r = closure_residual(reference_initial_state<Real>(), p, IntegratorConfig::reference(), span);
    CHECK(r.dz_si.x == convert(r.dz.x, Quantity::Length, Direction::ToSi, u));
    CHECK(r.dz_si.y == convert(r.dz.y, Quantity::Length, Direction::ToSi, u));
    CHECK(r.dv_si.x == convert(r.dv.x, Quantity::Velocity, Direction::ToSi, u));
    CHECK(r.dv_si.y == convert(r.dv.y, Quantity::Velocity, Direction::ToSi, u));
    const Real w(2);
    CHECK(abs(residual_norm(r, w) - sqrt(norm2(r.dz_si) + norm2(r.dv_si) * w * w)) < 1e-25 * residual_norm(r, w));
}

TEST_CASE("closure is invariant under an SI round trip of the initial condition") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto u = unit_system(p);
    auto s0 = reference_initial_state<Real>();
    auto s1 = s0;
    auto trip = [&](Real& x, Quantity q) {
        x = convert(convert(x, q, Direction::ToSi, u), q, Direction::FromSi, u);
    };
    trip(s1.z.x, Quantity::Length);
    trip(s1.z.y, Quantity::Length);
    trip(s1.v.x, Quantity::Velocity);
    trip(s1.v.y, Quantity::Velocity);
    const Real span = orbital_period(p.e) / 10;
    const auto cfg = IntegratorConfig::reference();
    const auto a = closure_residual(s0, p, cfg, span), b = closure_residual(s1, p, cfg, span);
    CHECK(abs(a.dz_si.x - b.dz_si.x) < 1e-18);
    CHECK(abs(a.dz_si.y - b.dz_si.y) < 1e-18);
    CHECK(abs(a.dv_si.x - b.dv_si.x) < 1e-18);
}

TEST_CASE("Newton on an exactly linear map converges in one step") {
    for (int trial = 0; trial < 10; ++trial) {
        const LinearMap m = random_linear_map();
        Vec4 seed;
        for (auto& x : seed) x = test::uniform(-5, 5);
        NewtonOptions o;
        o.threshold_m = Real(1e-25);
        const auto r = newton_solve(seed, m.map(), m.only(), ResidualScale{}, o);
        REQUIRE(r.converged);
        CHECK(r.iterations.size() == 2);
        CHECK(dist(r.iterations.back().candidate, m.root) < 1e-28);
        CHECK(r.iterations.front().det_jacobian.has_value());
        CHECK(abs(*r.iterations.front().det_jacobian - determinant(m.a)) < 1e-25);
    }
}

TEST_CASE("strict policy rejects a singular Jacobian, minimum norm solves it") {
    LinearMap m;
    m.a(0, 0) = 1;
    m.a(1, 1) = 2;
    m.a(2, 2) = 3;  // rank 3
    m.root = {Real(1), Real(2), Real(3), Real(4)};
    const Vec4 seed{Real(0), Real(0), Real(0), Real(0)};

    NewtonOptions strict;
    strict.policy = JacobianPolicy::Strict;
    strict.threshold_m = Real(1e-25);
    try {
        newton_solve(seed, m.map(), m.only(), ResidualScale{}, strict);
        FAIL("expected SingularJacobian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularJacobian);
    }

    NewtonOptions mn = strict;
    mn.policy = JacobianPolicy::MinimumNorm;
    const auto r = newton_solve(seed, m.map(), m.only(), ResidualScale{}, mn);
    CHECK(r.converged);
    CHECK(*r.iterations.front().rank == 3);
    // The minimum-norm step leaves the null direction untouched.
    CHECK(r.iterations.back().candidate[3] == 0);
}

TEST_CASE("damped Newton halves an overshooting step") {
    // F(x) = atan-like saturating map along axis 0; identity elsewhere.
    const ShootingMap map = [](const Vec4& x) {
        ShootingEval ev;
        ev.jacobian = Mat4<Real>::identity();
        ev.residual = x;
        ev.residual[0] = atan(x[0]);
        ev.jacobian(0, 0) = 1 / (1 + x[0] * x[0]);
        return ev;
    };
    const ResidualOnly only = [&](const Vec4& x) { return map(x).residual; };
    const Vec4 seed{Real(3), Real(0), Real(0), Real(0)};
    NewtonOptions o;
    o.threshold_m = Real(1e-20);
    o.max_iterations = 30;
    const auto plain = newton_solve(seed, map, only, ResidualScale{}, o);
    CHECK_FALSE(plain.converged);  // plain Newton diverges for atan from |x| > 1.39

    o.damped = true;
    const auto damped = newton_solve(seed, map, only, ResidualScale{}, o);
    CHECK(damped.converged);
    bool halved = false;
    for (const auto& it : damped.iterations) halved = halved || it.step_scale < 1;
    CHECK(halved);
}

TEST_CASE("Newton recovers a periodic Kepler orbit") {
    // A circular orbit of radius 1 has period 2 pi; perturb the speed so
    // the seed's period no longer matches.
    const auto p = test::kepler_params();
    auto seed = test::kepler_circular();
    seed.v.y += Real(1e-6);
    NewtonOptions o;
    o.max_iterations = 5;
    o.threshold_m = Real(1e-12);
    const auto r = newton_refine(seed, p, kepler_cfg(), o);
    CHECK(r.converged);
    CHECK(r.iterations.size() <= 6);
    CHECK(r.iterations.front().residual_norm > 1e3);
    CHECK(r.iterations.back().residual_norm < 1e-12);
}

TEST_CASE("lattice of one point evaluates the center") {
    const auto p = test::kepler_params();
    auto center = test::kepler_circular();
    center.v.y += Real(1e-4);
    GridOptions g;
    g.samples_per_axis = 1;
    const auto r = grid_search(center, p, kepler_cfg(), g);
    REQUIRE(r.iterations.size() == 1);
    const auto direct = closure_residual(center, p, kepler_cfg());
    CHECK(abs(r.iterations[0].residual_norm / residual_norm(direct) - 1) < 1e-25);
    CHECK(r.final.v.y == center.v.y);
}

TEST_CASE("lattice best is no worse than any point") {
    const auto p = test::kepler_params();
    auto center = test::kepler_circular();
    center.v.y += Real(2e-3);
    GridOptions g;
    g.samples_per_axis = 2;
    g.half_widths = {Real(1e-3), Real(1e-3), Real(1e-3), Real(1e-3)};
    const auto r = grid_search(center, p, kepler_cfg(), g);
    REQUIRE(r.iterations.size() == 16);
    const Vec4 best = planar_components(r.final);
    Real best_norm(-1);
    for (const auto& it : r.iterations) {
        // Exhaustive re-check of the recorded norms.
        const auto direct = closure_residual(with_planar_components(center, it.candidate), p, kepler_cfg());
        CHECK(abs(it.residual_norm / residual_norm(direct) - 1) < 1e-25);
        if (dist(it.candidate, best) == 0) best_norm = it.residual_norm;
    }
    REQUIRE(best_norm >= 0);
    for (const auto& it : r.iterations) CHECK(best_norm <= it.residual_norm);
}

TEST_CASE("lattice search recovers the known periodic Kepler orbit") {
    const auto p = test::kepler_params();
    auto center = test::kepler_circular();
    center.v.y += Real(1e-3);  // the circular orbit is the first lattice point on axis 3
    GridOptions g;
    g.samples_per_axis = 3;
    g.half_widths = {Real(0), Real(0), Real(0), Real(1e-3)};
    g.threshold_m = Real(1e-6);
    const auto r = grid_search(center, p, kepler_cfg(), g);
    CHECK(r.converged);
    CHECK(r.final.z.x == 1);
    CHECK(r.final.v.y == 1);
}

TEST_CASE("uniform rescaling of the merit keeps the argmin") {
    std::vector<Vec4> residuals;
    for (int i = 0; i < 30; ++i) residuals.push_back({Real(test::uniform(-1, 1)), Real(test::uniform(-1, 1)),
                                                      Real(test::uniform(-1, 1)), Real(test::uniform(-1, 1))});
    auto argmin = [&](const ResidualScale& s) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < residuals.size(); ++i)
            if (s.norm(residuals[i]) < s.norm(residuals[best])) best = i;
        return best;
    };
    const ResidualScale a{Real(3), Real(5)}, b{Real(3e4), Real(5e4)};
    CHECK(argmin(a) == argmin(b));
}

TEST_CASE("lattice budget is enforced") {
    GridOptions g;
    g.samples_per_axis = 20;
    g.budget = 1000;
    try {
        grid_search(test::kepler_circular(), test::kepler_params(), kepler_cfg(), g);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
}

TEST_CASE("singular values of a known matrix") {
    Mat4<Real> m;
    m(0, 1) = 3;
    m(1, 0) = -2;
    m(2, 3) = Real(0.5);
    const Svd4 s = svd4(m);
    CHECK(abs(s.sigma[0] - 3) < 1e-30);
    CHECK(abs(s.sigma[1] - 2) < 1e-30);
    CHECK(abs(s.sigma[2] - Real(0.5)) < 1e-30);
    CHECK(s.sigma[3] == 0);
    // U diag(sigma) V^T reproduces the matrix.
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            Real acc(0);
            for (std::size_t k = 0; k < 4; ++k) acc += s.u(i, k) * s.sigma[k] * s.v(j, k);
            CHECK(abs(acc - m(i, j)) < 1e-30);
        }
}
