#include "doctest.h"
#include "support.hpp"

#include "ertbp/monodromy.hpp"

using namespace ertbp;

namespace {

Complex<Real> c(double re, double im = 0) { return {Real(re), Real(im)}; }

Mat4<Real> random_matrix(double lo, double hi) {
    Mat4<Real> m;
    for (auto& x : m.a) x = test::uniform(lo, hi);
    return m;
}

Complex<Real> eval_char_poly(const std::array<Real, 4>& k, const Complex<Real>& z) {
    Complex<Real> acc{Real(1), Real(0)};
    for (int i = 3; i >= 0; --i) acc = acc * z + Complex<Real>{k[static_cast<std::size_t>(i)], Real(0)};
    return acc;
}

// Random collision-free planar state between the primaries' orbits.
PhaseState<Real> random_state() {
    const double r = test::uniform(0.2, 0.7), a = test::uniform(0, 6.28);
    const double speed = test::uniform(0.8, 1.2) / std::sqrt(r);
    return {Real(0), Real(0), {Real(r * std::cos(a)), Real(r * std::sin(a))},
            {Real(-speed * std::sin(a) + test::uniform(-0.1, 0.1)), Real(speed * std::cos(a))}};
}

}  // namespace

TEST_CASE("characteristic polynomial of simple matrices") {
    const auto k = characteristic_polynomial(Mat4<Real>::identity());
    // (x-1)^4 = x^4 - 4x^3 + 6x^2 - 4x + 1
    CHECK(k[0] == 1);
    CHECK(k[1] == -4);
    CHECK(k[2] == 6);
    CHECK(k[3] == -4);
}

TEST_CASE("eigenvalues of the identity and a diagonal matrix") {
    for (const auto& z : eigenvalues_4x4(Mat4<Real>::identity())) {
        CHECK(abs(z.re - 1) < 1e-30);
        CHECK(z.im == 0);
    }
    Mat4<Real> d;
    d(0, 0) = 2;
    d(1, 1) = 7;
    d(2, 2) = 3;
    d(3, 3) = 5;
    const auto ev = eigenvalues_4x4(d);
    const double expect[] = {7, 5, 3, 2};  // descending real part
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(abs(ev[i].re - expect[i]) < 1e-30);
        CHECK(ev[i].im == 0);
    }
}

TEST_CASE("quartic roots satisfy the characteristic polynomial") {
    for (int trial = 0; trial < 50; ++trial) {
        const Mat4<Real> m = random_matrix(-2, 2);
        const auto k = characteristic_polynomial(m);
        const auto ev = eigenvalues_4x4(m);
        const Real scale = pow(m.norm_inf(), 4);
        for (const auto& z : ev) CHECK(abs(eval_char_poly(k, z)) < 1e-25 * scale);

        // Nonreal roots come in exact conjugate pairs.
        for (const auto& z : ev) {
            if (z.im == 0) continue;
            int partners = 0;
            for (const auto& w : ev) partners += (w.re == z.re && w.im == -z.im);
            CHECK(partners == 1);
        }
        // Trace and determinant from the roots.
        Complex<Real> sum = c(0), prod = c(1);
        for (const auto& z : ev) {
            sum = sum + z;
            prod = prod * z;
        }
        CHECK(abs(sum.re - m.trace()) < 1e-25 * m.norm_inf());
        CHECK(abs(prod.re - determinant(m)) < 1e-25 * scale);
    }
}

TEST_CASE("stability classification") {
    const Real tol(1e-8);
    auto r = classify_stability({c(2), c(0.5), c(0, 1), c(0, -1)}, tol);
    CHECK(r.classification == Stability::Unstable);

    r = classify_stability({c(1), c(1), c(1), c(1)}, tol);
    CHECK(r.classification == Stability::Marginal);
    CHECK_FALSE(r.distinct);
    CHECK(r.on_unit_circle);

    const double a = 0.3, b = 1.1;
    r = classify_stability({c(std::cos(a), std::sin(a)), c(std::cos(a), -std::sin(a)), c(std::cos(b), std::sin(b)),
                            c(std::cos(b), -std::sin(b))},
                           tol);
    CHECK(r.classification == Stability::Stable);
    CHECK(r.distinct);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.moduli[i] == abs(r.eigenvalues[i]));
        CHECK(r.moduli_minus_one[i] == r.moduli[i] - 1);
    }
    CHECK(to_string(Stability::Marginal) == "marginal");
}

TEST_CASE("zero-length period gives the identity") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto s0 = reference_initial_state<Real>();
    for (StmMethod method : {StmMethod::Variational, StmMethod::CentralDifference}) {
        StmOptions o;
        o.method = method;
        const auto m = state_transition_matrix(s0, Real(0), p, IntegratorConfig::reference(), o);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(m.matrix(i, j) == (i == j ? 1 : 0));
    }
}

TEST_CASE("Kepler circular orbit has a double unit multiplier") {
    const auto p = test::kepler_params();
    const auto m = state_transition_matrix(test::kepler_circular(), Real(2 * pi()), p, test::kepler_config(1000));
    CHECK(abs(determinant(m.matrix) - 1) < 1e-20);
    int near_one = 0;
    for (const auto& z : eigenvalues_4x4(m.matrix)) near_one += abs(z - c(1)) < 1e-6;
    CHECK(near_one >= 2);
}

TEST_CASE("symplectic determinant across random initial conditions") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto cfg = IntegratorConfig::reference();
    const Real span = orbital_period(p.e) / 20;
    int done = 0;
    while (done < 20) {
        const auto s0 = random_state();
        try {
            const auto m = state_transition_matrix(s0, span, p, cfg);
            CHECK(abs(determinant(m.matrix) - 1) < 1e-8);
            ++done;
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::CollisionSingularity);
        }
    }
}

TEST_CASE("variational and central-difference matrices agree") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto s0 = reference_initial_state<Real>();
    const auto cfg = IntegratorConfig::reference();
    const Real span = orbital_period(p.e) / 10;
    StmOptions fd;
    fd.method = StmMethod::CentralDifference;
    const auto a = state_transition_matrix(s0, span, p, cfg);
    const auto b = state_transition_matrix(s0, span, p, cfg, fd);
    const Real tol = max(Real(1e-6), Real(1e3 * fd.delta * fd.delta));
    for (std::size_t k = 0; k < 16; ++k) CHECK(abs(a.matrix.a[k] - b.matrix.a[k]) < tol);
    CHECK(a.final_state.z.x == b.final_state.z.x);
}

TEST_CASE("central differences reject a perturbation below the precision floor") {
    StmOptions o;
    o.method = StmMethod::CentralDifference;
    o.delta = Real(1e-30);
    try {
        state_transition_matrix(reference_initial_state<Real>(), Real(0.1), SystemParams<Real>::sun_jupiter(),
                                IntegratorConfig::reference(), o);
        FAIL("expected DegenerateStep");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateStep);
    }
}
