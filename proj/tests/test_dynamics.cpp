#include "doctest.h"
#include "support.hpp"

#include "ertbp/dynamics.hpp"

using namespace ertbp;
using test::Dec;

namespace {

const Dec kE("0.048");
const Dec kMu("0.000953339");

Dec dec_pi() { return boost::math::constants::pi<Dec>(); }

}  // namespace

TEST_CASE("theta_rate matches the closed form in decimal arithmetic") {
    const Real e = parse_real("0.048");
    CHECK(theta_rate(Real(1.234), Real(0)) == 1);
    CHECK(test::rel_diff(theta_rate(Real(0), e), sqrt(Dec(1) - kE)) < 1e-33);

    const Dec q = 1 + kE;
    const Dec one_minus = 1 - kE;
    const Dec at_pi = q * q / (one_minus * sqrt(one_minus));
    CHECK(test::rel_diff(theta_rate(pi(), e), at_pi) < 1e-33);

    for (int i = 0; i < 200; ++i) {
        const Real th = test::uniform(-10, 10);
        const Real ee = test::uniform(0, 0.999);
        CHECK(theta_rate(th, ee) > 0);
    }
}

TEST_CASE("primary positions against decimal oracle") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const Real th = parse_real("0.7");
    const auto [x, y] = primary_positions(th, p);

    const Dec c = cos(Dec("0.7"));
    const Dec s = sin(Dec("0.7"));
    const Dec rho = (1 - kE) / (1 - kE * c);
    CHECK(test::rel_diff(x.x, -kMu * rho * c) < 1e-32);
    CHECK(test::rel_diff(x.y, -kMu * rho * s) < 1e-32);
    CHECK(test::rel_diff(y.x, (1 - kMu) * rho * c) < 1e-32);
    CHECK(test::rel_diff(y.y, (1 - kMu) * rho * s) < 1e-32);
}

TEST_CASE("center of mass stays at the origin") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const Real tol = 10 * test::eps();
    for (int i = 0; i < 1000; ++i) {
        const Real th = test::uniform(-20, 20);
        const auto [x, y] = primary_positions(th, p);
        const Vec2<Real> com = x * Real(1 - p.mu) + y * p.mu;
        CHECK(norm(com) <= tol * p.mu);
    }
}

TEST_CASE("separation of the primaries is bounded by perihelion and aphelion") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const Real lo = (1 - p.e) / (1 + p.e);
    const Real slack = 10 * test::eps();
    for (int i = 0; i < 500; ++i) {
        const auto [x, y] = primary_positions(Real(test::uniform(0, 7)), p);
        const Real d = norm(y - x);
        CHECK(d >= lo - slack);
        CHECK(d <= 1 + slack);
    }
    const auto [x0, y0] = primary_positions(Real(0), p);
    CHECK(abs(norm(y0 - x0) - 1) < slack);
    const auto [xp, yp] = primary_positions(pi(), p);
    CHECK(abs(norm(yp - xp) - lo) < slack);
}

TEST_CASE("spacecraft acceleration against decimal oracle") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const auto s = reference_initial_state<Real>();
    const Vec2<Real> a = spacecraft_acceleration(s, p);

    // theta = 0: primaries on the x axis at -mu and 1 - mu.
    const Dec z1("-0.038063861100"), z2("0.30182501850");
    auto pull = [&](Dec px, Dec m, Dec& ax, Dec& ay) {
        const Dec dx = px - z1, dy = -z2;
        const Dec r = sqrt(dx * dx + dy * dy);
        ax += m * dx / (r * r * r);
        ay += m * dy / (r * r * r);
    };
    Dec ax = 0, ay = 0;
    pull(-kMu, 1 - kMu, ax, ay);
    pull(1 - kMu, kMu, ax, ay);
    CHECK(test::rel_diff(a.x, ax) < 1e-32);
    CHECK(test::rel_diff(a.y, ay) < 1e-32);

    AccelerationOptions printed;
    printed.law = ForceLaw::RepulsiveAsPrinted;
    const Vec2<Real> b = spacecraft_acceleration(s, p, printed);
    CHECK(b.x == -a.x);
    CHECK(b.y == -a.y);
}

TEST_CASE("collision with a primary is reported") {
    const auto p = SystemParams<Real>::sun_jupiter();
    PhaseState<Real> s{Real(0), Real(0), {Real(-p.mu), Real(0)}, {Real(0), Real(0)}};
    try {
        spacecraft_acceleration(s, p);
        FAIL("expected CollisionSingularity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CollisionSingularity);
    }
    // A massless primary exerts no force and cannot collide.
    auto kep = test::kepler_params();
    s.z = {Real(1), Real(0)};
    CHECK_NOTHROW(spacecraft_acceleration(s, kep));
}

TEST_CASE("orbital period and unit system") {
    const Dec T = 2 * dec_pi() / pow(1 + kE, Dec(1.5));
    CHECK(test::rel_diff(orbital_period(parse_real("0.048")), T) < 1e-33);
    CHECK(abs(orbital_period(Real(0)) - 2 * pi()) < test::eps());

    const auto p = SystemParams<Real>::sun_jupiter();
    const auto u = unit_system(p);
    const Dec r0("815.757e9"), G("6.67408e-11"), M = Dec("1.989e30") + Dec("1898e24");
    CHECK(test::rel_diff(u.ut_in_s, sqrt(r0 * r0 * r0 / (G * M))) < 1e-32);
    CHECK(u.ud_in_m == p.r0);
    CHECK(u.um_in_kg == p.m1 + p.m2);
}

TEST_CASE("unit conversions round trip within two ulps") {
    const auto u = unit_system(SystemParams<Real>::sun_jupiter());
    for (Quantity q : {Quantity::Length, Quantity::Time, Quantity::Velocity}) {
        for (int i = 0; i < 100; ++i) {
            const Real v = Real(test::uniform(-1, 1)) * pow(Real(10), static_cast<int>(test::uniform(-12, 3)));
            const Real back = convert(convert(v, q, Direction::ToSi, u), q, Direction::FromSi, u);
            CHECK(abs(back - v) <= 2 * test::eps() * abs(v));
        }
    }
    // 1 ud/ut is ud_in_m / ut_in_s.
    CHECK(convert(Real(1), Quantity::Velocity, Direction::ToSi, u) == u.ud_in_m / u.ut_in_s);
}

TEST_CASE("mass ratio from the masses agrees with the quoted ratio to six digits") {
    const auto p = SystemParams<Real>::sun_jupiter();
    const Real rel = abs(p.mass_ratio_from_masses() / p.mu - 1);
    CHECK(rel < 1e-6);
    CHECK(rel > 1e-9);  // the two are not identical
    const auto q = SystemParams<Real>::from_masses(p.m1, p.m2, p.e, p.r0, p.G);
    CHECK(q.mu == p.m2 / (p.m1 + p.m2));
}

TEST_CASE("parameter validation") {
    auto p = SystemParams<Real>::sun_jupiter();
    CHECK_NOTHROW(p.validate());
    p.e = 1;
    CHECK_THROWS_AS(p.validate(), Error);
    p = SystemParams<Real>::sun_jupiter();
    p.mu = Real(0.5);
    CHECK_THROWS_AS(p.validate(), Error);
    p = SystemParams<Real>::sun_jupiter();
    p.r0 = 0;
    CHECK_THROWS_AS(p.validate(), Error);
}
