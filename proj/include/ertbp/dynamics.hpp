// Physical model of the elliptic restricted three-body problem: constants,
// normalized units, primary motion and the spacecraft equations of motion.
//
// Normalized units: 1 ud is the aphelion separation r0, 1 um is m1+m2 and
// 1 ut is chosen so that G = 1. Time t = 0 is the aphelion (theta = 0).
#pragma once

#include "ertbp/errors.hpp"
#include "ertbp/linalg.hpp"
#include "ertbp/real.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace ertbp {

/// Converts a decimal literal to S at full precision of S.
template <typename S>
S from_decimal(const char* text) {
    if constexpr (std::is_same_v<S, Real>) {
        return parse_real(text);
    } else {
        return S(std::stold(text));
    }
}

template <typename S>
struct SystemParams {
    S m1;  ///< kg
    S m2;  ///< kg
    S e;   ///< eccentricity of the primaries' relative orbit
    S r0;  ///< aphelion separation, m
    S G;   ///< m^3 kg^-1 s^-2
    S mu;  ///< m2/(m1+m2); drives the normalized dynamics

    /// Sun-Jupiter values used for the reference orbit. The mass ratio is the
    /// quoted 0.000953339 rather than m2/(m1+m2) from the masses, which agree
    /// only to about six digits.
    static SystemParams sun_jupiter() {
        return {from_decimal<S>("1.989e30"), from_decimal<S>("1898e24"),
                from_decimal<S>("0.048"),    from_decimal<S>("815.757e9"),
                from_decimal<S>("6.67408e-11"), from_decimal<S>("0.000953339")};
    }

    /// Builds params whose mass ratio is derived from the masses.
    static SystemParams from_masses(S m1, S m2, S e, S r0, S G) {
        S mu = m2 / (m1 + m2);
        return {std::move(m1), std::move(m2), std::move(e), std::move(r0), std::move(G),
                std::move(mu)};
    }

    S mass_ratio_from_masses() const { return S(m2 / (m1 + m2)); }

    void validate() const {
        if (!(e >= 0 && e < 1)) throw Error(ErrorKind::Config, "eccentricity must satisfy 0 <= e < 1");
        if (!(mu >= 0 && mu < S(0.5))) throw Error(ErrorKind::Config, "mass ratio must satisfy 0 <= mu < 1/2");
        if (!(m1 > 0 && m2 > 0 && r0 > 0 && G > 0))
            throw Error(ErrorKind::Config, "masses, r0 and G must be positive");
    }
};

template <typename S>
struct UnitSystem {
    S ud_in_m;
    S ut_in_s;
    S um_in_kg;
};

template <typename S>
struct PhaseState {
    S t;      ///< ut
    S theta;  ///< true anomaly of the primaries, measured from aphelion
    Vec2<S> z;
    Vec2<S> v;
};

/// Sign of the spacecraft force. The attractive law is the physical one;
/// the repulsive variant literally transcribes a sign slip kept for
/// falsification runs only.
enum class ForceLaw { Attractive, RepulsiveAsPrinted };

struct AccelerationOptions {
    double collision_floor = 1e-12;  ///< ud
    ForceLaw law = ForceLaw::Attractive;
};

template <typename S>
S theta_rate(const S& theta, const S& e) {
    using std::cos;
    using std::pow;
    S q = 1 - e * cos(theta);
    return S(q * q / pow(S(1 - e), S(1.5)));
}

template <typename S>
struct PrimaryPositions {
    Vec2<S> x;  ///< heavy primary (Sun)
    Vec2<S> y;  ///< light primary (Jupiter)
};

template <typename S>
PrimaryPositions<S> primary_positions(const S& theta, const SystemParams<S>& p) {
    using std::cos;
    using std::sin;
    S c = cos(theta);
    S s = sin(theta);
    S rho = (1 - p.e) / (1 - p.e * c);
    Vec2<S> dir{c, s};
    return {dir * S(-p.mu * rho), dir * S((1 - p.mu) * rho)};
}

/// Acceleration of the spacecraft in ud/ut^2. A primary of zero mass exerts
/// no force and cannot collide.
template <typename S>
Vec2<S> spacecraft_acceleration(const PhaseState<S>& state, const SystemParams<S>& p,
                                const AccelerationOptions& opt = {}) {
    const auto [x, y] = primary_positions(state.theta, p);
    const Vec2<S> dx = x - state.z;
    const S rx = norm(dx);
    Vec2<S> a = dx * S((1 - p.mu) / (rx * rx * rx));
    bool collided = rx < opt.collision_floor;
    if (p.mu != 0) {
        const Vec2<S> dy = y - state.z;
        const S ry = norm(dy);
        collided = collided || ry < opt.collision_floor;
        a += dy * S(p.mu / (ry * ry * ry));
    }
    if (collided) {
        throw Error(ErrorKind::CollisionSingularity,
                    "spacecraft within collision floor of a primary at t=" +
                        format_general(Real(state.t), 12));
    }
    if (opt.law == ForceLaw::RepulsiveAsPrinted) a = -a;
    return a;
}

/// Period of the primaries in ut: 2*pi/(1+e)^(3/2).
template <typename S>
S orbital_period(const S& e) {
    using std::pow;
    return S(2 * real_pi<S>() / pow(S(1 + e), S(1.5)));
}

template <typename S>
UnitSystem<S> unit_system(const SystemParams<S>& p) {
    using std::sqrt;
    if (!(p.m1 > 0 && p.m2 > 0 && p.r0 > 0 && p.G > 0))
        throw Error(ErrorKind::Config, "masses, r0 and G must be positive");
    S total = p.m1 + p.m2;
    return {p.r0, S(sqrt(p.r0 * p.r0 * p.r0 / (p.G * total))), total};
}

enum class Quantity { Length, Time, Velocity };
enum class Direction { ToSi, FromSi };

template <typename S>
S convert(const S& value, Quantity kind, Direction dir, const UnitSystem<S>& u) {
    S scale = [&]() -> S {
        switch (kind) {
            case Quantity::Length: return u.ud_in_m;
            case Quantity::Time: return u.ut_in_s;
            case Quantity::Velocity: return S(u.ud_in_m / u.ut_in_s);
        }
        return S(1);
    }();
    return dir == Direction::ToSi ? S(value * scale) : S(value / scale);
}

/// Initial condition of the near-periodic reference orbit, at aphelion.
template <typename S>
PhaseState<S> reference_initial_state() {
    return {S(0), S(0),
            {from_decimal<S>("-0.038063861100"), from_decimal<S>("0.30182501850")},
            {from_decimal<S>("-1.6227600677"), from_decimal<S>("-1.5096541883")}};
}

}  // namespace ertbp
