// Shared helpers for the test suites.
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/real.hpp"
#include "ertbp/taylor.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <random>

namespace ertbp::test {

/// Independent decimal arithmetic for oracles; shares nothing with MPFR.
using Dec = boost::multiprecision::cpp_dec_float_50;

inline Dec to_dec(const Real& x) { return Dec(format_sci(x, 45)); }

inline double rel_diff(const Real& a, const Dec& b) {
    const Dec d = abs(to_dec(a) - b);
    return b == 0 ? d.convert_to<double>() : Dec(d / abs(b)).convert_to<double>();
}

inline Real eps() {
    return Real(pow(Real(10), -static_cast<int>(working_precision()) + 1));
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20170217);
    return g;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

/// Circular Kepler limit: e = 0 and mu = 0, so the orbit z = (cos t, sin t)
/// has period 2 pi.
inline SystemParams<Real> kepler_params() {
    auto p = SystemParams<Real>::sun_jupiter();
    p.e = 0;
    p.mu = 0;
    return p;
}

inline PhaseState<Real> kepler_circular() {
    return {Real(0), Real(0), {Real(1), Real(0)}, {Real(0), Real(1)}};
}

inline IntegratorConfig kepler_config(unsigned steps, unsigned order = 12) {
    IntegratorConfig c;
    c.order = order;
    c.step = Real(2 * pi() / steps);
    return c;
}

}  // namespace ertbp::test
