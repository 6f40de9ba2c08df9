#include "ertbp/cross_check.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace ertbp {

namespace {

using State5 = std::array<Real, 5>;  // theta, z1, z2, v1, v2

class Rhs {
public:
    Rhs(const SystemParams<Real>& p, const AccelerationOptions& accel, CrossCheckStats& stats)
        : params_(p), accel_(accel), stats_(stats) {}

    State5 operator()(const Real& t, const State5& y) const {
        ++stats_.rhs_evaluations;
        PhaseState<Real> s{t, y[0], {y[1], y[2]}, {y[3], y[4]}};
        Vec2<Real> a = spacecraft_acceleration(s, params_, accel_);
        return {theta_rate(y[0], params_.e), y[3], y[4], a.x, a.y};
    }

private:
    const SystemParams<Real>& params_;
    AccelerationOptions accel_;
    CrossCheckStats& stats_;
};

// Modified midpoint rule over [t, t+H] with n substeps (n even).
State5 midpoint(const Rhs& f, const Real& t, const State5& y, const Real& H, unsigned n) {
    const Real h = H / n;
    const Real two_h = 2 * h;
    State5 prev = y;
    State5 cur;
    State5 d = f(t, y);
    for (std::size_t i = 0; i < 5; ++i) cur[i] = y[i] + h * d[i];
    for (unsigned m = 1; m < n; ++m) {
        d = f(t + h * m, cur);
        for (std::size_t i = 0; i < 5; ++i) {
            Real next = prev[i] + two_h * d[i];
            prev[i] = std::move(cur[i]);
            cur[i] = std::move(next);
        }
    }
    return cur;
}

}  // namespace

PhaseState<Real> cross_check_integrate(const PhaseState<Real>& state0, const Real& t_end,
                                       const SystemParams<Real>& params_in, const Real& tolerance,
                                       const CrossCheckOptions& options, CrossCheckStats* stats_out) {
    PrecisionScope scope(options.precision_digits);
    CrossCheckStats stats;
    SystemParams<Real> params{adopt(params_in.m1), adopt(params_in.m2), adopt(params_in.e),
                              adopt(params_in.r0), adopt(params_in.G),  adopt(params_in.mu)};
    const Real tol = adopt(tolerance);
    const Real t0 = adopt(state0.t);
    const Real te = adopt(t_end);
    if (te < t0) throw Error(ErrorKind::InvalidArgument, "t_end precedes the initial time");
    const Real unit_roundoff = pow(Real(10), -Real(options.precision_digits));
    if (!(tol > 0) || tol < 100 * unit_roundoff) {
        throw Error(ErrorKind::ToleranceNotMet,
                    "tolerance " + format_sci(tol, 3) + " is below what " +
                        std::to_string(options.precision_digits) + "-digit arithmetic can deliver");
    }

    State5 y{adopt(state0.theta), adopt(state0.z.x), adopt(state0.z.y), adopt(state0.v.x),
             adopt(state0.v.y)};
    if (te == t0) return {te, y[0], {y[1], y[2]}, {y[3], y[4]}};

    Rhs f(params, options.accel, stats);
    const unsigned kmax = std::max(3u, options.max_columns);
    std::vector<unsigned> seq(kmax);
    for (unsigned j = 0; j < kmax; ++j) seq[j] = 2 * (j + 1);

    Real t = t0;
    Real H = min(Real(te - t0), Real(1e-2));
    const Real min_step = (abs(te) + 1) * unit_roundoff * 1000;

    while (t < te) {
        if (stats.accepted + stats.rejected >= options.max_steps)
            throw Error(ErrorKind::ToleranceNotMet, "step budget exhausted before reaching t_end");
        bool last = false;
        if (t + H >= te) {
            H = te - t;
            last = true;
        }
        if (H < min_step && !last)
            throw Error(ErrorKind::ToleranceNotMet, "step size collapsed below the precision floor");

        bool accepted = false;
        Real err;
        unsigned k_used = 0;
        State5 candidate;
        std::vector<State5> prev_row, row;
        for (unsigned j = 0; j < kmax; ++j) {
            row.assign(j + 1, State5{});
            row[0] = midpoint(f, t, y, H, seq[j]);
            for (unsigned k = 1; k <= j; ++k) {
                Real ratio = Real(seq[j]) / Real(seq[j - k]);
                Real denom = ratio * ratio - 1;
                for (std::size_t i = 0; i < 5; ++i)
                    row[k][i] = row[k - 1][i] + (row[k - 1][i] - prev_row[k - 1][i]) / denom;
            }
            prev_row.swap(row);
            if (j < 2) continue;
            const State5& best = prev_row[j];
            const State5& lower = prev_row[j - 1];
            err = Real(0);
            for (std::size_t i = 0; i < 5; ++i) {
                Real sc = tol * (1 + max(abs(y[i]), Real(abs(best[i]))));
                err = max(err, Real(abs(best[i] - lower[i]) / sc));
            }
            if (err <= 1) {
                accepted = true;
                k_used = j;
                candidate = best;
                break;
            }
        }

        if (!accepted) {
            ++stats.rejected;
            H /= 4;
            continue;
        }
        ++stats.accepted;
        t = last ? te : Real(t + H);
        y = candidate;
        // Aim for acceptance around the middle of the table.
        Real fac = err > 0 ? Real(Real(0.94) * pow(Real(0.65) / err, Real(1) / Real(2 * k_used + 1)))
                           : Real(4);
        fac = min(Real(4), max(Real(0.2), fac));
        if (k_used + 1 < kmax / 2) fac = max(fac, Real(1.5));
        if (k_used + 2 >= kmax) fac = min(fac, Real(0.7));
        H *= fac;
    }
    if (stats_out) *stats_out = stats;
    return {te, y[0], {y[1], y[2]}, {y[3], y[4]}};
}

}  // namespace ertbp
