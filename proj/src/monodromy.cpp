#include "ertbp/monodromy.hpp"

#include <algorithm>
#include <future>
#include <thread>
#include <vector>

namespace ertbp {

namespace {

PhaseState<Real> perturbed(const PhaseState<Real>& s, std::size_t coord, const Real& d) {
    PhaseState<Real> p = s;
    switch (coord) {
        case 0: p.z.x += d; break;
        case 1: p.z.y += d; break;
        case 2: p.v.x += d; break;
        default: p.v.y += d; break;
    }
    return p;
}

std::array<Real, 4> planar(const PhaseState<Real>& s) { return {s.z.x, s.z.y, s.v.x, s.v.y}; }

Mat4<Real> central_difference(const PhaseState<Real>& state0, const Real& t_end,
                              const SystemParams<Real>& params, const IntegratorConfig& config,
                              const Real& delta, unsigned workers) {
    // Jobs 2c and 2c+1 are the +delta and -delta runs of coordinate c.
    std::vector<std::array<Real, 4>> out(8);
    auto job = [&](std::size_t k) {
        const Real d = (k % 2 == 0) ? delta : Real(-delta);
        out[k] = planar(propagate(perturbed(state0, k / 2, d), t_end, params, config));
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, 8u);
    if (workers == 1) {
        for (std::size_t k = 0; k < 8; ++k) job(k);
    } else {
        std::vector<std::future<void>> pending;
        std::size_t next = 0;
        while (next < 8) {
            pending.clear();
            for (unsigned w = 0; w < workers && next < 8; ++w, ++next)
                pending.push_back(std::async(std::launch::async, job, next));
            for (auto& f : pending) f.get();
        }
    }
    Mat4<Real> m;
    const Real two_delta = 2 * delta;
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r) m(r, c) = (out[2 * c][r] - out[2 * c + 1][r]) / two_delta;
    return m;
}

}  // namespace

Monodromy state_transition_matrix(const PhaseState<Real>& state0_in, const Real& period,
                                  const SystemParams<Real>& params, const IntegratorConfig& config,
                                  const StmOptions& options) {
    config.validate();
    // Set here so worker threads inherit the precision without writing it.
    PrecisionScope scope(config.precision_digits);
    PhaseState<Real> state0{adopt(state0_in.t), adopt(state0_in.theta),
                            {adopt(state0_in.z.x), adopt(state0_in.z.y)},
                            {adopt(state0_in.v.x), adopt(state0_in.v.y)}};
    const Real T = adopt(period);
    if (T < 0) throw Error(ErrorKind::InvalidArgument, "period must be nonnegative");
    const Real t_end = state0.t + T;

    Monodromy result;
    result.period = T;
    result.method = options.method;
    if (options.method == StmMethod::Variational) {
        StateWithStm s = propagate_with_stm(state0, t_end, params, config);
        result.matrix = s.stm;
        result.final_state = s.state;
        return result;
    }

    const Real delta = adopt(options.delta);
    const Real floor = pow(Real(10), -Real(config.precision_digits) / 2);
    if (!(delta >= floor)) {
        throw Error(ErrorKind::DegenerateStep,
                    "finite-difference delta " + format_sci(delta, 3) + " is below the precision floor " +
                        format_sci(floor, 3));
    }
    result.final_state = propagate(state0, t_end, params, config);
    if (T == 0) {
        result.matrix = Mat4<Real>::identity();
        return result;
    }
    result.matrix = central_difference(state0, t_end, params, config, delta, options.workers);
    return result;
}

}  // namespace ertbp
