#include "ertbp/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ertbp {

namespace {

namespace jk = jet_kernel;

// Indices of the state variables inside SeriesBuilder::jets_.
enum : std::size_t { kTheta = 0, kZ1, kZ2, kV1, kV2, kStateDim };
// Variational block: Phi rows z1, z2, v1, v2, each with four columns.
constexpr std::size_t kPhiZ1 = kStateDim;
constexpr std::size_t kPhiZ2 = kPhiZ1 + 4;
constexpr std::size_t kPhiV1 = kPhiZ2 + 4;
constexpr std::size_t kPhiV2 = kPhiV1 + 4;
constexpr std::size_t kAugmentedDim = kPhiV2 + 4;

// Recursive jet construction for the equations of motion. The auxiliary
// jets follow the decomposition
//   q = 1 - e cos(theta), theta' = kappa q^2, rho = (1-e)/q,
//   d_i = z - x_i(theta), r_i^2 = d_i.d_i, s_i = (r_i^2)^(-3/2),
//   a = -sum m_i s_i d_i.
class SeriesBuilder {
public:
    enum class Mode { ThetaOnly, State, Variational };

    SeriesBuilder(const SystemParams<Real>& p, unsigned order, const AccelerationOptions& accel,
                  Mode mode)
        : order_(order),
          theta_only_(mode == Mode::ThetaOnly),
          variational_(mode == Mode::Variational),
          e_(adopt(p.e)),
          mu_(adopt(p.mu)),
          one_minus_mu_(1 - mu_),
          one_minus_e_(1 - e_),
          kappa_(pow(one_minus_e_, Real(-1.5))),
          floor2_(Real(accel.collision_floor) * Real(accel.collision_floor)),
          sign_(accel.law == ForceLaw::Attractive ? 1 : -1),
          has_m2_(mu_ != 0),
          jets_(variational_ ? kAugmentedDim : kStateDim, Jet<Real>(order)),
          sn_(order), cs_(order), q_(order), rho_(order), px_(order), py_(order),
          d1x_(order), d1y_(order), d2x_(order), d2y_(order),
          r1_(order), r2_(order), s1_(order), s2_(order),
          t1_(order), t2_(order),
          p1xx_(order), p1xy_(order), p1yy_(order), p2xx_(order), p2xy_(order), p2yy_(order),
          g11_(order), g12_(order), g22_(order) {}

    std::size_t dim() const { return jets_.size(); }
    const Jet<Real>& jet(std::size_t i) const { return jets_[i]; }

    void build(std::span<const Real> y0) {
        for (std::size_t i = 0; i < jets_.size(); ++i) jets_[i][0] = y0[i];
        const Real m1 = one_minus_mu_;
        const Real& m2 = mu_;
        for (std::size_t k = 0; k < order_; ++k) {
            const Real inv_k1 = Real(1) / Real(k + 1);
            jk::sin_cos_coeff(jets_[kTheta], sn_, cs_, k);
            q_[k] = (k == 0 ? Real(1) : Real(0)) - e_ * cs_[k];
            jets_[kTheta][k + 1] = kappa_ * jk::mul_coeff(q_, q_, k) * inv_k1;
            if (theta_only_) continue;

            Real num = k == 0 ? one_minus_e_ : Real(0);
            for (std::size_t j = 1; j <= k; ++j) num -= q_[j] * rho_[k - j];
            rho_[k] = num / q_[0];

            px_[k] = jk::mul_coeff(rho_, cs_, k);
            py_[k] = jk::mul_coeff(rho_, sn_, k);
            // x = -mu rho (c, s), y = (1-mu) rho (c, s)
            d1x_[k] = jets_[kZ1][k] + m2 * px_[k];
            d1y_[k] = jets_[kZ2][k] + m2 * py_[k];
            d2x_[k] = jets_[kZ1][k] - m1 * px_[k];
            d2y_[k] = jets_[kZ2][k] - m1 * py_[k];
            r1_[k] = jk::mul_coeff(d1x_, d1x_, k) + jk::mul_coeff(d1y_, d1y_, k);
            r2_[k] = jk::mul_coeff(d2x_, d2x_, k) + jk::mul_coeff(d2y_, d2y_, k);
            if (k == 0 && (r1_[0] < floor2_ || (has_m2_ && r2_[0] < floor2_))) {
                throw Error(ErrorKind::CollisionSingularity,
                            "spacecraft within collision floor of a primary at t=" +
                                format_general(t0_, 12));
            }
            s1_[k] = jk::pow_coeff(r1_, Real(-1.5), s1_, k);
            // A massless second primary contributes nothing and may sit on the
            // spacecraft; keep its jets at zero.
            s2_[k] = has_m2_ ? jk::pow_coeff(r2_, Real(-1.5), s2_, k) : Real(0);

            Real ax = -(m1 * jk::mul_coeff(s1_, d1x_, k) + m2 * jk::mul_coeff(s2_, d2x_, k));
            Real ay = -(m1 * jk::mul_coeff(s1_, d1y_, k) + m2 * jk::mul_coeff(s2_, d2y_, k));
            if (sign_ < 0) {
                ax = -ax;
                ay = -ay;
            }
            jets_[kZ1][k + 1] = jets_[kV1][k] * inv_k1;
            jets_[kZ2][k + 1] = jets_[kV2][k] * inv_k1;
            jets_[kV1][k + 1] = ax * inv_k1;
            jets_[kV2][k + 1] = ay * inv_k1;

            if (!variational_) continue;

            t1_[k] = jk::pow_coeff(r1_, Real(-2.5), t1_, k);
            t2_[k] = has_m2_ ? jk::pow_coeff(r2_, Real(-2.5), t2_, k) : Real(0);
            p1xx_[k] = jk::mul_coeff(d1x_, d1x_, k);
            p1xy_[k] = jk::mul_coeff(d1x_, d1y_, k);
            p1yy_[k] = jk::mul_coeff(d1y_, d1y_, k);
            p2xx_[k] = jk::mul_coeff(d2x_, d2x_, k);
            p2xy_[k] = jk::mul_coeff(d2x_, d2y_, k);
            p2yy_[k] = jk::mul_coeff(d2y_, d2y_, k);
            // G = -sum m_i (s_i I - 3 t_i d_i d_i^T)
            const Real three_m1 = 3 * m1;
            const Real three_m2 = 3 * m2;
            Real diag = -(m1 * s1_[k] + m2 * s2_[k]);
            g11_[k] = diag + three_m1 * jk::mul_coeff(t1_, p1xx_, k) + three_m2 * jk::mul_coeff(t2_, p2xx_, k);
            g22_[k] = diag + three_m1 * jk::mul_coeff(t1_, p1yy_, k) + three_m2 * jk::mul_coeff(t2_, p2yy_, k);
            g12_[k] = three_m1 * jk::mul_coeff(t1_, p1xy_, k) + three_m2 * jk::mul_coeff(t2_, p2xy_, k);
            if (sign_ < 0) {
                g11_[k] = -g11_[k];
                g22_[k] = -g22_[k];
                g12_[k] = -g12_[k];
            }
            for (std::size_t c = 0; c < 4; ++c) {
                const Jet<Real>& fz1 = jets_[kPhiZ1 + c];
                const Jet<Real>& fz2 = jets_[kPhiZ2 + c];
                jets_[kPhiZ1 + c][k + 1] = jets_[kPhiV1 + c][k] * inv_k1;
                jets_[kPhiZ2 + c][k + 1] = jets_[kPhiV2 + c][k] * inv_k1;
                jets_[kPhiV1 + c][k + 1] =
                    (jk::mul_coeff(g11_, fz1, k) + jk::mul_coeff(g12_, fz2, k)) * inv_k1;
                jets_[kPhiV2 + c][k + 1] =
                    (jk::mul_coeff(g12_, fz1, k) + jk::mul_coeff(g22_, fz2, k)) * inv_k1;
            }
        }
    }

    void set_time(const Real& t0) { t0_ = t0; }

    void eval(const Real& h, std::vector<Real>& out) const {
        out.resize(jets_.size());
        for (std::size_t i = 0; i < jets_.size(); ++i) out[i] = jets_[i].eval(h);
    }

    // Step from the last two coefficient norms of the physical state.
    Real adaptive_step(const Real& tol) const {
        using std::max;
        using std::min;
        Real scale(1);
        for (std::size_t i = 0; i < kStateDim; ++i) scale = max(scale, Real(abs(jets_[i][0])));
        const Real eps = tol * scale;
        auto coeff_norm = [&](std::size_t k) {
            Real n(0);
            for (std::size_t i = 0; i < kStateDim; ++i) n = max(n, Real(abs(jets_[i][k])));
            return n;
        };
        const std::size_t p = order_;
        Real h = Real(1e6);
        if (p >= 2) {
            Real a = coeff_norm(p - 1);
            if (a > 0) h = min(h, Real(pow(eps / a, Real(1) / Real(p - 1))));
        }
        Real b = coeff_norm(p);
        if (b > 0) h = min(h, Real(pow(eps / b, Real(1) / Real(p))));
        if (p >= 2) h *= exp(Real(-0.7) / Real(p - 1));
        return h;
    }

private:
    unsigned order_;
    bool theta_only_;
    bool variational_;
    Real e_, mu_, one_minus_mu_, one_minus_e_, kappa_, floor2_;
    int sign_;
    bool has_m2_;
    Real t0_;
    std::vector<Jet<Real>> jets_;
    Jet<Real> sn_, cs_, q_, rho_, px_, py_;
    Jet<Real> d1x_, d1y_, d2x_, d2y_, r1_, r2_, s1_, s2_;
    Jet<Real> t1_, t2_, p1xx_, p1xy_, p1yy_, p2xx_, p2xy_, p2yy_, g11_, g12_, g22_;
};

std::vector<Real> pack(const PhaseState<Real>& s, bool variational) {
    std::vector<Real> y{adopt(s.theta), adopt(s.z.x), adopt(s.z.y), adopt(s.v.x), adopt(s.v.y)};
    if (variational) {
        y.resize(kAugmentedDim, Real(0));
        for (std::size_t c = 0; c < 4; ++c) {
            // Row r of the identity has a one in column r.
            y[kStateDim + 4 * c + c] = Real(1);
        }
    }
    return y;
}

PhaseState<Real> unpack(const std::vector<Real>& y, const Real& t) {
    return {t, y[kTheta], {y[kZ1], y[kZ2]}, {y[kV1], y[kV2]}};
}

Mat4<Real> unpack_stm(const std::vector<Real>& y) {
    Mat4<Real> m;
    for (std::size_t c = 0; c < 4; ++c) {
        m(0, c) = y[kPhiZ1 + c];
        m(1, c) = y[kPhiZ2 + c];
        m(2, c) = y[kPhiV1 + c];
        m(3, c) = y[kPhiV2 + c];
    }
    return m;
}

// Shared stepping loop. `on_sample(index, y)` receives the packed state at
// each requested sample time; returns the packed state at t_end.
template <typename OnSample>
std::vector<Real> run(SeriesBuilder& builder, std::vector<Real> y, const Real& t0,
                      const Real& t_end, std::span<const Real> samples,
                      const SystemParams<Real>& params, const IntegratorConfig& config,
                      OnSample&& on_sample) {
    if (t_end < t0) throw Error(ErrorKind::InvalidArgument, "t_end precedes the initial time");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < t0 || samples[i] > t_end)
            throw Error(ErrorKind::InvalidArgument, "sample time outside the integration interval");
        if (i > 0 && samples[i] < samples[i - 1])
            throw Error(ErrorKind::InvalidArgument, "sample times must be sorted");
    }
    const bool fixed = config.mode == StepMode::Fixed;
    const Real h_fixed = fixed ? adopt(config.resolved_step(params)) : Real(0);
    std::size_t next = 0;
    // Samples at t0 are exact copies of the initial state.
    while (next < samples.size() && samples[next] == t0) on_sample(next++, y);
    if (t_end == t0) {
        while (next < samples.size()) on_sample(next++, y);
        return y;
    }

    std::vector<Real> scratch;
    Real t = t0;
    for (std::size_t i = 0;; ++i) {
        builder.set_time(t);
        builder.build(y);
        Real h = fixed ? h_fixed : builder.adaptive_step(config.adaptive_tolerance);
        if (!(h > 0)) throw Error(ErrorKind::DegenerateStep, "non-positive integration step");
        Real t_next = fixed ? Real(t0 + Real(i + 1) * h) : Real(t + h);
        while (next < samples.size() && samples[next] < t_next && samples[next] < t_end) {
            builder.eval(samples[next] - t, scratch);
            on_sample(next++, scratch);
        }
        if (t_next >= t_end) {
            builder.eval(t_end - t, scratch);
            while (next < samples.size()) on_sample(next++, scratch);
            return scratch;
        }
        builder.eval(h, scratch);
        y.swap(scratch);
        t = t_next;
    }
}

}  // namespace

Real reference_step() { return parse_real("0.0005856497259353531319661467"); }

IntegratorConfig IntegratorConfig::reference() {
    IntegratorConfig c;
    c.step = reference_step();
    return c;
}

void IntegratorConfig::validate() const {
    if (order < 1) throw Error(ErrorKind::Config, "integrator order must be at least 1");
    if (precision_digits < 16) throw Error(ErrorKind::Config, "precision must be at least 16 digits");
    if (step && !(*step > 0)) throw Error(ErrorKind::Config, "integrator step must be positive");
    if (mode == StepMode::Adaptive && !(adaptive_tolerance > 0))
        throw Error(ErrorKind::Config, "adaptive tolerance must be positive");
}

Real IntegratorConfig::resolved_step(const SystemParams<Real>& params) const {
    if (step) return *step;
    return orbital_period(adopt(params.e)) / 10000;
}

PhaseState<Real> SolutionJets::eval(const Real& h) const {
    return {t0 + h, theta.eval(h), {z1.eval(h), z2.eval(h)}, {v1.eval(h), v2.eval(h)}};
}

SolutionJets build_jets(const PhaseState<Real>& state, const SystemParams<Real>& params,
                        unsigned order, const AccelerationOptions& accel) {
    SeriesBuilder b(params, order, accel, SeriesBuilder::Mode::State);
    b.set_time(state.t);
    b.build(pack(state, false));
    SolutionJets out(order);
    out.t0 = state.t;
    out.theta = b.jet(kTheta);
    out.z1 = b.jet(kZ1);
    out.z2 = b.jet(kZ2);
    out.v1 = b.jet(kV1);
    out.v2 = b.jet(kV2);
    return out;
}

PhaseState<Real> taylor_step(const PhaseState<Real>& state, const SystemParams<Real>& params,
                             const IntegratorConfig& config, const Real& h) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    SeriesBuilder b(params, config.order, config.accel, SeriesBuilder::Mode::State);
    b.set_time(state.t);
    b.build(pack(state, false));
    std::vector<Real> y;
    b.eval(adopt(h), y);
    return unpack(y, adopt(state.t) + adopt(h));
}

PhaseState<Real> taylor_step(const PhaseState<Real>& state, const SystemParams<Real>& params,
                             const IntegratorConfig& config) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    if (config.mode == StepMode::Fixed) return taylor_step(state, params, config, config.resolved_step(params));
    SeriesBuilder b(params, config.order, config.accel, SeriesBuilder::Mode::State);
    b.set_time(state.t);
    b.build(pack(state, false));
    Real h = b.adaptive_step(config.adaptive_tolerance);
    std::vector<Real> y;
    b.eval(h, y);
    return unpack(y, adopt(state.t) + h);
}

PhaseState<Real> propagate(const PhaseState<Real>& state0, const Real& t_end,
                           const SystemParams<Real>& params, const IntegratorConfig& config) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    const Real t0 = adopt(state0.t);
    const Real te = adopt(t_end);
    SeriesBuilder b(params, config.order, config.accel, SeriesBuilder::Mode::State);
    auto y = run(b, pack(state0, false), t0, te, {}, params, config, [](std::size_t, const auto&) {});
    return unpack(y, te);
}

Trajectory propagate_dense(const PhaseState<Real>& state0, const Real& t_end,
                           std::span<const Real> sample_times, const SystemParams<Real>& params,
                           const IntegratorConfig& config) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    std::vector<Real> times;
    times.reserve(sample_times.size());
    for (const Real& s : sample_times) times.push_back(adopt(s));
    Trajectory traj{std::vector<PhaseState<Real>>(times.size()), config};
    SeriesBuilder b(params, config.order, config.accel, SeriesBuilder::Mode::State);
    run(b, pack(state0, false), adopt(state0.t), adopt(t_end), times, params, config,
        [&](std::size_t i, const std::vector<Real>& y) { traj.samples[i] = unpack(y, times[i]); });
    return traj;
}

std::vector<Real> propagate_theta(std::span<const Real> sample_times, const Real& e,
                                  const IntegratorConfig& config) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    if (sample_times.empty()) return {};
    SystemParams<Real> params{Real(1), Real(1), adopt(e), Real(1), Real(1), Real(0)};
    PhaseState<Real> s0{Real(0), Real(0), {Real(0), Real(0)}, {Real(0), Real(0)}};
    std::vector<Real> times;
    for (const Real& s : sample_times) times.push_back(adopt(s));
    std::vector<Real> out(times.size());
    SeriesBuilder b(params, config.order, config.accel, SeriesBuilder::Mode::ThetaOnly);
    run(b, pack(s0, false), Real(0), times.back(), times, params, config,
        [&](std::size_t i, const std::vector<Real>& y) { out[i] = y[kTheta]; });
    return out;
}

StateWithStm propagate_with_stm(const PhaseState<Real>& state0, const Real& t_end,
                                const SystemParams<Real>& params, const IntegratorConfig& config) {
    config.validate();
    PrecisionScope scope(config.precision_digits);
    const Real te = adopt(t_end);
    SeriesBuilder b(params, config.order, config.accel, SeriesBuilder::Mode::Variational);
    auto y = run(b, pack(state0, true), adopt(state0.t), te, {}, params, config,
                 [](std::size_t, const auto&) {});
    return {unpack(y, te), unpack_stm(y)};
}

}  // namespace ertbp
