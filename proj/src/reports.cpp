#include "ertbp/reports.hpp"

#include "ertbp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ertbp {

using nlohmann::json;

namespace {

std::string r(const Real& x, int digits) {
    if (isinf(x)) return x > 0 ? "inf" : "-inf";
    return format_sci(x, digits);
}

json vec2(const Vec2<Real>& v, int digits) { return json::array({r(v.x, digits), r(v.y, digits)}); }

json vec3(const Vector3& v) { return json::array({v.x(), v.y(), v.z()}); }

json complex(const Complex<Real>& z, int digits) { return json::array({r(z.re, digits), r(z.im, digits)}); }

}  // namespace

json state_json(const PhaseState<Real>& s, int digits) {
    return {{"t", r(s.t, digits)}, {"theta", r(s.theta, digits)}, {"z", vec2(s.z, digits)}, {"v", vec2(s.v, digits)}};
}

json closure_json(const ClosureResidual& c, const Real& velocity_weight_s, int digits) {
    return {{"dz_ud", vec2(c.dz, digits)},
            {"dv_ud_per_ut", vec2(c.dv, digits)},
            {"dz_m", vec2(c.dz_si, digits)},
            {"dv_m_per_s", vec2(c.dv_si, digits)},
            {"residual_norm_m", r(residual_norm(c, velocity_weight_s), digits)},
            {"velocity_weight_s", r(velocity_weight_s, digits)},
            {"final_state", state_json(c.final_state, digits)}};
}

json stability_json(const Monodromy& m, const StabilityReport& s, int digits) {
    json matrix = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < 4; ++j) row.push_back(r(m.matrix(i, j), digits));
        matrix.push_back(row);
    }
    json eig = json::array(), mod = json::array(), mm1 = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        eig.push_back(complex(s.eigenvalues[i], digits));
        mod.push_back(r(s.moduli[i], digits));
        mm1.push_back(r(s.moduli_minus_one[i], digits));
    }
    return {{"method", m.method == StmMethod::Variational ? "variational" : "central-difference"},
            {"period", r(m.period, digits)},
            {"matrix", matrix},
            {"determinant", r(determinant(m.matrix), digits)},
            {"eigenvalues", eig},
            {"moduli", mod},
            {"moduli_minus_one", mm1},
            {"classification", std::string(to_string(s.classification))},
            {"on_unit_circle", s.on_unit_circle},
            {"distinct", s.distinct},
            {"modulus_tolerance", r(s.modulus_tolerance, digits)}};
}

json refinement_json(const RefinementReport& rep, int digits) {
    json its = json::array();
    for (const auto& it : rep.iterations) {
        json j = {{"candidate", json::array({r(it.candidate[0], digits), r(it.candidate[1], digits),
                                             r(it.candidate[2], digits), r(it.candidate[3], digits)})},
                  {"residual_norm_m", r(it.residual_norm, digits)},
                  {"step_scale", r(it.step_scale, digits)}};
        if (it.det_jacobian) j["det_jacobian"] = r(*it.det_jacobian, digits);
        if (it.condition) j["condition"] = r(*it.condition, digits);
        if (it.rank) j["rank"] = *it.rank;
        its.push_back(j);
    }
    return {{"method", std::string(to_string(rep.method))},
            {"converged", rep.converged},
            {"threshold_m", r(rep.threshold_m, digits)},
            {"note", rep.note},
            {"initial", state_json(rep.initial, digits)},
            {"final", state_json(rep.final, digits)},
            {"iterations", its}};
}

json comparison_json(const ComparisonStats& s, bool include_dp) {
    json j = {{"count", s.count}, {"min", s.min}, {"max", s.max}, {"rms", s.rms}};
    if (include_dp) j["dp"] = s.dp;
    return j;
}

json fit_json(const FitResult& f) {
    return {{"params",
             {{"inclination_deg", f.params.inclination_deg},
              {"node_deg", f.params.node_deg},
              {"argperi_deg", f.params.argperi_deg},
              {"aphelion_au", f.params.aphelion_au},
              {"offset_au", f.params.offset_au}}},
            {"stats", comparison_json(f.stats, false)},
            {"evaluations", f.evaluations},
            {"converged", f.converged}};
}

json records_json(std::span<const EphemerisRecord> records) {
    json out = json::array();
    for (const auto& rec : records) {
        out.push_back({{"date", format_iso_date(rec.date)},
                       {"position_au", vec3(rec.position)},
                       {"velocity_au_ut", vec3(rec.velocity_ut)},
                       {"velocity_au_day", vec3(rec.velocity_day)}});
    }
    return out;
}

TraceFrame parse_trace_frame(std::string_view s) {
    if (s == "inertial") return TraceFrame::Inertial;
    if (s == "rotating-pulsating") return TraceFrame::RotatingPulsating;
    throw Error(ErrorKind::Config, "trace frame must be 'inertial' or 'rotating-pulsating'");
}

std::vector<Vector2> trace_points(std::span<const PhaseState<Real>> samples, TraceFrame frame,
                                  const SystemParams<Real>& params) {
    std::vector<Vector2> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (frame == TraceFrame::Inertial) {
            out.emplace_back(s.z.x.convert_to<double>(), s.z.y.convert_to<double>());
            continue;
        }
        const Real c = cos(s.theta);
        const Real sn = sin(s.theta);
        const Real k = (1 - params.e * c) / (1 - params.e);
        out.emplace_back(Real(k * (c * s.z.x + sn * s.z.y)).convert_to<double>(),
                         Real(k * (c * s.z.y - sn * s.z.x)).convert_to<double>());
    }
    return out;
}

std::string emit_svg_trace(std::span<const PhaseState<Real>> samples, TraceFrame frame,
                           const SystemParams<Real>& params) {
    if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "trace needs at least one sample");
    const std::vector<Vector2> pts = trace_points(samples, frame, params);
    const PrimaryPositions<Real> prim = primary_positions(samples.front().theta, params);
    std::vector<Vector2> primaries;
    if (frame == TraceFrame::Inertial) {
        primaries = {{prim.x.x.convert_to<double>(), prim.x.y.convert_to<double>()},
                     {prim.y.x.convert_to<double>(), prim.y.y.convert_to<double>()}};
    } else {
        const double mu = params.mu.convert_to<double>();
        primaries = {{-mu, 0.0}, {1.0 - mu, 0.0}};
    }

    double lo_x = primaries[0].x(), hi_x = lo_x, lo_y = primaries[0].y(), hi_y = lo_y;
    auto extend = [&](const Vector2& p) {
        lo_x = std::min(lo_x, p.x());
        hi_x = std::max(hi_x, p.x());
        lo_y = std::min(lo_y, p.y());
        hi_y = std::max(hi_y, p.y());
    };
    for (const Vector2& p : pts) extend(p);
    for (const Vector2& p : primaries) extend(p);
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    const double pad = 0.05 * span;
    const double size = 800.0;
    const double scale = size / (span + 2 * pad);
    auto X = [&](double x) { return (x - lo_x + pad) * scale; };
    auto Y = [&](double y) { return (hi_y - y + pad) * scale; };  // SVG y grows downwards

    std::ostringstream os;
    os.precision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << X(pts[i].x()) << ',' << Y(pts[i].y());
    os << "\"/>\n";
    os << "<circle cx=\"" << X(primaries[0].x()) << "\" cy=\"" << Y(primaries[0].y())
       << "\" r=\"6\" fill=\"orange\"/>\n";
    os << "<circle cx=\"" << X(primaries[1].x()) << "\" cy=\"" << Y(primaries[1].y())
       << "\" r=\"4\" fill=\"brown\"/>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace ertbp
