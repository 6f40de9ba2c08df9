#include "ertbp/run_config.hpp"

#include "ertbp/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ertbp {

using nlohmann::json;

namespace {

// Reads members of one JSON object, rejecting keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw Error(ErrorKind::Config, path_ + " must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorKind::Config, path_ + "." + key + " has the wrong type");
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw Error(ErrorKind::Config, "unknown key " + path_ + "." + it.key());
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Real parse_field(const std::string& text, const char* name) {
    try {
        return parse_real(text);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Config, std::string(name) + ": not a decimal number: '" + text + "'");
    }
}

void require_one_of(const std::string& v, std::initializer_list<const char*> allowed, const char* name) {
    for (const char* a : allowed)
        if (v == a) return;
    std::string msg = std::string(name) + " must be one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw Error(ErrorKind::Config, msg + "; got '" + v + "'");
}

}  // namespace

SystemParams<Real> RunConfig::system_params() const {
    SystemParams<Real> p{parse_field(system.m1, "system.m1"), parse_field(system.m2, "system.m2"),
                         parse_field(system.e, "system.e"),   parse_field(system.r0, "system.r0"),
                         parse_field(system.G, "system.G"),   parse_field(system.mu, "system.mu")};
    p.validate();
    return p;
}

IntegratorConfig RunConfig::integrator_config() const {
    IntegratorConfig c;
    c.order = integrator.order;
    c.precision_digits = integrator.precision_digits;
    if (integrator.step != "auto") c.step = parse_field(integrator.step, "integrator.step");
    c.mode = integrator.mode == "adaptive" ? StepMode::Adaptive : StepMode::Fixed;
    c.adaptive_tolerance = parse_field(integrator.adaptive_tolerance, "integrator.adaptive_tolerance");
    c.accel.collision_floor = parse_field(integrator.collision_floor, "integrator.collision_floor").convert_to<double>();
    c.accel.law = integrator.force_law == "attractive" ? ForceLaw::Attractive : ForceLaw::RepulsiveAsPrinted;
    c.validate();
    return c;
}

PhaseState<Real> RunConfig::initial_state() const {
    return {parse_field(initial.t, "initial.t"),
            parse_field(initial.theta, "initial.theta"),
            {parse_field(initial.z1, "initial.z1"), parse_field(initial.z2, "initial.z2")},
            {parse_field(initial.v1, "initial.v1"), parse_field(initial.v2, "initial.v2")}};
}

Real RunConfig::resolve_time(const std::string& text) const {
    if (text == "T") return orbital_period(parse_field(system.e, "system.e"));
    return parse_field(text, "time");
}

StmOptions RunConfig::stm_options() const {
    StmOptions o;
    o.method = monodromy.method == "variational" ? StmMethod::Variational : StmMethod::CentralDifference;
    o.delta = parse_field(monodromy.delta, "monodromy.delta");
    o.workers = refine.workers;
    return o;
}

NewtonOptions RunConfig::newton_options() const {
    NewtonOptions o;
    o.max_iterations = refine.max_iterations;
    o.damped = refine.method == "damped";
    o.max_halvings = refine.max_halvings;
    o.policy = refine.policy == "strict" ? JacobianPolicy::Strict : JacobianPolicy::MinimumNorm;
    o.threshold_m = parse_field(refine.threshold_m, "refine.threshold_m");
    o.velocity_weight_s = parse_field(refine.velocity_weight_s, "refine.velocity_weight_s");
    o.det_floor = parse_field(refine.det_floor, "refine.det_floor");
    return o;
}

GridOptions RunConfig::grid_options() const {
    GridOptions o;
    o.samples_per_axis = refine.samples_per_axis;
    for (std::size_t i = 0; i < 4; ++i) o.half_widths[i] = parse_field(refine.half_widths[i], "refine.half_widths");
    o.budget = refine.budget;
    o.velocity_weight_s = parse_field(refine.velocity_weight_s, "refine.velocity_weight_s");
    o.threshold_m = parse_field(refine.threshold_m, "refine.threshold_m");
    o.workers = refine.workers;
    return o;
}

std::filesystem::path RunConfig::data_dir(const std::filesystem::path& fallback) const {
    if (!network.data_dir.empty()) return network.data_dir;
    if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
    return fallback;
}

void RunConfig::validate() const {
    require_one_of(integrator.mode, {"fixed", "adaptive"}, "integrator.mode");
    require_one_of(integrator.force_law, {"attractive", "repulsive-as-printed"}, "integrator.force_law");
    require_one_of(output.format, {"text", "csv", "json"}, "output.format");
    require_one_of(monodromy.method, {"variational", "central-difference"}, "monodromy.method");
    require_one_of(refine.method, {"newton", "damped", "grid"}, "refine.method");
    require_one_of(refine.policy, {"min-norm", "strict"}, "refine.policy");
    require_one_of(ephemeris.velocity_convention, {"linear", "as-published"}, "ephemeris.velocity_convention");
    require_one_of(fit.objective, {"rms", "max"}, "fit.objective");
    require_one_of(trace.frame, {"inertial", "rotating-pulsating"}, "trace.frame");
    if (output.digits < 1 || output.digits > 1000) throw Error(ErrorKind::Config, "output.digits out of range");
    if (integrator.precision_digits < 16) throw Error(ErrorKind::Config, "integrator.precision_digits must be >= 16");
    PrecisionScope scope(integrator.precision_digits);
    system_params();
    integrator_config();
    initial_state();
    resolve_time(propagate.t_end);
    resolve_time(trace.t_end);
    stm_options();
    newton_options();
    grid_options();
    parse_field(monodromy.tolerance, "monodromy.tolerance");
    frame.validate();
    parse_date(ephemeris.start);
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["system"] = {{"m1", c.system.m1}, {"m2", c.system.m2}, {"e", c.system.e},
                   {"r0", c.system.r0}, {"G", c.system.G},   {"mu", c.system.mu}};
    j["integrator"] = {{"order", c.integrator.order},
                       {"precision_digits", c.integrator.precision_digits},
                       {"step", c.integrator.step},
                       {"mode", c.integrator.mode},
                       {"adaptive_tolerance", c.integrator.adaptive_tolerance},
                       {"collision_floor", c.integrator.collision_floor},
                       {"force_law", c.integrator.force_law}};
    j["initial"] = {{"t", c.initial.t},   {"theta", c.initial.theta}, {"z1", c.initial.z1},
                    {"z2", c.initial.z2}, {"v1", c.initial.v1},       {"v2", c.initial.v2}};
    j["frame"] = {{"inclination_deg", c.frame.inclination_deg}, {"node_deg", c.frame.node_deg},
                  {"argperi_deg", c.frame.argperi_deg},         {"aphelion_au", c.frame.aphelion_au},
                  {"offset_au", c.frame.offset_au}};
    j["output"] = {{"path", c.output.path},
                   {"format", c.output.format},
                   {"digits", c.output.digits},
                   {"svg_path", c.output.svg_path}};
    j["network"] = {{"enabled", c.network.enabled}, {"data_dir", c.network.data_dir}};
    j["propagate"] = {{"t_end", c.propagate.t_end}, {"samples", c.propagate.samples}};
    j["monodromy"] = {{"method", c.monodromy.method}, {"delta", c.monodromy.delta},
                      {"tolerance", c.monodromy.tolerance}};
    j["refine"] = {{"method", c.refine.method},
                   {"max_iterations", c.refine.max_iterations},
                   {"max_halvings", c.refine.max_halvings},
                   {"policy", c.refine.policy},
                   {"threshold_m", c.refine.threshold_m},
                   {"velocity_weight_s", c.refine.velocity_weight_s},
                   {"det_floor", c.refine.det_floor},
                   {"samples_per_axis", c.refine.samples_per_axis},
                   {"half_widths", c.refine.half_widths},
                   {"budget", c.refine.budget},
                   {"workers", c.refine.workers}};
    j["ephemeris"] = {{"start", c.ephemeris.start},
                      {"step_days", c.ephemeris.step_days},
                      {"count", c.ephemeris.count},
                      {"velocity_convention", c.ephemeris.velocity_convention}};
    j["compare"] = {{"a", c.compare.a}, {"b", c.compare.b}};
    j["fit"] = {{"fixture", c.fit.fixture},
                {"objective", c.fit.objective},
                {"max_evaluations", c.fit.max_evaluations}};
    j["fetch"] = {{"body_id", c.fetch.body_id}, {"start", c.fetch.start}, {"stop", c.fetch.stop},
                  {"step", c.fetch.step},       {"endpoint", c.fetch.endpoint}};
    j["trace"] = {{"frame", c.trace.frame}, {"samples", c.trace.samples}, {"t_end", c.trace.t_end}};
    return j;
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    ObjectReader root(j, "config");
    root.get("command", c.command);
    if (const json* s = root.child("system")) {
        ObjectReader r(*s, "system");
        r.get("m1", c.system.m1);
        r.get("m2", c.system.m2);
        r.get("e", c.system.e);
        r.get("r0", c.system.r0);
        r.get("G", c.system.G);
        r.get("mu", c.system.mu);
        r.finish();
    }
    if (const json* s = root.child("integrator")) {
        ObjectReader r(*s, "integrator");
        r.get("order", c.integrator.order);
        r.get("precision_digits", c.integrator.precision_digits);
        r.get("step", c.integrator.step);
        r.get("mode", c.integrator.mode);
        r.get("adaptive_tolerance", c.integrator.adaptive_tolerance);
        r.get("collision_floor", c.integrator.collision_floor);
        r.get("force_law", c.integrator.force_law);
        r.finish();
    }
    if (const json* s = root.child("initial")) {
        ObjectReader r(*s, "initial");
        r.get("t", c.initial.t);
        r.get("theta", c.initial.theta);
        r.get("z1", c.initial.z1);
        r.get("z2", c.initial.z2);
        r.get("v1", c.initial.v1);
        r.get("v2", c.initial.v2);
        r.finish();
    }
    if (const json* s = root.child("frame")) {
        ObjectReader r(*s, "frame");
        r.get("inclination_deg", c.frame.inclination_deg);
        r.get("node_deg", c.frame.node_deg);
        r.get("argperi_deg", c.frame.argperi_deg);
        r.get("aphelion_au", c.frame.aphelion_au);
        r.get("offset_au", c.frame.offset_au);
        r.finish();
    }
    if (const json* s = root.child("output")) {
        ObjectReader r(*s, "output");
        r.get("path", c.output.path);
        r.get("format", c.output.format);
        r.get("digits", c.output.digits);
        r.get("svg_path", c.output.svg_path);
        r.finish();
    }
    if (const json* s = root.child("network")) {
        ObjectReader r(*s, "network");
        r.get("enabled", c.network.enabled);
        r.get("data_dir", c.network.data_dir);
        r.finish();
    }
    if (const json* s = root.child("propagate")) {
        ObjectReader r(*s, "propagate");
        r.get("t_end", c.propagate.t_end);
        r.get("samples", c.propagate.samples);
        r.finish();
    }
    if (const json* s = root.child("monodromy")) {
        ObjectReader r(*s, "monodromy");
        r.get("method", c.monodromy.method);
        r.get("delta", c.monodromy.delta);
        r.get("tolerance", c.monodromy.tolerance);
        r.finish();
    }
    if (const json* s = root.child("refine")) {
        ObjectReader r(*s, "refine");
        r.get("method", c.refine.method);
        r.get("max_iterations", c.refine.max_iterations);
        r.get("max_halvings", c.refine.max_halvings);
        r.get("policy", c.refine.policy);
        r.get("threshold_m", c.refine.threshold_m);
        r.get("velocity_weight_s", c.refine.velocity_weight_s);
        r.get("det_floor", c.refine.det_floor);
        r.get("samples_per_axis", c.refine.samples_per_axis);
        r.get("half_widths", c.refine.half_widths);
        r.get("budget", c.refine.budget);
        r.get("workers", c.refine.workers);
        r.finish();
    }
    if (const json* s = root.child("ephemeris")) {
        ObjectReader r(*s, "ephemeris");
        r.get("start", c.ephemeris.start);
        r.get("step_days", c.ephemeris.step_days);
        r.get("count", c.ephemeris.count);
        r.get("velocity_convention", c.ephemeris.velocity_convention);
        r.finish();
    }
    if (const json* s = root.child("compare")) {
        ObjectReader r(*s, "compare");
        r.get("a", c.compare.a);
        r.get("b", c.compare.b);
        r.finish();
    }
    if (const json* s = root.child("fit")) {
        ObjectReader r(*s, "fit");
        r.get("fixture", c.fit.fixture);
        r.get("objective", c.fit.objective);
        r.get("max_evaluations", c.fit.max_evaluations);
        r.finish();
    }
    if (const json* s = root.child("fetch")) {
        ObjectReader r(*s, "fetch");
        r.get("body_id", c.fetch.body_id);
        r.get("start", c.fetch.start);
        r.get("stop", c.fetch.stop);
        r.get("step", c.fetch.step);
        r.get("endpoint", c.fetch.endpoint);
        r.finish();
    }
    if (const json* s = root.child("trace")) {
        ObjectReader r(*s, "trace");
        r.get("frame", c.trace.frame);
        r.get("samples", c.trace.samples);
        r.get("t_end", c.trace.t_end);
        r.finish();
    }
    root.finish();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    const json parsed = json::parse(text, nullptr, false);
    if (!parsed.is_discarded()) {
        if (parsed.is_object() && parsed.contains("config") && parsed.contains("result"))
            return run_config_from_json(parsed.at("config"));
        return run_config_from_json(parsed);
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(kConfigLinePrefix, 0) != 0) continue;
        const json embedded = json::parse(line.substr(kConfigLinePrefix.size()), nullptr, false);
        if (embedded.is_discarded()) throw Error(ErrorKind::Config, "embedded config line is not valid JSON");
        return run_config_from_json(embedded);
    }
    throw Error(ErrorKind::Config, path.string() + " is neither a JSON config nor an output with an embedded config");
}

}  // namespace ertbp
