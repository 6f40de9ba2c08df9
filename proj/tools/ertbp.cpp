// ertbp: command-line front end for propagation, closure, stability,
// refinement and ephemeris generation.

#include "ertbp/cross_check.hpp"
#include "ertbp/dynamics.hpp"
#include "ertbp/ephemeris.hpp"
#include "ertbp/errors.hpp"
#include "ertbp/monodromy.hpp"
#include "ertbp/periodicity.hpp"
#include "ertbp/reports.hpp"
#include "ertbp/run_config.hpp"
#include "ertbp/taylor.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef ERTBP_DEFAULT_DATA_DIR
#define ERTBP_DEFAULT_DATA_DIR "data"
#endif

namespace {

using namespace ertbp;
using nlohmann::json;

// Result of one command: a JSON mirror plus the text and CSV renderings.
struct Output {
    json result;
    std::string text;
    std::optional<std::string> csv;
    std::optional<std::string> svg;
};

std::string fmt(const Real& x, int digits) { return format_sci(x, digits); }

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    out << s;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + p.string());
}

// Horizons text, or this tool's CSV output.
std::vector<EphemerisRecord> read_records(const std::filesystem::path& p, double upd) {
    const std::string text = read_text(p);
    std::istringstream lines(text);
    std::string line;
    bool csv = false;
    std::string rows;
    while (std::getline(lines, line)) {
        if (line == kCsvHeader) {
            csv = true;
            continue;
        }
        if (csv && !line.empty() && line[0] != '#') rows += line + '\n';
    }
    if (!csv) return horizons_parse(text, upd);
    std::vector<EphemerisRecord> out;
    std::istringstream rs(rows);
    std::size_t n = 0;
    while (std::getline(rs, line)) {
        ++n;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 10) throw MalformedRecord(n, "expected 10 CSV fields");
        EphemerisRecord r;
        r.date = parse_date(f[0]);
        double v[9];
        for (int k = 0; k < 9; ++k) {
            try {
                v[k] = std::stod(f[static_cast<std::size_t>(k) + 1]);
            } catch (const std::exception&) {
                throw MalformedRecord(n, "not a number: '" + f[static_cast<std::size_t>(k) + 1] + "'");
            }
        }
        r.position = {v[0], v[1], v[2]};
        r.velocity_ut = {v[3], v[4], v[5]};
        r.velocity_day = {v[6], v[7], v[8]};
        out.push_back(r);
    }
    return out;
}

std::filesystem::path fixture_path(const RunConfig& cfg, const std::string& configured) {
    if (!configured.empty()) return configured;
    return cfg.data_dir(ERTBP_DEFAULT_DATA_DIR) / kFixtureName;
}

std::vector<Real> even_times(const Real& t0, const Real& t1, unsigned n) {
    std::vector<Real> ts;
    for (unsigned k = 0; k < n; ++k) ts.push_back(n == 1 ? t1 : Real(t0 + (t1 - t0) * k / (n - 1)));
    return ts;
}

// ----------------------------------------------------------------- commands

Output cmd_propagate(const RunConfig& cfg) {
    const int d = cfg.output.digits;
    const auto p = cfg.system_params();
    const auto ic = cfg.initial_state();
    const auto ic_cfg = cfg.integrator_config();
    const Real t_end = cfg.resolve_time(cfg.propagate.t_end);
    Output out;
    std::ostringstream text, csv;
    csv << "t,theta,z1,z2,v1,v2\n";
    std::vector<PhaseState<Real>> states;
    if (cfg.propagate.samples >= 2) {
        states = propagate_dense(ic, t_end, even_times(ic.t, t_end, cfg.propagate.samples), p, ic_cfg).samples;
    } else {
        states.push_back(propagate(ic, t_end, p, ic_cfg));
    }
    const PhaseState<Real>& fin = states.back();
    text << "t      = " << fmt(fin.t, d) << '\n'
         << "theta  = " << fmt(fin.theta, d) << '\n'
         << "z      = (" << fmt(fin.z.x, d) << ", " << fmt(fin.z.y, d) << ")\n"
         << "dz/dt  = (" << fmt(fin.v.x, d) << ", " << fmt(fin.v.y, d) << ")\n";
    json arr = json::array();
    for (const auto& s : states) {
        arr.push_back(state_json(s, d));
        csv << fmt(s.t, d) << ',' << fmt(s.theta, d) << ',' << fmt(s.z.x, d) << ',' << fmt(s.z.y, d) << ','
            << fmt(s.v.x, d) << ',' << fmt(s.v.y, d) << '\n';
    }
    out.result = {{"final", state_json(fin, d)}, {"samples", arr}};
    out.text = text.str();
    out.csv = csv.str();
    return out;
}

Output cmd_closure(const RunConfig& cfg) {
    const int d = cfg.output.digits;
    const auto p = cfg.system_params();
    const ClosureResidual r = closure_residual(cfg.initial_state(), p, cfg.integrator_config());
    const Real w = parse_real(cfg.refine.velocity_weight_s);
    auto short3 = [](const Real& x) { return format_general(Real(abs(x)), 3); };
    std::ostringstream t;
    t << "z(T)         = (" << fmt(r.final_state.z.x, d) << ", " << fmt(r.final_state.z.y, d) << ")\n"
      << "dz/dt(T)     = (" << fmt(r.final_state.v.x, d) << ", " << fmt(r.final_state.v.y, d) << ")\n"
      << "z(T)-z(0)    = (" << fmt(r.dz.x, d) << ", " << fmt(r.dz.y, d) << ") ud\n"
      << "             = (" << fmt(r.dz_si.x, 6) << ", " << fmt(r.dz_si.y, 6) << ") m\n"
      << "v(T)-v(0)    = (" << fmt(r.dv.x, d) << ", " << fmt(r.dv.y, d) << ") ud/ut\n"
      << "             = (" << fmt(r.dv_si.x, 6) << ", " << fmt(r.dv_si.y, 6) << ") m/s\n"
      << "position residual ≈ " << short3(r.dz_si.x) << " m, " << short3(r.dz_si.y) << " m; velocity residual ≈ "
      << short3(r.dv_si.x) << " m/s, " << short3(r.dv_si.y) << " m/s; merit " << format_general(residual_norm(r, w), 6)
      << " m\n";
    return {closure_json(r, w, d), t.str(), std::nullopt, std::nullopt};
}

Output cmd_monodromy(const RunConfig& cfg) {
    const int d = std::max(cfg.output.digits, 25);
    const auto p = cfg.system_params();
    const Real T = orbital_period(p.e);
    const Monodromy m = state_transition_matrix(cfg.initial_state(), T, p, cfg.integrator_config(), cfg.stm_options());
    const StabilityReport s = classify_stability(eigenvalues_4x4(m.matrix), parse_real(cfg.monodromy.tolerance));
    std::ostringstream t;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& z = s.eigenvalues[i];
        t << "lambda" << i + 1 << " = " << fmt(z.re, d) << (z.im < 0 ? " - " : " + ") << fmt(Real(abs(z.im)), d)
          << " i   |lambda|-1 = " << fmt(s.moduli_minus_one[i], 8) << '\n';
    }
    t << "det(M)-1 = " << fmt(Real(determinant(m.matrix) - 1), 8) << '\n'
      << "classification: " << to_string(s.classification)
      << (s.on_unit_circle ? " (a modulus lies within tolerance of 1)" : "") << '\n';
    return {stability_json(m, s, d), t.str(), std::nullopt, std::nullopt};
}

Output cmd_refine(const RunConfig& cfg) {
    const int d = cfg.output.digits;
    const auto p = cfg.system_params();
    RefinementReport r = cfg.refine.method == "grid"
                             ? grid_search(cfg.initial_state(), p, cfg.integrator_config(), cfg.grid_options())
                             : newton_refine(cfg.initial_state(), p, cfg.integrator_config(), cfg.newton_options());
    std::ostringstream t;
    t << "method: " << to_string(r.method) << "  converged: " << (r.converged ? "yes" : "no")
      << (r.note.empty() ? "" : "  (" + r.note + ")") << '\n';
    if (r.method == RefineMethod::Grid) {
        t << "lattice points: " << r.iterations.size() << '\n';
    } else {
        for (std::size_t i = 0; i < r.iterations.size(); ++i) {
            const auto& it = r.iterations[i];
            t << "iter " << i << ": residual " << format_general(it.residual_norm, 8) << " m";
            if (it.condition) t << ", cond(M-I) " << format_general(*it.condition, 6);
            if (it.det_jacobian) t << ", det(M-I) " << format_general(*it.det_jacobian, 6);
            if (i > 0) t << ", step scale " << format_general(it.step_scale, 4);
            t << '\n';
        }
    }
    t << "final z = (" << fmt(r.final.z.x, d) << ", " << fmt(r.final.z.y, d) << ")\n"
      << "final v = (" << fmt(r.final.v.x, d) << ", " << fmt(r.final.v.y, d) << ")\n";
    return {refinement_json(r, d), t.str(), std::nullopt, std::nullopt};
}

Output cmd_ephemeris(const RunConfig& cfg) {
    const auto p = cfg.system_params();
    const auto recs = spacecraft_ephemeris(parse_date(cfg.ephemeris.start), cfg.ephemeris.step_days,
                                           cfg.ephemeris.count, cfg.initial_state(), p, cfg.integrator_config(),
                                           cfg.frame, parse_velocity_convention(cfg.ephemeris.velocity_convention));
    std::ostringstream t, c;
    write_table(t, recs, cfg.output.digits);
    write_csv(c, recs, cfg.output.digits);
    return {records_json(recs), t.str(), c.str(), std::nullopt};
}

Output cmd_compare(const RunConfig& cfg) {
    const auto p = cfg.system_params();
    const double upd = days_per_ut(p.e);
    const auto a = positions(read_records(fixture_path(cfg, cfg.compare.a), upd));
    std::vector<Vector3> b;
    if (cfg.compare.b == "h1") {
        b = jupiter_ellipse_sequence(a.size(), p, cfg.frame, cfg.integrator_config());
    } else {
        b = positions(read_records(cfg.compare.b, upd));
    }
    const ComparisonStats s = compare_sequences(a, b);
    std::ostringstream t, c;
    t << std::setprecision(9) << "count " << s.count << "  min " << s.min << " AU  max " << s.max << " AU  rms "
      << s.rms << " AU\n";
    c << "index,dp_au\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.dp.size(); ++i) c << i + 1 << ',' << s.dp[i] << '\n';
    return {comparison_json(s, true), t.str(), c.str(), std::nullopt};
}

Output cmd_fit(const RunConfig& cfg) {
    const auto p = cfg.system_params();
    const auto obs = positions(read_records(fixture_path(cfg, cfg.fit.fixture), days_per_ut(p.e)));
    const auto planar = jupiter_planar_sequence(obs.size(), p, cfg.integrator_config());
    FitOptions o;
    o.objective = parse_fit_objective(cfg.fit.objective);
    o.max_evaluations = cfg.fit.max_evaluations;
    const FitResult f = fit_frame_params(obs, planar, cfg.frame, o);
    std::ostringstream t;
    t << std::setprecision(10) << "inclination_deg " << f.params.inclination_deg << "\nnode_deg " << f.params.node_deg
      << "\nargperi_deg " << f.params.argperi_deg << "\naphelion_au " << f.params.aphelion_au << "\noffset_au "
      << f.params.offset_au << "\nobjective " << cfg.fit.objective << "  min " << f.stats.min << "  max "
      << f.stats.max << "  rms " << f.stats.rms << "  evaluations " << f.evaluations
      << (f.converged ? "" : "  (budget exhausted, best so far)") << '\n';
    if (!f.converged) std::cerr << "warning: " << to_string(ErrorKind::NonConvergence) << ": fit budget exhausted\n";
    return {fit_json(f), t.str(), std::nullopt, std::nullopt};
}

Output cmd_fetch(const RunConfig& cfg) {
    FetchOptions o;
    o.network_enabled = cfg.network.enabled;
    o.cache_dir = cfg.data_dir(ERTBP_DEFAULT_DATA_DIR);
    const std::string block = horizons_fetch(cfg.fetch, o);
    const auto recs = horizons_parse(block, days_per_ut(cfg.system_params().e));
    json r = {{"cache_file", (o.cache_dir / cfg.fetch.cache_key()).string()}, {"records", recs.size()}};
    std::ostringstream t;
    t << recs.size() << " records in " << (o.cache_dir / cfg.fetch.cache_key()).string() << '\n';
    if (!recs.empty()) {
        r["first"] = format_iso_date(recs.front().date);
        r["last"] = format_iso_date(recs.back().date);
        t << "first " << format_date(recs.front().date) << ", last " << format_date(recs.back().date) << '\n';
    }
    return {r, t.str(), std::nullopt, std::nullopt};
}

Output cmd_trace(const RunConfig& cfg) {
    const auto p = cfg.system_params();
    const auto ic = cfg.initial_state();
    const Real t_end = cfg.resolve_time(cfg.trace.t_end);
    const unsigned n = std::max(1u, cfg.trace.samples);
    const auto traj = propagate_dense(ic, t_end, even_times(ic.t, t_end, n), p, cfg.integrator_config());
    const TraceFrame frame = parse_trace_frame(cfg.trace.frame);
    const auto pts = trace_points(traj.samples, frame, p);
    double lo_x = pts[0].x(), hi_x = lo_x, lo_y = pts[0].y(), hi_y = lo_y;
    for (const auto& q : pts) {
        lo_x = std::min(lo_x, q.x());
        hi_x = std::max(hi_x, q.x());
        lo_y = std::min(lo_y, q.y());
        hi_y = std::max(hi_y, q.y());
    }
    json r = {{"frame", cfg.trace.frame},
              {"samples", pts.size()},
              {"bounding_box", {lo_x, lo_y, hi_x, hi_y}}};
    std::ostringstream t;
    t << std::setprecision(8) << pts.size() << " samples, " << cfg.trace.frame << " frame, bounding box [" << lo_x
      << ", " << hi_x << "] x [" << lo_y << ", " << hi_y << "]\n";
    return {r, t.str(), std::nullopt, emit_svg_trace(traj.samples, frame, p)};
}

Output run(const RunConfig& cfg) {
    PrecisionScope scope(cfg.integrator.precision_digits);
    const std::string& c = cfg.command;
    if (c == "propagate") return cmd_propagate(cfg);
    if (c == "closure") return cmd_closure(cfg);
    if (c == "monodromy") return cmd_monodromy(cfg);
    if (c == "refine") return cmd_refine(cfg);
    if (c == "ephemeris") return cmd_ephemeris(cfg);
    if (c == "compare") return cmd_compare(cfg);
    if (c == "fit") return cmd_fit(cfg);
    if (c == "fetch") return cmd_fetch(cfg);
    if (c == "trace") return cmd_trace(cfg);
    throw Error(ErrorKind::Config, "unknown command '" + c + "'");
}

// ------------------------------------------------------------------ output

void emit(const RunConfig& cfg, const Output& out) {
    const std::string config_line = std::string(kConfigLinePrefix) + to_json(cfg).dump() + '\n';
    std::string body;
    if (cfg.output.format == "json") {
        body = json{{"config", to_json(cfg)}, {"result", out.result}}.dump(2) + '\n';
    } else if (cfg.output.format == "csv") {
        if (!out.csv) throw Error(ErrorKind::Config, "csv output is not available for '" + cfg.command + "'");
        body = config_line + *out.csv;
    } else {
        body = config_line + out.text;
    }
    if (cfg.output.path.empty()) {
        std::cout << body;
    } else {
        write_text(cfg.output.path, body);
    }
    if (out.svg) {
        // The config goes inside the comment on its own line so it can be re-read.
        std::string svg = *out.svg;
        svg.insert(svg.find('\n') + 1, "<!--\n" + config_line + "-->\n");
        std::string svg_path = cfg.output.svg_path;
        if (svg_path.empty() && !cfg.output.path.empty()) svg_path = cfg.output.path + ".svg";
        if (svg_path.empty()) {
            std::cout << svg;
        } else {
            write_text(svg_path, svg);
        }
    }
}

// Sets a dotted config key from text, typed after the existing value.
void apply_set(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    json* node = &j;
    std::stringstream ks(key);
    std::string part;
    while (std::getline(ks, part, '.')) {
        if (!node->is_object() || !node->contains(part)) throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
        node = &(*node)[part];
    }
    try {
        if (node->is_string()) {
            *node = value;
        } else if (node->is_boolean()) {
            if (value != "true" && value != "false") throw std::invalid_argument("bool");
            *node = value == "true";
        } else if (node->is_number_unsigned()) {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(value, &used);
            if (used != value.size() || value.find('-') != std::string::npos) throw std::invalid_argument("uint");
            *node = v;
        } else if (node->is_number_integer()) {
            std::size_t used = 0;
            const long long v = std::stoll(value, &used);
            if (used != value.size()) throw std::invalid_argument("int");
            *node = v;
        } else if (node->is_number_float()) {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("float");
            *node = v;
        } else if (node->is_array()) {
            json arr = json::array();
            std::stringstream vs(value);
            std::string item;
            while (std::getline(vs, item, ',')) arr.push_back(item);
            if (arr.size() != node->size()) throw std::invalid_argument("array length");
            *node = arr;
        } else {
            throw std::invalid_argument("type");
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Config, "bad value for " + key + ": '" + value + "'");
    }
}

struct Overrides {
    std::optional<std::string> config_path;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::optional<std::string>>> flags;  // key, value
    bool allow_network = false;
};

void add_flag(CLI::App* app, Overrides& ov, std::vector<std::optional<std::string>>& storage,
              const std::string& name, const std::string& key, const std::string& help) {
    storage.emplace_back();
    const std::size_t slot = storage.size() - 1;
    ov.flags.emplace_back(key, std::nullopt);
    app->add_option(name, storage[slot], help);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elliptic restricted three-body laboratory: propagation, closure, stability, refinement, ephemeris"};
    // Without a subcommand the command comes from the -c config.
    app.require_subcommand(0, 1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    Overrides ov;
    std::vector<std::optional<std::string>> storage;
    storage.reserve(64);  // flag options bind to stable addresses
    std::vector<std::string> flag_keys;

    app.add_option("-c,--config", ov.config_path,
                   "JSON config file, or a previous output whose embedded config is reused");
    app.add_option("--set", ov.sets, "Override any config key: section.key=value (repeatable)");
    app.add_flag("--allow-network", ov.allow_network, "Permit network access (fetch)");

    auto global = [&](const std::string& name, const std::string& key, const std::string& help) {
        add_flag(&app, ov, storage, name, key, help);
        flag_keys.push_back(key);
    };
    global("-o,--output", "output.path", "Output file (default stdout)");
    global("--format", "output.format", "text | csv | json");
    global("--digits", "output.digits", "Significant digits of extended-precision output (default 30)");
    global("--data-dir", "network.data_dir", "Fixture and cache directory (else $ERTBP_DATA_DIR)");
    global("--order", "integrator.order", "Taylor order");
    global("--precision", "integrator.precision_digits", "Working precision in decimal digits");
    global("--step", "integrator.step", "Fixed step in ut, or 'auto' for T/10000");
    global("--ecc", "system.e", "Eccentricity of the primaries");
    global("--mu", "system.mu", "Mass ratio");
    global("--force-law", "integrator.force_law", "attractive | repulsive-as-printed");

    struct Sub {
        const char* name;
        const char* help;
        std::vector<std::tuple<const char*, const char*, const char*>> opts;
    };
    const std::vector<Sub> subs = {
        {"propagate", "Propagate the initial condition to t_end",
         {{"--t-end", "propagate.t_end", "End time in ut, or T"},
          {"--samples", "propagate.samples", "Evenly spaced output samples"}}},
        {"closure", "One-period closure residual z(T)-z(0), v(T)-v(0)", {}},
        {"monodromy", "Monodromy matrix, eigenvalues and stability",
         {{"--method", "monodromy.method", "variational | central-difference"},
          {"--delta", "monodromy.delta", "Central-difference perturbation"},
          {"--tolerance", "monodromy.tolerance", "Modulus/distinctness tolerance"}}},
        {"refine", "Newton shooting or lattice search toward closure",
         {{"--method", "refine.method", "newton | damped | grid"},
          {"--max-iter", "refine.max_iterations", "Newton iteration limit"},
          {"--policy", "refine.policy", "min-norm | strict"},
          {"--threshold", "refine.threshold_m", "Convergence threshold (m)"},
          {"--samples-per-axis", "refine.samples_per_axis", "Lattice samples per axis"},
          {"--half-widths", "refine.half_widths", "Lattice half widths z1,z2,v1,v2"},
          {"--budget", "refine.budget", "Maximum lattice propagations"}}},
        {"ephemeris", "Spacecraft ephemeris table",
         {{"--start", "ephemeris.start", "First date (YYYY-MM-DD)"},
          {"--step-days", "ephemeris.step_days", "Days between rows"},
          {"--count", "ephemeris.count", "Number of rows"},
          {"--velocity-convention", "ephemeris.velocity_convention", "linear | as-published"}}},
        {"compare", "Distances between two position sequences",
         {{"--a", "compare.a", "First file (default: the Jupiter fixture)"},
          {"--b", "compare.b", "Second file, or h1 for the ideal ellipse"}}},
        {"fit", "Fit the frame parameters to a Horizons table",
         {{"--fixture", "fit.fixture", "Horizons table (default: the Jupiter fixture)"},
          {"--objective", "fit.objective", "rms | max"},
          {"--max-evaluations", "fit.max_evaluations", "Objective evaluation budget"}}},
        {"fetch", "Download (or replay from cache) a Horizons vector table",
         {{"--body", "fetch.body_id", "Horizons body id"},
          {"--start", "fetch.start", "Start date"},
          {"--stop", "fetch.stop", "Stop date"},
          {"--step", "fetch.step", "Step, e.g. '1 d'"},
          {"--endpoint", "fetch.endpoint", "API endpoint URL"}}},
        {"trace", "SVG trace of the orbit",
         {{"--frame", "trace.frame", "inertial | rotating-pulsating"},
          {"--samples", "trace.samples", "Number of samples"},
          {"--t-end", "trace.t_end", "End time in ut, or T"},
          {"--svg", "output.svg_path", "SVG file (default <output>.svg or stdout)"}}},
    };
    std::vector<CLI::App*> sub_apps;
    std::vector<std::vector<std::size_t>> sub_slots;
    for (const Sub& s : subs) {
        CLI::App* sa = app.add_subcommand(s.name, s.help);
        sa->fallthrough();
        sub_apps.push_back(sa);
        sub_slots.emplace_back();
        for (const auto& [name, key, help] : s.opts) {
            add_flag(sa, ov, storage, name, key, help);
            flag_keys.push_back(key);
            sub_slots.back().push_back(storage.size() - 1);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::Config);
    }
    if (app.get_subcommands().empty() && !ov.config_path) {
        std::cerr << "A subcommand is required unless -c names a config\n" << app.help();
        return exit_code(ErrorKind::Config);
    }

    try {
        RunConfig base = ov.config_path ? load_run_config(*ov.config_path) : RunConfig{};
        json j = to_json(base);
        for (const auto& s : ov.sets) apply_set(j, s);
        // Global flags first, then only the selected subcommand's flags.
        std::size_t slot = 0;
        for (; slot < 10; ++slot)
            if (storage[slot]) apply_set(j, flag_keys[slot] + "=" + *storage[slot]);
        for (std::size_t i = 0; i < sub_apps.size(); ++i) {
            if (!sub_apps[i]->parsed()) continue;
            j["command"] = sub_apps[i]->get_name();
            for (std::size_t k : sub_slots[i])
                if (storage[k]) apply_set(j, flag_keys[k] + "=" + *storage[k]);
        }
        if (ov.allow_network) j["network"]["enabled"] = true;
        RunConfig cfg = run_config_from_json(j);
        if (cfg.network.data_dir.empty()) cfg.network.data_dir = cfg.data_dir(ERTBP_DEFAULT_DATA_DIR).string();
        cfg.validate();
        emit(cfg, run(cfg));
        return 0;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
