// Complete, serializable description of a command run. Extended-precision
// inputs are kept as the decimal text they were given in, so an embedded
// config re-parses to bit-identical values at the same precision.
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/ephemeris.hpp"
#include "ertbp/monodromy.hpp"
#include "ertbp/periodicity.hpp"
#include "ertbp/taylor.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <string>

namespace ertbp {

/// Environment variable naming the fixture/cache directory.
inline constexpr const char* kDataDirEnv = "ERTBP_DATA_DIR";
/// Marker prefixing the embedded config line in text and CSV outputs.
inline constexpr std::string_view kConfigLinePrefix = "# config: ";
inline constexpr std::string_view kFixtureName = "jupiter_2017-02-17_2028-12-28.txt";

struct RunConfig {
    std::string command;

    struct System {
        std::string m1 = "1.989e30";
        std::string m2 = "1898e24";
        std::string e = "0.048";
        std::string r0 = "815.757e9";
        std::string G = "6.67408e-11";
        std::string mu = "0.000953339";
    } system;

    struct Integrator {
        unsigned order = 9;
        unsigned precision_digits = kDefaultPrecisionDigits;
        /// Decimal step in ut, or "auto" for T/10000.
        std::string step = "0.0005856497259353531319661467";
        std::string mode = "fixed";
        std::string adaptive_tolerance = "1e-30";
        std::string collision_floor = "1e-12";
        std::string force_law = "attractive";  ///< attractive | repulsive-as-printed
    } integrator;

    struct Initial {
        std::string t = "0";
        std::string theta = "0";
        std::string z1 = "-0.038063861100";
        std::string z2 = "0.30182501850";
        std::string v1 = "-1.6227600677";
        std::string v2 = "-1.5096541883";
    } initial;

    FrameParams frame;

    struct Output {
        std::string path;               ///< empty = stdout
        std::string format = "text";    ///< text | csv | json
        int digits = 30;
        std::string svg_path;           ///< trace only; empty = <path>.svg or stdout
    } output;

    struct Network {
        bool enabled = false;
        std::string data_dir;
    } network;

    struct Propagate {
        std::string t_end = "T";  ///< decimal ut, or "T" for one period
        unsigned samples = 0;     ///< evenly spaced samples including both ends
    } propagate;

    struct Monodromy {
        std::string method = "variational";  ///< variational | central-difference
        std::string delta = "1e-10";
        std::string tolerance = "1e-8";
    } monodromy;

    struct Refine {
        std::string method = "newton";  ///< newton | damped | grid
        unsigned max_iterations = 10;
        unsigned max_halvings = 8;
        std::string policy = "min-norm";  ///< min-norm | strict
        std::string threshold_m = "1";
        std::string velocity_weight_s = "1";
        std::string det_floor = "1e-30";
        unsigned samples_per_axis = 3;
        std::array<std::string, 4> half_widths{"1e-9", "1e-9", "1e-9", "1e-9"};
        std::size_t budget = 100'000;
        unsigned workers = 0;
    } refine;

    struct Ephemeris {
        std::string start = "2017-02-17";
        unsigned step_days = 19;
        std::size_t count = 229;
        std::string velocity_convention = "linear";  ///< linear | as-published
    } ephemeris;

    struct Compare {
        std::string a;  ///< file, or empty for the fixture
        std::string b = "h1";  ///< file, or "h1" for the ideal ellipse
    } compare;

    struct Fit {
        std::string fixture;  ///< empty = <data_dir>/<kFixtureName>
        std::string objective = "rms";
        std::size_t max_evaluations = 200'000;
    } fit;

    HorizonsRequest fetch;

    struct Trace {
        std::string frame = "rotating-pulsating";  ///< inertial | rotating-pulsating
        unsigned samples = 2000;
        std::string t_end = "T";
    } trace;

    // Typed views. Each parses at the current working precision.
    SystemParams<Real> system_params() const;
    IntegratorConfig integrator_config() const;
    PhaseState<Real> initial_state() const;
    /// "T" resolves to the primaries' period.
    Real resolve_time(const std::string& text) const;
    StmOptions stm_options() const;
    NewtonOptions newton_options() const;
    GridOptions grid_options() const;

    /// Directory for the fixture and the fetch cache: the configured value,
    /// else $ERTBP_DATA_DIR, else `fallback`.
    std::filesystem::path data_dir(const std::filesystem::path& fallback) const;

    /// Rejects unknown enumerations and malformed numbers (ErrorKind::Config).
    void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Reads a config file, or the config embedded in a previous output (JSON
/// "config" member or a "# config: " line).
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ertbp
