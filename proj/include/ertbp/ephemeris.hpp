// Immersion of the planar normalized orbit into ecliptic J2000 coordinates
// (AU), calendar mapping, Horizons vector tables and the comparison/fit of
// an ideal Jupiter ellipse against them.
//
// Geometry is carried in double: the immersion constants are given to at
// most seven digits, so extended precision stops at the planar state.
#pragma once

#include "ertbp/dynamics.hpp"
#include "ertbp/real.hpp"
#include "ertbp/taylor.hpp"

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ertbp {

using Vector3 = Eigen::Vector3d;
using Vector2 = Eigen::Vector2d;

// ---------------------------------------------------------------- calendar

using Date = std::chrono::year_month_day;

/// Jupiter's aphelion, identified with t = 0.
constexpr Date kEpoch{std::chrono::year{2017}, std::chrono::February, std::chrono::day{17}};
/// Orbital period of Jupiter in days, identified with T.
constexpr double kJupiterPeriodDays = 4332.82;
/// Supported proleptic Gregorian range.
constexpr int kMinYear = 1600;
constexpr int kMaxYear = 2600;

/// Whole days from the epoch. Throws UnsupportedDate for invalid dates or
/// dates outside [kMinYear, kMaxYear].
std::int64_t days_since_epoch(const Date& d);
Date date_from_days(std::int64_t days);

/// t = days * T / 4332.82.
Real days_to_ut(const Real& days, const Real& e);
Real ut_to_days(const Real& t, const Real& e);
/// The calendar date at time t, which must fall on a whole day up to
/// rounding; throws UnsupportedDate otherwise.
Date date_from_ut(const Real& t, const Real& e);
/// UT = 4332.82 / T, days per ut.
double days_per_ut(const Real& e);

/// Parses "2017-02-17" or "2017-Feb-17".
Date parse_date(std::string_view text);
/// "2017-Feb-17".
std::string format_date(const Date& d);
/// "2017-02-17".
std::string format_iso_date(const Date& d);

// ------------------------------------------------------------------- frame

struct FrameParams {
    double inclination_deg = 1.30333;
    double node_deg = 100.53;
    double argperi_deg = -86.311;
    double aphelion_au = 5.453;
    double offset_au = 0.007067;  ///< translation along e1

    /// Fitted Jupiter parameters; inclination as used in the normal vector.
    static FrameParams jupiter() { return {}; }
    /// Same, with the inclination as listed among the fitted values.
    static FrameParams jupiter_listed_inclination() {
        FrameParams p;
        p.inclination_deg = 1.300333;
        return p;
    }
    void validate() const;
    bool operator==(const FrameParams&) const = default;
};

struct OrbitalFrame {
    Vector3 nu, V1, V2, e1, e2;
};

OrbitalFrame build_frame(const FrameParams& fp);

/// F(p) = offset e1 + aphelion (p1 e1 + p2 e2).
Vector3 immerse(const Vector2& p, const OrbitalFrame& frame, const FrameParams& fp);

/// Linear applies only the linear part of F to velocities. AsPublished
/// applies the whole affine map, translation included, which is how the
/// published spacecraft table's velocity columns were produced.
enum class VelocityConvention { Linear, AsPublished };
std::string_view to_string(VelocityConvention c);
VelocityConvention parse_velocity_convention(std::string_view s);

struct ImmersedVelocity {
    Vector3 per_ut;   ///< AU/ut
    Vector3 per_day;  ///< AU/day
};
ImmersedVelocity velocity_immerse(const Vector2& vp, const OrbitalFrame& frame, const FrameParams& fp,
                                  double days_per_ut,
                                  VelocityConvention convention = VelocityConvention::Linear);

// ----------------------------------------------------------------- records

struct EphemerisRecord {
    Date date;
    double seconds_of_day = 0;
    Vector3 position;      ///< AU
    Vector3 velocity_ut;   ///< AU/ut
    Vector3 velocity_day;  ///< AU/day
};

/// H1: immersed planar Jupiter positions at t = (i-1)/UT, i = 1..day_count.
std::vector<Vector3> jupiter_ellipse_sequence(std::size_t day_count, const SystemParams<Real>& params,
                                              const FrameParams& fp, const IntegratorConfig& config);

/// Planar Jupiter positions (ud) on the same daily grid, before immersion.
std::vector<Vector2> jupiter_planar_sequence(std::size_t day_count, const SystemParams<Real>& params,
                                             const IntegratorConfig& config);

/// Spacecraft records at start + k*step_days, k < count. `ic` is the state
/// at the epoch.
std::vector<EphemerisRecord> spacecraft_ephemeris(const Date& start, unsigned step_days, std::size_t count,
                                                  const PhaseState<Real>& ic, const SystemParams<Real>& params,
                                                  const IntegratorConfig& config, const FrameParams& fp,
                                                  VelocityConvention convention = VelocityConvention::Linear);

// ---------------------------------------------------------------- horizons

/// Parses Horizons vector lines "A.D. YYYY-Mon-DD HH:MM:SS.ffff, x, y, z,
/// vx, vy, vz". A leading Julian-date field, a trailing comma, blank lines
/// and lines starting with '#' are accepted. Velocities are AU/day; the
/// AU/ut form uses `days_per_ut`.
std::vector<EphemerisRecord> horizons_parse(std::string_view text, double days_per_ut);

struct HorizonsRequest {
    std::string body_id = "5";
    std::string start = "2017-02-17";
    std::string stop = "2028-12-28";
    std::string step = "1 d";
    std::string endpoint = "https://ssd.jpl.nasa.gov/api/horizons.api";

    /// File name of the cached table, readable from the request fields.
    std::string cache_key() const;
};

struct FetchOptions {
    bool network_enabled = false;
    std::filesystem::path cache_dir;
    int timeout_s = 60;
};

/// Vector table text between $$SOE and $$EOE. Served from the cache when
/// present; otherwise downloaded (only with network_enabled), validated by
/// parsing and cached. Throws NetworkUnavailable or UpstreamFormatChange.
std::string horizons_fetch(const HorizonsRequest& request, const FetchOptions& options);

/// Extracts the $$SOE..$$EOE block of a Horizons response; throws
/// UpstreamFormatChange when the markers are missing.
std::string extract_vector_block(std::string_view response);

// ------------------------------------------------------------- comparison

struct ComparisonStats {
    std::vector<double> dp;
    double min = 0;
    double max = 0;
    double rms = 0;
    std::size_t count = 0;
};

/// Pointwise distances |a_i - b_i|. Throws LengthMismatch.
ComparisonStats compare_sequences(std::span<const Vector3> a, std::span<const Vector3> b);

std::vector<Vector3> positions(std::span<const EphemerisRecord> records);

enum class FitObjective { Rms, Max };
std::string_view to_string(FitObjective o);
FitObjective parse_fit_objective(std::string_view s);

struct FitOptions {
    FitObjective objective = FitObjective::Rms;
    std::size_t max_evaluations = 200'000;
    /// Initial step per coordinate: inclination, node, argperi (deg),
    /// aphelion, offset (AU).
    std::array<double, 5> initial_steps{0.05, 0.5, 0.5, 0.01, 0.005};
    /// Search stops when every step falls below initial_step * min_step_ratio.
    double min_step_ratio = 1e-10;
};

struct FitResult {
    FrameParams params;
    ComparisonStats stats;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Hooke-Jeeves pattern search (coordinate moves with shrinking steps plus
/// pattern extrapolation) on the frame parameters, matching H1 from the
/// planar Jupiter positions against `observed`. Deterministic. On budget
/// exhaustion the best point is returned with converged = false.
FitResult fit_frame_params(std::span<const Vector3> observed, std::span<const Vector2> planar,
                           const FrameParams& guess, const FitOptions& options = {});

// ----------------------------------------------------------------- writers

inline constexpr std::string_view kCsvHeader =
    "date,x_au,y_au,z_au,vx_au_ut,vy_au_ut,vz_au_ut,vx_au_day,vy_au_day,vz_au_day";

/// Values carry at most 17 significant digits (double).
void write_csv(std::ostream& out, std::span<const EphemerisRecord> records, int digits);

/// "A.D. 2017-Feb-17 00:00:00.0000, x, y, z, vx, vy, vz" with AU/ut
/// velocities, the layout of the published table.
void write_table(std::ostream& out, std::span<const EphemerisRecord> records, int digits);

}  // namespace ertbp
