#include "ertbp/ephemeris.hpp"

#include "ertbp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ertbp {

namespace {

constexpr std::array<std::string_view, 12> kMonths{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

double deg(double x) { return x * std::numbers::pi / 180.0; }

Real period_days() { return parse_real("4332.82"); }

double to_double(const Real& x) { return x.convert_to<double>(); }

void check_date(const Date& d) {
    if (!d.ok()) throw Error(ErrorKind::UnsupportedDate, "invalid calendar date");
    const int y = static_cast<int>(d.year());
    if (y < kMinYear || y > kMaxYear) {
        throw Error(ErrorKind::UnsupportedDate, "year " + std::to_string(y) + " outside " +
                                                    std::to_string(kMinYear) + ".." + std::to_string(kMaxYear));
    }
}

std::string format_value(double x, int digits) {
    std::ostringstream os;
    os << std::setprecision(std::clamp(digits, 1, std::numeric_limits<double>::max_digits10)) << x;
    return os.str();
}

std::string format_time_of_day(double seconds) {
    const auto whole = static_cast<long>(std::floor(seconds));
    const long ten_thousandths = std::lround((seconds - static_cast<double>(whole)) * 1e4);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld:%02ld.%04ld", whole / 3600, (whole / 60) % 60, whole % 60,
                  ten_thousandths);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------- calendar

std::int64_t days_since_epoch(const Date& d) {
    check_date(d);
    return (std::chrono::sys_days(d) - std::chrono::sys_days(kEpoch)).count();
}

Date date_from_days(std::int64_t days) {
    Date d{std::chrono::sys_days(kEpoch) + std::chrono::days(days)};
    check_date(d);
    return d;
}

Real days_to_ut(const Real& days, const Real& e) { return days * orbital_period(e) / period_days(); }

Real ut_to_days(const Real& t, const Real& e) { return t * period_days() / orbital_period(e); }

Date date_from_ut(const Real& t, const Real& e) {
    const Real d = ut_to_days(t, e);
    const Real n = round(d);
    const Real tol = pow(Real(10), -Real(working_precision()) + 8) * max(Real(1), Real(abs(n)));
    if (abs(d - n) > tol) throw Error(ErrorKind::UnsupportedDate, "time does not fall on a whole day");
    return date_from_days(n.convert_to<std::int64_t>());
}

double days_per_ut(const Real& e) { return to_double(period_days() / orbital_period(e)); }

Date parse_date(std::string_view text) {
    auto fail = [&]() -> Date {
        throw Error(ErrorKind::UnsupportedDate, "cannot parse date '" + std::string(text) + "'");
    };
    if (text.size() < 10 || text[4] != '-') return fail();
    const std::string s(text);
    int y = 0;
    unsigned d = 0;
    unsigned m = 0;
    const std::size_t dash2 = s.find('-', 5);
    if (dash2 == std::string::npos) return fail();
    const std::string month = s.substr(5, dash2 - 5);
    try {
        std::size_t used = 0;
        y = std::stoi(s.substr(0, 4), &used);
        if (used != 4) return fail();
        const std::string day = s.substr(dash2 + 1);
        d = static_cast<unsigned>(std::stoul(day, &used));
        if (used != day.size()) return fail();
        if (month.size() == 3 && std::isalpha(static_cast<unsigned char>(month[0]))) {
            auto it = std::find(kMonths.begin(), kMonths.end(), month);
            if (it == kMonths.end()) return fail();
            m = static_cast<unsigned>(it - kMonths.begin()) + 1;
        } else {
            m = static_cast<unsigned>(std::stoul(month, &used));
            if (used != month.size()) return fail();
        }
    } catch (const std::logic_error&) {
        return fail();
    }
    Date out{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    check_date(out);
    return out;
}

std::string format_date(const Date& d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%s-%02u", static_cast<int>(d.year()),
                  std::string(kMonths[static_cast<unsigned>(d.month()) - 1]).c_str(),
                  static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_iso_date(const Date& d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

// ------------------------------------------------------------------- frame

void FrameParams::validate() const {
    if (!(aphelion_au > 0)) throw Error(ErrorKind::Config, "aphelion_au must be positive");
    for (double v : {inclination_deg, node_deg, argperi_deg, offset_au})
        if (!std::isfinite(v)) throw Error(ErrorKind::Config, "frame parameters must be finite");
}

OrbitalFrame build_frame(const FrameParams& fp) {
    const double i = deg(fp.inclination_deg);
    const double n = deg(fp.node_deg);
    const double w = deg(fp.argperi_deg);
    OrbitalFrame f;
    f.nu = {std::cos(n - deg(90)) * std::sin(i), std::sin(n - deg(90)) * std::sin(i), std::cos(i)};
    f.V1 = {std::cos(n + deg(180)), std::sin(n + deg(180)), 0.0};
    f.V2 = f.nu.cross(f.V1);
    f.e1 = std::cos(w) * f.V1 + std::sin(w) * f.V2;
    f.e2 = f.nu.cross(f.e1);
    return f;
}

Vector3 immerse(const Vector2& p, const OrbitalFrame& frame, const FrameParams& fp) {
    return fp.offset_au * frame.e1 + fp.aphelion_au * (p.x() * frame.e1 + p.y() * frame.e2);
}

std::string_view to_string(VelocityConvention c) {
    return c == VelocityConvention::Linear ? "linear" : "as-published";
}

VelocityConvention parse_velocity_convention(std::string_view s) {
    if (s == "linear") return VelocityConvention::Linear;
    if (s == "as-published") return VelocityConvention::AsPublished;
    throw Error(ErrorKind::Config, "velocity convention must be 'linear' or 'as-published'");
}

ImmersedVelocity velocity_immerse(const Vector2& vp, const OrbitalFrame& frame, const FrameParams& fp,
                                  double days_per_ut, VelocityConvention convention) {
    Vector3 per_ut = fp.aphelion_au * (vp.x() * frame.e1 + vp.y() * frame.e2);
    if (convention == VelocityConvention::AsPublished) per_ut += fp.offset_au * frame.e1;
    return {per_ut, per_ut / days_per_ut};
}

// ----------------------------------------------------------------- records

std::vector<Vector2> jupiter_planar_sequence(std::size_t day_count, const SystemParams<Real>& params,
                                             const IntegratorConfig& config) {
    if (day_count < 1) throw Error(ErrorKind::InvalidArgument, "day_count must be at least 1");
    PrecisionScope scope(config.precision_digits);
    const Real e = adopt(params.e);
    std::vector<Real> times;
    times.reserve(day_count);
    for (std::size_t k = 0; k < day_count; ++k) times.push_back(days_to_ut(Real(k), e));
    const std::vector<Real> theta = propagate_theta(times, e, config);
    std::vector<Vector2> out;
    out.reserve(day_count);
    for (const Real& th : theta) {
        const Vec2<Real> y = primary_positions(th, params).y;
        out.emplace_back(to_double(y.x), to_double(y.y));
    }
    return out;
}

std::vector<Vector3> jupiter_ellipse_sequence(std::size_t day_count, const SystemParams<Real>& params,
                                              const FrameParams& fp, const IntegratorConfig& config) {
    fp.validate();
    const OrbitalFrame frame = build_frame(fp);
    std::vector<Vector3> out;
    for (const Vector2& p : jupiter_planar_sequence(day_count, params, config))
        out.push_back(immerse(p, frame, fp));
    return out;
}

std::vector<EphemerisRecord> spacecraft_ephemeris(const Date& start, unsigned step_days, std::size_t count,
                                                  const PhaseState<Real>& ic, const SystemParams<Real>& params,
                                                  const IntegratorConfig& config, const FrameParams& fp,
                                                  VelocityConvention convention) {
    fp.validate();
    if (count == 0) return {};
    if (step_days == 0 && count > 1) throw Error(ErrorKind::InvalidArgument, "step_days must be positive");
    const std::int64_t first = days_since_epoch(start);
    if (first < 0) throw Error(ErrorKind::UnsupportedDate, "start date precedes the epoch of the initial condition");
    const std::int64_t last = first + static_cast<std::int64_t>(step_days) * static_cast<std::int64_t>(count - 1);
    date_from_days(last);

    PrecisionScope scope(config.precision_digits);
    const Real e = adopt(params.e);
    const Real t0 = adopt(ic.t);
    std::vector<Real> times;
    times.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        times.push_back(t0 + days_to_ut(Real(first + static_cast<std::int64_t>(step_days * k)), e));
    const Trajectory traj = propagate_dense(ic, times.back(), times, params, config);

    const OrbitalFrame frame = build_frame(fp);
    const double upd = days_per_ut(e);
    std::vector<EphemerisRecord> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const PhaseState<Real>& s = traj.samples[k];
        EphemerisRecord r;
        r.date = date_from_days(first + static_cast<std::int64_t>(step_days * k));
        r.position = immerse({to_double(s.z.x), to_double(s.z.y)}, frame, fp);
        ImmersedVelocity v = velocity_immerse({to_double(s.v.x), to_double(s.v.y)}, frame, fp, upd, convention);
        r.velocity_ut = v.per_ut;
        r.velocity_day = v.per_day;
        out.push_back(r);
    }
    return out;
}

// ------------------------------------------------------------- comparison

ComparisonStats compare_sequences(std::span<const Vector3> a, std::span<const Vector3> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::LengthMismatch, "sequence lengths differ: " + std::to_string(a.size()) + " vs " +
                                                   std::to_string(b.size()));
    }
    ComparisonStats s;
    s.count = a.size();
    s.dp.reserve(a.size());
    double sum2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = (a[i] - b[i]).norm();
        s.dp.push_back(d);
        sum2 += d * d;
    }
    if (!s.dp.empty()) {
        auto [lo, hi] = std::minmax_element(s.dp.begin(), s.dp.end());
        s.min = *lo;
        s.max = *hi;
        s.rms = std::sqrt(sum2 / static_cast<double>(s.count));
    }
    return s;
}

std::vector<Vector3> positions(std::span<const EphemerisRecord> records) {
    std::vector<Vector3> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.position);
    return out;
}

std::string_view to_string(FitObjective o) { return o == FitObjective::Rms ? "rms" : "max"; }

FitObjective parse_fit_objective(std::string_view s) {
    if (s == "rms") return FitObjective::Rms;
    if (s == "max") return FitObjective::Max;
    throw Error(ErrorKind::Config, "objective must be 'rms' or 'max'");
}

namespace {

using Point5 = std::array<double, 5>;

FrameParams from_point(const Point5& x) { return {x[0], x[1], x[2], x[3], x[4]}; }

class FitObjectiveFn {
public:
    FitObjectiveFn(std::span<const Vector3> observed, std::span<const Vector2> planar, FitObjective objective)
        : observed_(observed), planar_(planar), objective_(objective) {}

    double operator()(const Point5& x) {
        ++evaluations;
        const FrameParams fp = from_point(x);
        if (!(fp.aphelion_au > 0)) return std::numeric_limits<double>::infinity();
        const OrbitalFrame f = build_frame(fp);
        double acc = 0;
        for (std::size_t i = 0; i < observed_.size(); ++i) {
            const double d2 = (immerse(planar_[i], f, fp) - observed_[i]).squaredNorm();
            acc = objective_ == FitObjective::Rms ? acc + d2 : std::max(acc, d2);
        }
        if (objective_ == FitObjective::Rms) acc /= static_cast<double>(observed_.size());
        return std::sqrt(acc);
    }

    std::size_t evaluations = 0;

private:
    std::span<const Vector3> observed_;
    std::span<const Vector2> planar_;
    FitObjective objective_;
};

}  // namespace

FitResult fit_frame_params(std::span<const Vector3> observed, std::span<const Vector2> planar,
                           const FrameParams& guess, const FitOptions& options) {
    if (observed.size() < 100) throw Error(ErrorKind::InvalidArgument, "fitting needs at least 100 records");
    if (planar.size() != observed.size()) {
        throw Error(ErrorKind::LengthMismatch, "planar and observed sequences differ in length");
    }
    guess.validate();
    FitObjectiveFn f(observed, planar, options.objective);
    Point5 steps = options.initial_steps;
    Point5 x{guess.inclination_deg, guess.node_deg, guess.argperi_deg, guess.aphelion_au, guess.offset_au};
    double fx = f(x);

    // Coordinate moves around `base`; returns the improved point in place.
    auto explore = [&](Point5& base, double& fbase) {
        for (std::size_t i = 0; i < 5; ++i) {
            for (double sign : {1.0, -1.0}) {
                Point5 trial = base;
                trial[i] += sign * steps[i];
                const double ft = f(trial);
                if (ft < fbase) {
                    base = trial;
                    fbase = ft;
                    break;
                }
            }
        }
    };

    bool converged = false;
    while (f.evaluations < options.max_evaluations) {
        Point5 xn = x;
        double fn = fx;
        explore(xn, fn);
        if (fn < fx) {
            // Pattern moves along the last successful direction.
            while (f.evaluations < options.max_evaluations) {
                Point5 xp;
                for (std::size_t i = 0; i < 5; ++i) xp[i] = 2 * xn[i] - x[i];
                x = xn;
                fx = fn;
                double fp = f(xp);
                explore(xp, fp);
                if (!(fp < fx)) break;
                xn = xp;
                fn = fp;
            }
            continue;
        }
        bool all_small = true;
        for (std::size_t i = 0; i < 5; ++i) {
            steps[i] /= 2;
            if (steps[i] >= options.initial_steps[i] * options.min_step_ratio) all_small = false;
        }
        if (all_small) {
            converged = true;
            break;
        }
    }

    FitResult r;
    r.params = from_point(x);
    r.evaluations = f.evaluations;
    r.converged = converged;
    const OrbitalFrame frame = build_frame(r.params);
    std::vector<Vector3> model;
    model.reserve(planar.size());
    for (const Vector2& p : planar) model.push_back(immerse(p, frame, r.params));
    r.stats = compare_sequences(model, observed);
    return r;
}

// ----------------------------------------------------------------- writers

void write_csv(std::ostream& out, std::span<const EphemerisRecord> records, int digits) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << format_iso_date(r.date);
        for (const Vector3* v : {&r.position, &r.velocity_ut, &r.velocity_day})
            for (int k = 0; k < 3; ++k) out << ',' << format_value((*v)[k], digits);
        out << '\n';
    }
}

void write_table(std::ostream& out, std::span<const EphemerisRecord> records, int digits) {
    for (const auto& r : records) {
        out << "A.D. " << format_date(r.date) << ' ' << format_time_of_day(r.seconds_of_day);
        for (const Vector3* v : {&r.position, &r.velocity_ut})
            for (int k = 0; k < 3; ++k) out << ", " << format_value((*v)[k], digits);
        out << '\n';
    }
}

}  // namespace ertbp
