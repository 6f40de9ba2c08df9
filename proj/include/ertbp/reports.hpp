// JSON renderings of module results and the SVG orbit trace. Extended
// precision values are written as decimal strings.
#pragma once

#include "ertbp/ephemeris.hpp"
#include "ertbp/monodromy.hpp"
#include "ertbp/periodicity.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <vector>

namespace ertbp {

nlohmann::json state_json(const PhaseState<Real>& s, int digits);
nlohmann::json closure_json(const ClosureResidual& r, const Real& velocity_weight_s, int digits);
nlohmann::json stability_json(const Monodromy& m, const StabilityReport& r, int digits);
nlohmann::json refinement_json(const RefinementReport& r, int digits);
nlohmann::json comparison_json(const ComparisonStats& s, bool include_dp);
nlohmann::json fit_json(const FitResult& r);
/// Doubles are written in shortest round-trip form.
nlohmann::json records_json(std::span<const EphemerisRecord> records);

enum class TraceFrame { Inertial, RotatingPulsating };
TraceFrame parse_trace_frame(std::string_view s);

/// Plotted coordinates. The rotating-pulsating view rotates z by -theta and
/// scales it by (1 - e cos theta)/(1 - e), which pins both primaries.
std::vector<Vector2> trace_points(std::span<const PhaseState<Real>> samples, TraceFrame frame,
                                  const SystemParams<Real>& params);

/// Minimal SVG: the trajectory as one polyline plus the primaries' positions
/// at the first sample.
std::string emit_svg_trace(std::span<const PhaseState<Real>> samples, TraceFrame frame,
                           const SystemParams<Real>& params);

}  // namespace ertbp
