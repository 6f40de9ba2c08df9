// Extended-precision scalar used throughout the library.
#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>

namespace ertbp {

/// Runtime-precision binary floating point backed by MPFR.
using Real = boost::multiprecision::mpfr_float;

/// Default number of significant decimal digits for extended-precision work.
inline constexpr unsigned kDefaultPrecisionDigits = 35;

/// Current process-wide working precision in decimal digits.
unsigned working_precision();

/// Sets the process-wide working precision. Values created afterwards carry
/// the new precision; existing values keep theirs until adopted.
void set_working_precision(unsigned digits);

/// Raises or lowers the working precision only if it differs. Never writes
/// the global when it already matches, so worker threads may call it freely
/// once the parent has configured the process.
void ensure_working_precision(unsigned digits);

/// RAII guard that switches the working precision and restores it on exit.
/// Like ensure_working_precision, it leaves the global untouched when the
/// requested precision is already active.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

/// Re-rounds `x` to the current working precision.
inline Real adopt(Real x) {
    x.precision(working_precision());
    return x;
}
inline double adopt(double x) { return x; }

/// Parses a decimal literal at the current working precision.
Real parse_real(std::string_view text);

/// Formats with `digits` significant digits in scientific notation.
std::string format_sci(const Real& x, int digits);

/// Formats with `digits` significant digits, fixed or scientific, whichever
/// is shorter (std::defaultfloat semantics).
std::string format_general(const Real& x, int digits);

Real pi();

template <typename S>
S real_pi() {
    if constexpr (std::is_same_v<S, Real>) {
        return pi();
    } else {
        return S(3.14159265358979323846264338327950288L);
    }
}

}  // namespace ertbp
