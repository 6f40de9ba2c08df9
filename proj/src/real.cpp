#include "ertbp/real.hpp"

#include <sstream>
#include <stdexcept>

namespace ertbp {

unsigned working_precision() { return Real::default_precision(); }

void set_working_precision(unsigned digits) {
    if (digits < 16) {
        throw std::invalid_argument("working precision must be at least 16 digits");
    }
    Real::default_precision(digits);
}

void ensure_working_precision(unsigned digits) {
    if (working_precision() != digits) set_working_precision(digits);
}

PrecisionScope::PrecisionScope(unsigned digits) : saved_(working_precision()) {
    ensure_working_precision(digits);
}

PrecisionScope::~PrecisionScope() {
    if (working_precision() != saved_) Real::default_precision(saved_);
}

Real parse_real(std::string_view text) {
    std::string s(text);
    // Accept Fortran/Mathematica style exponents.
    for (char& c : s) {
        if (c == 'D' || c == 'd') c = 'e';
    }
    try {
        return Real(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
}

std::string format_sci(const Real& x, int digits) {
    std::ostringstream os;
    os.precision(digits > 0 ? digits - 1 : 0);
    os << std::scientific << x;
    return os.str();
}

std::string format_general(const Real& x, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

Real pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

}  // namespace ertbp
