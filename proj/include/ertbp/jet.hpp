// Truncated Taylor series ("jets") and their arithmetic.
//
// Every operation is offered in two forms: a whole-jet form (jet_mul, ...)
// and a single-coefficient kernel (mul_coeff, ...) that computes the k-th
// coefficient from lower-order ones. The integrator uses the kernels to
// build solution jets one order at a time.
#pragma once

#include "ertbp/errors.hpp"

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace ertbp {

template <typename S>
class Jet {
public:
    explicit Jet(std::size_t order) : c_(order + 1, S(0)) {}
    Jet(std::size_t order, std::initializer_list<S> head) : c_(order + 1, S(0)) {
        if (head.size() > c_.size()) throw Error(ErrorKind::InvalidArgument, "jet literal longer than order+1");
        std::size_t k = 0;
        for (const S& v : head) c_[k++] = v;
    }

    /// Constant jet.
    static Jet constant(std::size_t order, const S& value) {
        Jet j(order);
        j.c_[0] = value;
        return j;
    }
    /// The independent variable t around t0: coefficients (t0, 1, 0, ...).
    static Jet variable(std::size_t order, const S& t0) {
        Jet j(order);
        j.c_[0] = t0;
        if (order >= 1) j.c_[1] = S(1);
        return j;
    }

    std::size_t order() const { return c_.size() - 1; }
    S& operator[](std::size_t k) { return c_[k]; }
    const S& operator[](std::size_t k) const { return c_[k]; }
    const std::vector<S>& coeffs() const { return c_; }

    /// Horner evaluation of the truncated series at offset h.
    S eval(const S& h) const {
        S acc = c_.back();
        for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * h + c_[k];
        return acc;
    }
    /// Derivative of the truncated series evaluated at offset h.
    S eval_derivative(const S& h) const {
        S acc(0);
        for (std::size_t k = c_.size() - 1; k >= 1; --k) acc = acc * h + S(k) * c_[k];
        return acc;
    }

private:
    std::vector<S> c_;
};

namespace jet_kernel {

// Each kernel returns coefficient k of the result; inputs must already hold
// coefficients 0..k, and the result jet must hold 0..k-1.

template <typename S>
S mul_coeff(const Jet<S>& a, const Jet<S>& b, std::size_t k) {
    S s(0);
    for (std::size_t j = 0; j <= k; ++j) s += a[j] * b[k - j];
    return s;
}

/// w = a / b.
template <typename S>
S div_coeff(const Jet<S>& a, const Jet<S>& b, const Jet<S>& w, std::size_t k) {
    S s = a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= b[j] * w[k - j];
    return S(s / b[0]);
}

/// w = u^alpha, u0 > 0.
template <typename S>
S pow_coeff(const Jet<S>& u, const S& alpha, const Jet<S>& w, std::size_t k) {
    using std::pow;
    if (k == 0) return S(pow(u[0], alpha));
    S s(0);
    for (std::size_t j = 0; j < k; ++j) s += (alpha * S(k - j) - S(j)) * u[k - j] * w[j];
    return S(s / (S(k) * u[0]));
}

/// s = sin u, c = cos u; sets coefficient k of both.
template <typename S>
void sin_cos_coeff(const Jet<S>& u, Jet<S>& s, Jet<S>& c, std::size_t k) {
    using std::cos;
    using std::sin;
    if (k == 0) {
        s[0] = sin(u[0]);
        c[0] = cos(u[0]);
        return;
    }
    S ss(0), cc(0);
    for (std::size_t j = 1; j <= k; ++j) {
        S ju = S(j) * u[j];
        ss += ju * c[k - j];
        cc += ju * s[k - j];
    }
    s[k] = ss / S(k);
    c[k] = -cc / S(k);
}

}  // namespace jet_kernel

namespace detail {
template <typename S>
void require_same_order(const Jet<S>& a, const Jet<S>& b) {
    if (a.order() != b.order()) throw Error(ErrorKind::InvalidArgument, "jet order mismatch");
}
}  // namespace detail

template <typename S>
Jet<S> jet_add(const Jet<S>& a, const Jet<S>& b) {
    detail::require_same_order(a, b);
    Jet<S> r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r[k] = a[k] + b[k];
    return r;
}

template <typename S>
Jet<S> jet_sub(const Jet<S>& a, const Jet<S>& b) {
    detail::require_same_order(a, b);
    Jet<S> r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r[k] = a[k] - b[k];
    return r;
}

template <typename S>
Jet<S> jet_scale(const Jet<S>& a, const S& f) {
    Jet<S> r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r[k] = a[k] * f;
    return r;
}

/// Truncated Cauchy product.
template <typename S>
Jet<S> jet_mul(const Jet<S>& a, const Jet<S>& b) {
    detail::require_same_order(a, b);
    Jet<S> r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r[k] = jet_kernel::mul_coeff(a, b, k);
    return r;
}

template <typename S>
Jet<S> jet_div(const Jet<S>& a, const Jet<S>& b) {
    detail::require_same_order(a, b);
    if (b[0] == 0) throw Error(ErrorKind::InvalidArgument, "jet division by a jet with zero constant term");
    Jet<S> r(a.order());
    for (std::size_t k = 0; k <= a.order(); ++k) r[k] = jet_kernel::div_coeff(a, b, r, k);
    return r;
}

template <typename S>
Jet<S> jet_pow(const Jet<S>& u, const S& alpha) {
    if (!(u[0] > 0))
        throw Error(ErrorKind::NonpositiveLeadingCoefficient, "jet_pow requires a positive constant term");
    Jet<S> w(u.order());
    for (std::size_t k = 0; k <= u.order(); ++k) w[k] = jet_kernel::pow_coeff(u, alpha, w, k);
    return w;
}

template <typename S>
std::pair<Jet<S>, Jet<S>> jet_sin_cos(const Jet<S>& u) {
    Jet<S> s(u.order()), c(u.order());
    for (std::size_t k = 0; k <= u.order(); ++k) jet_kernel::sin_cos_coeff(u, s, c, k);
    return {std::move(s), std::move(c)};
}

}  // namespace ertbp
