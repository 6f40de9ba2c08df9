#include "ertbp/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ertbp {

namespace {

using C = Complex<Real>;

constexpr unsigned kFallbackDigits = 200;

// Largest real root of x^3 + a x^2 + b x + c.
Real largest_cubic_root(const Real& a, const Real& b, const Real& c) {
    const Real third = Real(1) / 3;
    const Real Q = (a * a - 3 * b) / 9;
    const Real R = (2 * a * a * a - 9 * a * b + 27 * c) / 54;
    Real x;
    if (Q > 0 && R * R < Q * Q * Q) {
        const Real sq = sqrt(Q);
        const Real phi = acos(R / (sq * sq * sq));
        // cos(phi/3) is the largest of the three cosines for phi in [0, pi].
        x = -2 * sq * cos(phi / 3) - a * third;
        Real x2 = -2 * sq * cos((phi + 2 * pi()) / 3) - a * third;
        Real x3 = -2 * sq * cos((phi - 2 * pi()) / 3) - a * third;
        x = max(x, max(x2, x3));
    } else {
        Real A = -cbrt(Real(abs(R) + sqrt(Real(R * R - Q * Q * Q))));
        if (R < 0) A = -A;
        Real B = A == 0 ? Real(0) : Real(Q / A);
        x = A + B - a * third;
    }
    for (int i = 0; i < 3; ++i) {
        Real f = ((x + a) * x + b) * x + c;
        Real df = (3 * x + 2 * a) * x + b;
        if (df == 0) break;
        Real nx = x - f / df;
        if (nx == x) break;
        x = nx;
    }
    return x;
}

// Roots of y^2 + s y + t, appended as either two reals or a conjugate pair.
void quadratic_roots(const Real& s, const Real& t, std::vector<C>& out) {
    Real disc = s * s - 4 * t;
    if (disc >= 0) {
        Real sq = sqrt(disc);
        Real q = s >= 0 ? Real(-(s + sq) / 2) : Real(-(s - sq) / 2);
        if (q == 0) {
            out.push_back({Real(0), Real(0)});
            out.push_back({Real(0), Real(0)});
        } else {
            out.push_back({q, Real(0)});
            out.push_back({Real(t / q), Real(0)});
        }
    } else {
        Real re = -s / 2;
        Real im = sqrt(Real(-disc)) / 2;
        out.push_back({re, im});
        out.push_back({re, Real(-im)});
    }
}

struct Split {
    std::vector<C> roots;
    bool well_conditioned = true;
};

// Ferrari split of the monic quartic with coefficients c0..c3.
Split split_quartic(const std::array<Real, 4>& c) {
    const Real& b = c[3];
    const Real shift = b / 4;
    // Depressed quartic y^4 + p y^2 + q y + r, x = y - b/4.
    const Real b2 = b * b;
    const Real p = c[2] - 3 * b2 / 8;
    const Real q = c[1] - b * c[2] / 2 + b2 * b / 8;
    const Real r = c[0] - b * c[1] / 4 + b2 * c[2] / 16 - 3 * b2 * b2 / 256;

    // Resolvent in S = s^2: S^3 + 2p S^2 + (p^2 - 4r) S - q^2 = 0.
    Real S = largest_cubic_root(2 * p, p * p - 4 * r, -q * q);
    if (S < 0) S = Real(0);
    Split out;
    const Real scale = max(Real(1), max(Real(abs(p)), max(Real(sqrt(abs(r))), Real(abs(q)))));
    const Real eps = pow(Real(10), -Real(working_precision()));
    std::vector<C> ys;
    if (S > 0) {
        const Real s = sqrt(S);
        const Real qs = q / s;
        quadratic_roots(s, Real((p + S - qs) / 2), ys);
        quadratic_roots(Real(-s), Real((p + S + qs) / 2), ys);
        // q/s amplifies rounding in S when s is tiny relative to the scale.
        if (S < sqrt(eps) * scale * scale) out.well_conditioned = false;
    } else {
        // Biquadratic: t, u are the (real) roots of w^2 - p w + r = 0.
        Real disc = p * p - 4 * r;
        if (disc < 0) disc = Real(0);
        Real sq = sqrt(disc);
        quadratic_roots(Real(0), Real((p - sq) / 2), ys);
        quadratic_roots(Real(0), Real((p + sq) / 2), ys);
    }
    for (C& y : ys) out.roots.push_back({Real(y.re - shift), y.im});
    return out;
}

C eval_poly(const std::array<Real, 4>& c, const C& x, C* derivative) {
    C p{Real(1), Real(0)};
    C dp{Real(0), Real(0)};
    for (int k = 3; k >= 0; --k) {
        dp = dp * x + p;
        p = p * x + C{c[static_cast<std::size_t>(k)], Real(0)};
    }
    if (derivative) *derivative = dp;
    return p;
}

// One Newton step, kept only if it does not increase the residual.
C polish(const std::array<Real, 4>& c, const C& x) {
    C d;
    C f = eval_poly(c, x, &d);
    if (abs(d) == 0) return x;
    C nx = x - f / d;
    if (x.im == 0) nx.im = Real(0);
    return abs(eval_poly(c, nx, nullptr)) <= abs(f) ? nx : x;
}

std::array<C, 4> finish(const std::array<Real, 4>& c, std::vector<C> roots) {
    // Polish the upper member of each conjugate pair and mirror it.
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (roots[i].im < 0) continue;
        roots[i] = polish(c, roots[i]);
        if (roots[i].im > 0 && i + 1 < roots.size() && roots[i + 1].im < 0) roots[i + 1] = conj(roots[i]);
    }
    std::vector<C> upper;
    for (const C& z : roots)
        if (z.im >= 0) upper.push_back(z);
    std::sort(upper.begin(), upper.end(), [](const C& a, const C& b) {
        if (a.re != b.re) return a.re > b.re;
        return a.im > b.im;
    });
    std::array<C, 4> out;
    std::size_t k = 0;
    for (const C& z : upper) {
        out[k++] = z;
        if (z.im > 0) out[k++] = conj(z);
    }
    return out;
}

}  // namespace

std::array<Real, 4> characteristic_polynomial(const Mat4<Real>& a) {
    // M_k = A M_{k-1} + c_{4-k+1} I, c_{4-k} = -tr(A M_k) / k, with c_4 = 1.
    std::array<Real, 5> c;
    c[4] = Real(1);
    Mat4<Real> m;  // M_0 = 0
    for (int k = 1; k <= 4; ++k) {
        Mat4<Real> next = a * m;
        for (std::size_t i = 0; i < 4; ++i) next(i, i) += c[static_cast<std::size_t>(4 - k + 1)];
        m = next;
        c[static_cast<std::size_t>(4 - k)] = -(a * m).trace() / k;
    }
    return {c[0], c[1], c[2], c[3]};
}

std::array<Complex<Real>, 4> quartic_roots(const std::array<Real, 4>& coeffs) {
    const unsigned digits = working_precision();
    std::array<Real, 4> c;
    for (std::size_t i = 0; i < 4; ++i) c[i] = adopt(coeffs[i]);
    Split split = split_quartic(c);
    if (split.well_conditioned) return finish(c, std::move(split.roots));

    std::array<C, 4> hi_roots;
    {
        PrecisionScope scope(std::max(digits, kFallbackDigits));
        std::array<Real, 4> hc;
        for (std::size_t i = 0; i < 4; ++i) hc[i] = adopt(c[i]);
        Split hs = split_quartic(hc);
        hi_roots = finish(hc, std::move(hs.roots));
    }
    for (C& z : hi_roots) {
        z.re.precision(digits);
        z.im.precision(digits);
    }
    return hi_roots;
}

std::array<Complex<Real>, 4> eigenvalues_4x4(const Mat4<Real>& m) {
    return quartic_roots(characteristic_polynomial(m));
}

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "unknown";
}

StabilityReport classify_stability(const std::array<Complex<Real>, 4>& eigenvalues,
                                   const Real& tolerance) {
    StabilityReport r;
    r.eigenvalues = eigenvalues;
    r.modulus_tolerance = tolerance;
    bool outside = false;
    for (std::size_t i = 0; i < 4; ++i) {
        r.moduli[i] = abs(eigenvalues[i]);
        r.moduli_minus_one[i] = r.moduli[i] - 1;
        if (r.moduli[i] > 1 + tolerance) outside = true;
        if (abs(r.moduli_minus_one[i]) <= tolerance) r.on_unit_circle = true;
    }
    r.distinct = true;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            if (abs(eigenvalues[i] - eigenvalues[j]) <= tolerance) r.distinct = false;
    if (outside) {
        r.classification = Stability::Unstable;
    } else if (r.distinct) {
        r.classification = Stability::Stable;
    } else {
        r.classification = Stability::Marginal;
    }
    return r;
}

}  // namespace ertbp
