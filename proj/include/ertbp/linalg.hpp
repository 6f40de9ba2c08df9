// Small fixed-size vector, matrix and complex types over any scalar,
// including the extended-precision Real.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace ertbp {

template <typename S>
struct Vec2 {
    S x{};
    S y{};

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(const S& k) { x *= k; y *= k; return *this; }

    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator-(const Vec2& a) { return {S(-a.x), S(-a.y)}; }
    friend Vec2 operator*(Vec2 a, const S& k) { return a *= k; }
    friend Vec2 operator*(const S& k, Vec2 a) { return a *= k; }

    friend S dot(const Vec2& a, const Vec2& b) { return S(a.x * b.x + a.y * b.y); }
    friend S norm2(const Vec2& a) { return dot(a, a); }
    friend S norm(const Vec2& a) {
        using std::sqrt;
        return S(sqrt(norm2(a)));
    }
};

/// Row-major 4x4 matrix.
template <typename S>
struct Mat4 {
    std::array<S, 16> a{};

    S& operator()(std::size_t i, std::size_t j) { return a[4 * i + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return a[4 * i + j]; }

    static Mat4 identity() {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i) m(i, i) = S(1);
        return m;
    }

    friend Mat4 operator*(const Mat4& l, const Mat4& r) {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                S s(0);
                for (std::size_t k = 0; k < 4; ++k) s += l(i, k) * r(k, j);
                m(i, j) = s;
            }
        return m;
    }
    friend Mat4 operator-(const Mat4& l, const Mat4& r) {
        Mat4 m;
        for (std::size_t k = 0; k < 16; ++k) m.a[k] = l.a[k] - r.a[k];
        return m;
    }
    friend std::array<S, 4> operator*(const Mat4& l, const std::array<S, 4>& v) {
        std::array<S, 4> out{};
        for (std::size_t i = 0; i < 4; ++i) {
            S s(0);
            for (std::size_t k = 0; k < 4; ++k) s += l(i, k) * v[k];
            out[i] = s;
        }
        return out;
    }

    S trace() const { return S(a[0] + a[5] + a[10] + a[15]); }

    /// Largest absolute row sum.
    S norm_inf() const {
        using std::abs;
        S best(0);
        for (std::size_t i = 0; i < 4; ++i) {
            S s(0);
            for (std::size_t j = 0; j < 4; ++j) s += abs((*this)(i, j));
            if (s > best) best = s;
        }
        return best;
    }
};

/// Determinant by Gaussian elimination with partial pivoting.
template <typename S>
S determinant(Mat4<S> m) {
    using std::abs;
    S det(1);
    for (std::size_t c = 0; c < 4; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < 4; ++r)
            if (abs(m(r, c)) > abs(m(p, c))) p = r;
        if (m(p, c) == 0) return S(0);
        if (p != c) {
            for (std::size_t j = 0; j < 4; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < 4; ++r) {
            S f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < 4; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

/// Minimal complex number; std::complex is unspecified for non-builtin types.
template <typename S>
struct Complex {
    S re{};
    S im{};

    friend Complex operator+(const Complex& a, const Complex& b) { return {S(a.re + b.re), S(a.im + b.im)}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {S(a.re - b.re), S(a.im - b.im)}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {S(a.re * b.re - a.im * b.im), S(a.re * b.im + a.im * b.re)};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        S d = b.re * b.re + b.im * b.im;
        return {S((a.re * b.re + a.im * b.im) / d), S((a.im * b.re - a.re * b.im) / d)};
    }
    friend Complex conj(const Complex& a) { return {a.re, S(-a.im)}; }
    friend S abs(const Complex& a) {
        using std::sqrt;
        return S(sqrt(a.re * a.re + a.im * a.im));
    }
};

}  // namespace ertbp
