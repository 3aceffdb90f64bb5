#pragma once

#include <cmath>
#include <vector>

#include "t2m/types.hpp"

namespace t2m {

// Scalar carrying a value together with two directional derivatives and the
// mixed second derivative along those directions.  Seeding the inputs of a
// function with (y_i, u_i, v_i, 0) and running it on HyperDual arithmetic
// yields, per output component, the exact values of
//
//   f(y),  df(y)u,  df(y)v,  d2f(y)(u,v).
//
// All rules below follow from the bilinear Leibniz identity
//   (ab)_uv = a_uv b + a_u b_v + a_v b_u + a b_uv
// and, for a smooth g,
//   g(a)_uv = g'(a) a_uv + g''(a) a_u a_v.
struct HyperDual {
    double f = 0.0;    // value
    double du = 0.0;   // first directional derivative along u
    double dv = 0.0;   // first directional derivative along v
    double duv = 0.0;  // mixed second derivative

    HyperDual() = default;
    HyperDual(double value) : f(value) {}  // NOLINT: implicit by design
    HyperDual(double value, double d_u, double d_v, double d_uv)
        : f(value), du(d_u), dv(d_v), duv(d_uv) {}

    static HyperDual seeded(double value, double u_component, double v_component) {
        return HyperDual(value, u_component, v_component, 0.0);
    }
};

inline HyperDual operator+(const HyperDual& a, const HyperDual& b) {
    return {a.f + b.f, a.du + b.du, a.dv + b.dv, a.duv + b.duv};
}

inline HyperDual operator-(const HyperDual& a, const HyperDual& b) {
    return {a.f - b.f, a.du - b.du, a.dv - b.dv, a.duv - b.duv};
}

inline HyperDual operator-(const HyperDual& a) { return {-a.f, -a.du, -a.dv, -a.duv}; }

inline HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    return {a.f * b.f,
            a.du * b.f + a.f * b.du,
            a.dv * b.f + a.f * b.dv,
            a.duv * b.f + a.du * b.dv + a.dv * b.du + a.f * b.duv};
}

inline HyperDual operator*(double c, const HyperDual& a) {
    return {c * a.f, c * a.du, c * a.dv, c * a.duv};
}
inline HyperDual operator*(const HyperDual& a, double c) { return c * a; }
inline HyperDual operator+(double c, const HyperDual& a) { return HyperDual(c) + a; }
inline HyperDual operator+(const HyperDual& a, double c) { return a + HyperDual(c); }
inline HyperDual operator-(double c, const HyperDual& a) { return HyperDual(c) - a; }
inline HyperDual operator-(const HyperDual& a, double c) { return a - HyperDual(c); }

// Lift g through the chain rule: needs g, g' and g'' at the value.
inline HyperDual lift_unary(const HyperDual& a, double g, double g1, double g2) {
    return {g, g1 * a.du, g1 * a.dv, g1 * a.duv + g2 * a.du * a.dv};
}

inline HyperDual inv(const HyperDual& a) {
    const double w = 1.0 / a.f;
    return lift_unary(a, w, -w * w, 2.0 * w * w * w);
}

inline HyperDual operator/(const HyperDual& a, const HyperDual& b) { return a * inv(b); }
inline HyperDual operator/(const HyperDual& a, double c) { return a * (1.0 / c); }
inline HyperDual operator/(double c, const HyperDual& a) { return c * inv(a); }

inline HyperDual sin(const HyperDual& a) {
    const double s = std::sin(a.f), c = std::cos(a.f);
    return lift_unary(a, s, c, -s);
}

inline HyperDual cos(const HyperDual& a) {
    const double s = std::sin(a.f), c = std::cos(a.f);
    return lift_unary(a, c, -s, -c);
}

inline HyperDual exp(const HyperDual& a) {
    const double e = std::exp(a.f);
    return lift_unary(a, e, e, e);
}

inline HyperDual log(const HyperDual& a) {
    if (a.f <= 0.0) throw DomainError("log of nonpositive value");
    const double w = 1.0 / a.f;
    return lift_unary(a, std::log(a.f), w, -w * w);
}

inline HyperDual sqrt(const HyperDual& a) {
    if (a.f < 0.0) throw DomainError("sqrt of negative value");
    const double r = std::sqrt(a.f);
    const double g1 = 0.5 / r;
    return lift_unary(a, r, g1, -0.5 * g1 / a.f);
}

inline HyperDual atan(const HyperDual& a) {
    const double w = 1.0 / (1.0 + a.f * a.f);
    return lift_unary(a, std::atan(a.f), w, -2.0 * a.f * w * w);
}

// atan2(y, x) with full second-order propagation in both arguments.
inline HyperDual atan2(const HyperDual& y, const HyperDual& x) {
    const double r2 = x.f * x.f + y.f * y.f;
    if (r2 == 0.0) throw DomainError("atan2 at the origin");
    const double gy = x.f / r2;
    const double gx = -y.f / r2;
    const double r4 = r2 * r2;
    const double gyy = -2.0 * x.f * y.f / r4;
    const double gyx = (y.f * y.f - x.f * x.f) / r4;
    const double gxx = 2.0 * x.f * y.f / r4;
    return {std::atan2(y.f, x.f),
            gy * y.du + gx * x.du,
            gy * y.dv + gx * x.dv,
            gy * y.duv + gx * x.duv + gyy * y.du * y.dv +
                gyx * (y.du * x.dv + y.dv * x.du) + gxx * x.du * x.dv};
}

// Integer powers work at any base; repeated squaring keeps them exact-ish for
// the small exponents fixtures use.
inline HyperDual pow(const HyperDual& a, long long n) {
    if (n == 0) return HyperDual(1.0);
    if (n < 0) return inv(pow(a, -n));
    HyperDual acc(1.0);
    HyperDual base = a;
    long long e = n;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

inline HyperDual pow(const HyperDual& a, double p) {
    const double rounded = std::nearbyint(p);
    if (rounded == p && std::abs(p) < 64.0) return pow(a, static_cast<long long>(rounded));
    if (a.f <= 0.0) throw DomainError("pow of nonpositive base with non-integer exponent");
    const double g = std::pow(a.f, p);
    const double g1 = p * std::pow(a.f, p - 1.0);
    const double g2 = p * (p - 1.0) * std::pow(a.f, p - 2.0);
    return lift_unary(a, g, g1, g2);
}

inline HyperDual pow(const HyperDual& a, const HyperDual& b) {
    if (b.du == 0.0 && b.dv == 0.0 && b.duv == 0.0) return pow(a, b.f);
    return exp(b * log(a));
}

using HDVector = std::vector<HyperDual>;

// Seed a vector argument for a (value, u-direction, v-direction) evaluation.
inline HDVector seed_vector(const Vec& y, const Vec& u, const Vec& v) {
    HDVector out(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i)
        out[static_cast<std::size_t>(i)] = HyperDual::seeded(y[i], u[i], v[i]);
    return out;
}

}  // namespace t2m
