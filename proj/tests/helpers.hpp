#pragma once

#include <cmath>
#include <random>

#include "t2m/connection.hpp"

namespace t2m::testutil {

inline double sup(const Vec& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
inline double sup(const Mat& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

inline Vec vec2(double a, double b) {
    Vec y(2);
    y << a, b;
    return y;
}

inline Vec rand_vec(std::mt19937_64& rng, int dim, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    Vec y(dim);
    for (int i = 0; i < dim; ++i) y[i] = uni(rng);
    return y;
}

// sigma(r, theta) = (r cos theta, r sin theta) on r > 0, |theta| < pi.
inline Map2 polar_to_cart() {
    return Map2::analytic(
        2, 2,
        [](const HDVector& y) {
            return HDVector{y[0] * cos(y[1]), y[0] * sin(y[1])};
        },
        Predicate([](const Vec& y) { return y[0] > 0.0 && std::abs(y[1]) < M_PI; },
                  "r>0, |theta|<pi"));
}

// Inverse on the plane slit along the nonpositive x-axis.
inline Map2 cart_to_polar() {
    return Map2::analytic(
        2, 2,
        [](const HDVector& y) {
            return HDVector{sqrt(y[0] * y[0] + y[1] * y[1]), atan2(y[1], y[0])};
        },
        Predicate([](const Vec& y) { return y[0] > 0.0 || std::abs(y[1]) > 0.0; },
                  "slit plane"));
}

// Christoffel field of the flat plane in polar coordinates:
//   Gamma^r_{theta theta} = -r,   Gamma^theta_{r theta} = Gamma^theta_{theta r} = 1/r.
inline ChristoffelField polar_flat_gamma() {
    return ChristoffelField("polar", 2, [](const Vec& y) {
        Mat gr = Mat::Zero(2, 2), gt = Mat::Zero(2, 2);
        gr(1, 1) = -y[0];
        gt(0, 1) = gt(1, 0) = 1.0 / y[0];
        return std::vector<Mat>{gr, gt};
    });
}

// Constant field with hand-picked coefficient matrices; used wherever a test
// needs Gamma values it can recompute on paper.
//   G1 = [[1, 2], [0, 1]],  G2 = [[0, 1], [1, 0]]
inline ChristoffelField constant_gamma(std::string chart_id = "cart") {
    Mat g1(2, 2), g2(2, 2);
    g1 << 1, 2, 0, 1;
    g2 << 0, 1, 1, 0;
    return ChristoffelField(std::move(chart_id), 2,
                            [g1, g2](const Vec&) { return std::vector<Mat>{g1, g2}; });
}

}  // namespace t2m::testutil
