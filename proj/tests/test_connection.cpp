#include <doctest.h>

#include <cmath>
#include <random>

#include "t2m/connection.hpp"

#include "helpers.hpp"

using namespace t2m;
using namespace t2m::testutil;

TEST_CASE("christoffel fields evaluate through their coefficient matrices") {
    // G1 = [[1,2],[0,1]], G2 = [[0,1],[1,0]]; u = (1,2), v = (2,1):
    //   u' G1 v = 6,  u' G2 v = 5.
    ChristoffelField gamma = constant_gamma();
    Vec y = vec2(0.5, -1), u = vec2(1, 2), v = vec2(2, 1);
    Vec g = gamma.apply(y, u, v);
    CHECK(g[0] == 6.0);
    CHECK(g[1] == 5.0);
    CHECK(gamma.dim() == 2);
    CHECK(gamma.chart_id() == "cart");
    CHECK_FALSE(gamma.empty());
    CHECK(ChristoffelField().empty());

    std::vector<Mat> mats = gamma.matrices(y);
    CHECK(mats.size() == 2);
    CHECK(mats[0](0, 1) == 2.0);

    Vec bad(3);
    bad << 1, 2, 3;
    CHECK_THROWS_AS(gamma.apply(y, bad, v), ShapeError);
    CHECK_THROWS_AS(gamma.matrices(bad), ShapeError);
}

TEST_CASE("christoffel application is bilinear in the two directions") {
    ChristoffelField gamma = polar_flat_gamma();
    std::mt19937_64 rng(23);
    for (int k = 0; k < 15; ++k) {
        Vec y = vec2(1.5, 0.2) + rand_vec(rng, 2, 0.4);
        Vec u = rand_vec(rng, 2), v = rand_vec(rng, 2), s = rand_vec(rng, 2);
        double a = std::uniform_real_distribution<double>(-2, 2)(rng);
        CHECK(sup(Vec(gamma.apply(y, Vec(u + a * s), v) - gamma.apply(y, u, v) -
                      a * gamma.apply(y, s, v))) <= 1e-12);
        CHECK(sup(Vec(gamma.apply(y, u, Vec(v + a * s)) - gamma.apply(y, u, v) -
                      a * gamma.apply(y, u, s))) <= 1e-12);
    }
}

TEST_CASE("the local connection map adds the christoffel correction") {
    // w + Gamma(u)(v) = (-3,-5) + (6,5) = (3,0).
    ChristoffelField gamma = constant_gamma();
    Vec y = vec2(0.5, -1);
    auto [py, pw] = vilms_local(gamma, y, vec2(1, 2), vec2(2, 1), vec2(-3, -5));
    CHECK(sup(Vec(py - y)) == 0.0);
    CHECK(pw[0] == 3.0);
    CHECK(pw[1] == 0.0);

    LocalConnectionMap local{gamma};
    auto [qy, qw] = local(y, vec2(1, 2), vec2(2, 1), vec2(-3, -5));
    CHECK(sup(Vec(qy - py)) == 0.0);
    CHECK(sup(Vec(qw - pw)) == 0.0);
}

TEST_CASE("pushing the flat field into polar coordinates gives the classical symbols") {
    // The plane's zero field seen in polar coordinates:
    //   Gamma^r_tt = -r, Gamma^t_rt = Gamma^t_tr = 1/r, all else zero.
    ChristoffelField zero = ChristoffelField::zero("cart", 2);
    ChristoffelField pushed =
        pushforward_christoffel(zero, cart_to_polar(), polar_to_cart(), "polar");
    CHECK(pushed.chart_id() == "polar");

    ChristoffelField oracle = polar_flat_gamma();
    for (Vec y : {vec2(2, 0.7), vec2(1, 0), vec2(0.5, -1.2)}) {
        std::vector<Mat> got = pushed.matrices(y);
        std::vector<Mat> want = oracle.matrices(y);
        CHECK(sup(Mat(got[0] - want[0])) <= 1e-10);
        CHECK(sup(Mat(got[1] - want[1])) <= 1e-10);
    }
}

TEST_CASE("pushforward output satisfies the compatibility law by construction") {
    ChristoffelField zero = ChristoffelField::zero("cart", 2);
    Map2 to_polar = cart_to_polar(), to_cart = polar_to_cart();
    ChristoffelField pushed = pushforward_christoffel(zero, to_polar, to_cart, "polar");
    std::mt19937_64 rng(31);
    for (int k = 0; k < 20; ++k) {
        // Points in cart coordinates, residual of the polar<-cart change.
        Vec y = vec2(1.5, 0.5) + rand_vec(rng, 2, 0.6);
        Vec u = rand_vec(rng, 2), v = rand_vec(rng, 2);
        CHECK(sup(compat_residual(pushed, zero, to_polar, y, u, v)) <= 1e-10);
    }
}

TEST_CASE("the compatibility residual detects a corrupted field") {
    ChristoffelField zero = ChristoffelField::zero("cart", 2);
    ChristoffelField off("polar", 2, [](const Vec& y) {
        Mat gr = Mat::Zero(2, 2), gt = Mat::Zero(2, 2);
        gr(1, 1) = -y[0] + 0.1;  // wrong by 0.1
        gt(0, 1) = gt(1, 0) = 1.0 / y[0];
        return std::vector<Mat>{gr, gt};
    });
    Vec y = vec2(2, 0), u = vec2(0, 2), v = vec2(0, 2);  // cart point on the axis
    double r = sup(compat_residual(off, zero, cart_to_polar(), y, u, v));
    CHECK(r > 0.05);
    CHECK(sup(compat_residual(polar_flat_gamma(), zero, cart_to_polar(), y, u, v)) <= 1e-12);
}

TEST_CASE("pushforward through a singular map is rejected at the bad point") {
    // forward = (y1^2, y2) folds at y1 = 0, where its differential drops rank.
    Map2 fold = Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{y[0] * y[0], y[1]};
    });
    Map2 unfold = Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{sqrt(y[0]), y[1]};
    });
    ChristoffelField pushed =
        pushforward_christoffel(ChristoffelField::zero("a", 2), fold, unfold, "b");
    CHECK_THROWS_AS(pushed.matrices(vec2(0, 1)), SingularError);
    CHECK(sup(pushed.apply(vec2(1, 1), vec2(1, 0), vec2(1, 0))) < 10.0);  // fine away from 0
}

TEST_CASE("a constant metric has vanishing connection coefficients") {
    MetricFn euclid = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    std::vector<Mat> mats = metric_to_christoffel(euclid, vec2(0.3, -0.8));
    CHECK(sup(mats[0]) <= 1e-12);
    CHECK(sup(mats[1]) <= 1e-12);
}

TEST_CASE("the polar metric reproduces the classical flat-plane symbols") {
    // g = diag(1, r^2) pulled back from the Euclidean plane.
    MetricFn polar_metric = [](const Vec& y) {
        Mat g = Mat::Identity(2, 2);
        g(1, 1) = y[0] * y[0];
        return g;
    };
    ChristoffelField lc = levi_civita_field("polar", 2, polar_metric);
    ChristoffelField oracle = polar_flat_gamma();
    for (Vec y : {vec2(2, 0.7), vec2(1.3, -0.4)}) {
        std::vector<Mat> got = lc.matrices(y);
        std::vector<Mat> want = oracle.matrices(y);
        CHECK(sup(Mat(got[0] - want[0])) <= 1e-8);
        CHECK(sup(Mat(got[1] - want[1])) <= 1e-8);
    }
}

TEST_CASE("a conformal round metric matches its closed-form coefficients") {
    // g = 4 / (1 + |y|^2)^2 I has
    //   G1 = (-2/S) [[y1, y2], [y2, -y1]],  G2 = (-2/S) [[-y2, y1], [y1, y2]].
    MetricFn round = [](const Vec& y) {
        double s = 1.0 + y.squaredNorm();
        return Mat(4.0 / (s * s) * Mat::Identity(2, 2));
    };
    auto closed = [](const Vec& y) {
        double s = 1.0 + y.squaredNorm();
        Mat g1(2, 2), g2(2, 2);
        g1 << y[0], y[1], y[1], -y[0];
        g2 << -y[1], y[0], y[0], y[1];
        return std::vector<Mat>{Mat(-2.0 / s * g1), Mat(-2.0 / s * g2)};
    };
    ChristoffelField lc = levi_civita_field("n", 2, round);
    for (Vec y : {vec2(0.3, -0.5), vec2(1.1, 0.2), vec2(0, 0)}) {
        std::vector<Mat> got = lc.matrices(y);
        std::vector<Mat> want = closed(y);
        CHECK(sup(Mat(got[0] - want[0])) <= 1e-8);
        CHECK(sup(Mat(got[1] - want[1])) <= 1e-8);
    }
}

TEST_CASE("metric validation rejects bad inputs") {
    MetricFn euclid = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    CHECK_THROWS_AS(metric_to_christoffel(euclid, vec2(0, 0), 0.0), ParameterError);
    MetricFn degenerate = [](const Vec&) { return Mat(Mat::Zero(2, 2)); };
    CHECK_THROWS_AS(metric_to_christoffel(degenerate, vec2(0, 0)), SingularError);
    MetricFn wrong_shape = [](const Vec&) { return Mat(Mat::Identity(3, 3)); };
    CHECK_THROWS_AS(metric_to_christoffel(wrong_shape, vec2(0, 0)), ShapeError);
}
