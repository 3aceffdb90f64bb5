#include <doctest.h>

#include <cmath>
#include <random>

#include "t2m/atlas.hpp"

#include "helpers.hpp"

using namespace t2m;
using namespace t2m::testutil;

namespace {

// Atlas of the slit plane with Cartesian and polar charts.
Atlas slit_plane() {
    Atlas atlas(2);
    atlas.add_chart({"cart", 2,
                     Predicate([](const Vec& y) { return y[0] > 0.0 || std::abs(y[1]) > 0.0; },
                               "slit plane")});
    atlas.add_chart({"polar", 2,
                     Predicate([](const Vec& y) { return y[0] > 0.0 && std::abs(y[1]) < M_PI; },
                               "r>0, |theta|<pi")});
    atlas.add_transition("cart", "polar", polar_to_cart(), {vec2(1, 0), vec2(2, M_PI / 3)});
    atlas.add_transition("polar", "cart", cart_to_polar(), {vec2(1, 0), vec2(1, 1)});
    return atlas;
}

Jet2 jet(std::string chart, Vec y, Vec u, Vec w) {
    return Jet2{std::move(chart), std::move(y), std::move(u), std::move(w)};
}

}  // namespace

TEST_CASE("chart bookkeeping and transition lookup") {
    Atlas atlas = slit_plane();
    CHECK(atlas.model_dim() == 2);
    CHECK(atlas.has_chart("polar"));
    CHECK_FALSE(atlas.has_chart("spherical"));
    CHECK(atlas.chart_ids().size() == 2);
    CHECK(atlas.has_transition("cart", "polar"));
    CHECK(atlas.overlap_samples("cart", "polar").size() == 2);
    CHECK(atlas.transition_pairs().size() == 2);

    CHECK_THROWS_AS(atlas.chart("spherical"), ChartError);
    CHECK_THROWS_AS(transition_map(atlas, "cart", "spherical"), ChartError);
    CHECK_THROWS_AS(atlas.overlap_samples("polar", "spherical"), ChartError);

    // to == from falls back to the identity even without a stored map.
    Map2 id = transition_map(atlas, "cart", "cart");
    CHECK(sup(Vec(id.value(vec2(3, 4)) - vec2(3, 4))) == 0.0);
}

TEST_CASE("duplicate charts and mismatched transitions are rejected") {
    Atlas atlas(2);
    atlas.add_chart({"a", 2, Predicate::all()});
    CHECK_THROWS_AS(atlas.add_chart({"a", 2, Predicate::all()}), ChartError);
    CHECK_THROWS_AS(atlas.add_chart({"b", 3, Predicate::all()}), ShapeError);
    CHECK_THROWS_AS(atlas.add_transition("a", "missing", Map2::identity(2)), ChartError);
}

TEST_CASE("jet chart change follows the order-2 transport law") {
    // Polar -> Cartesian by hand.  With sigma = (r cos t, r sin t):
    //   at (1, 0), u = (0, 1), w = 0:       ((1,0), (0,1), (-1,0))
    //   at (2, pi/2), u = (1, 0), w = 0:    ((0,2), (0,1), (0,0))
    //   at (1, 0), u = (1, 1), w = (1, 0):  ((1,0), (1,1), (0,2))
    Map2 sigma = polar_to_cart();
    Jet2 a = change_jet_chart(jet("polar", vec2(1, 0), vec2(0, 1), vec2(0, 0)), sigma, "cart");
    CHECK(a.chart_id == "cart");
    CHECK(sup(Vec(a.y - vec2(1, 0))) <= 1e-15);
    CHECK(sup(Vec(a.u - vec2(0, 1))) <= 1e-15);
    CHECK(sup(Vec(a.w - vec2(-1, 0))) <= 1e-15);

    Jet2 b = change_jet_chart(jet("polar", vec2(2, M_PI / 2), vec2(1, 0), vec2(0, 0)), sigma,
                              "cart");
    CHECK(sup(Vec(b.y - vec2(0, 2))) <= 1e-15);
    CHECK(sup(Vec(b.u - vec2(0, 1))) <= 1e-15);
    CHECK(sup(b.w) <= 1e-15);

    Jet2 c = change_jet_chart(jet("polar", vec2(1, 0), vec2(1, 1), vec2(1, 0)), sigma, "cart");
    CHECK(sup(Vec(c.w - vec2(0, 2))) <= 1e-15);
}

TEST_CASE("jet chart changes round-trip across the atlas") {
    Atlas atlas = slit_plane();
    std::mt19937_64 rng(3);
    for (int k = 0; k < 25; ++k) {
        Vec y = vec2(1.5, 0.3) + rand_vec(rng, 2, 0.5);
        Jet2 start = jet("polar", y, rand_vec(rng, 2), rand_vec(rng, 2));
        Jet2 there = change_jet_chart(atlas, start, "cart");
        Jet2 back = change_jet_chart(atlas, there, "polar");
        CHECK(jets_equal(start, back, 1e-10));
    }
    CHECK_THROWS_AS(jets_equal(jet("polar", vec2(1, 0), vec2(1, 0), vec2(0, 0)),
                               jet("cart", vec2(1, 0), vec2(1, 0), vec2(0, 0)), 1e-10),
                    ChartError);
}

TEST_CASE("changing charts through an intermediate agrees with the direct map") {
    // Three global charts related by polynomial maps; the b<-a and c<-b
    // composites must transport jets exactly like the stored c<-a map.
    Map2 ba = Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{y[0] + y[1] * y[1], y[1]};
    });
    Map2 cb = Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{y[0], y[1] + y[0] * y[0]};
    });
    std::mt19937_64 rng(17);
    for (int k = 0; k < 10; ++k) {
        Jet2 start = jet("a", rand_vec(rng, 2), rand_vec(rng, 2), rand_vec(rng, 2));
        Jet2 via = change_jet_chart(change_jet_chart(start, ba, "b"), cb, "c");
        Jet2 direct = change_jet_chart(start, compose_map2(cb, ba), "c");
        CHECK(jets_equal(via, direct, 1e-12));
    }
}

TEST_CASE("curves expose their 2-jet and reject foreign basepoints") {
    Atlas atlas = slit_plane();
    Curve2 curve = Curve2::polynomial("cart", vec2(1, 2), vec2(3, 4), vec2(5, 6));
    Jet2 j = curve_to_jet(atlas, curve);
    CHECK(j.chart_id == "cart");
    CHECK(sup(Vec(j.y - vec2(1, 2))) == 0.0);
    CHECK(sup(Vec(j.u - vec2(3, 4))) == 0.0);
    CHECK(sup(Vec(j.w - vec2(5, 6))) == 0.0);
    CHECK(curve.has_path());
    CHECK(sup(Vec(curve.sample(2.0) - (vec2(1, 2) + 2.0 * vec2(3, 4) + 2.0 * vec2(5, 6)))) ==
          0.0);

    Curve2 outside = Curve2::polynomial("polar", vec2(-1, 0), vec2(1, 0), vec2(0, 0));
    CHECK_THROWS_AS(curve_to_jet(atlas, outside), DomainError);
    Curve2 foreign = Curve2::polynomial("nowhere", vec2(1, 0), vec2(1, 0), vec2(0, 0));
    CHECK_THROWS_AS(curve_to_jet(atlas, foreign), ChartError);
}

TEST_CASE("the jet of a curve ignores cubic and higher terms") {
    // c(t) = y + t u + (t^2/2) w + t^3 z differs from the polynomial curve of
    // the same jet only at third order; dual propagation kills the tail
    // exactly, so the two jets agree bitwise.
    Vec y = vec2(1, -2), u = vec2(0.5, 3), w = vec2(-1, 4), z = vec2(7, -9);
    Curve2 tail = Curve2::analytic("cart", 2, [&](const HyperDual& t) {
        HDVector out(2);
        for (int i = 0; i < 2; ++i)
            out[i] = y[i] + t * u[i] + t * t * (0.5 * w[i]) + t * t * t * z[i];
        return out;
    });
    CHECK(sup(Vec(tail.value() - y)) == 0.0);
    CHECK(sup(Vec(tail.velocity() - u)) == 0.0);
    CHECK(sup(Vec(tail.acceleration() - w)) == 0.0);

    // The path evaluators do differ away from t = 0.
    Curve2 poly = Curve2::polynomial("cart", y, u, w);
    CHECK(sup(Vec(tail.sample(0.5) - poly.sample(0.5))) > 0.1);
}

TEST_CASE("triple overlap samples are stored per ordered triple") {
    Atlas atlas = slit_plane();
    atlas.add_triple_samples("cart", "polar", "polar", {vec2(1, 0.5)});
    CHECK(atlas.triple_samples().size() == 1);
    CHECK_THROWS_AS(atlas.add_triple_samples("cart", "polar", "missing", {vec2(1, 0)}),
                    ChartError);
}
