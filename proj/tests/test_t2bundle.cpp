#include <doctest.h>

#include <cmath>
#include <random>

#include "t2m/t2bundle.hpp"

#include "helpers.hpp"

using namespace t2m;
using namespace t2m::testutil;

namespace {

Jet2 jet(std::string chart, Vec y, Vec u, Vec w) {
    return Jet2{std::move(chart), std::move(y), std::move(u), std::move(w)};
}

// cart / polar / scaled (cart doubled by a linear map), all mutually related.
Atlas three_charts() {
    Atlas atlas(2);
    Predicate slit([](const Vec& y) { return y[0] > 0.0 || std::abs(y[1]) > 0.0; }, "slit");
    Predicate wedge([](const Vec& y) { return y[0] > 0.0 && std::abs(y[1]) < M_PI; }, "wedge");
    Predicate slit2([](const Vec& y) { return y[0] > 0.0 || std::abs(y[1]) > 0.0; }, "slit2");
    atlas.add_chart({"cart", 2, slit});
    atlas.add_chart({"polar", 2, wedge});
    atlas.add_chart({"scaled", 2, slit2});

    Mat two = 2.0 * Mat::Identity(2, 2), half = 0.5 * Mat::Identity(2, 2);
    std::vector<Vec> pts = {vec2(1, 0.2), vec2(2, -0.5), vec2(0.8, 0.8)};
    std::vector<Vec> polar_pts = {vec2(1, 0.3), vec2(1.5, -0.9)};
    atlas.add_transition("polar", "cart", cart_to_polar(), pts);
    atlas.add_transition("cart", "polar", polar_to_cart(), polar_pts);
    atlas.add_transition("scaled", "cart", Map2::linear(two), pts);
    atlas.add_transition("cart", "scaled", Map2::linear(half), {vec2(2, 0.4)});
    atlas.add_transition("polar", "scaled", compose_map2(cart_to_polar(), Map2::linear(half)),
                         {vec2(2, 0.4), vec2(3, 1)});
    atlas.add_transition("scaled", "polar", compose_map2(Map2::linear(two), polar_to_cart()),
                         polar_pts);
    return atlas;
}

Trivialization cart_triv() { return Trivialization(ChristoffelField::zero("cart", 2)); }
Trivialization polar_triv() { return Trivialization(polar_flat_gamma()); }
Trivialization scaled_triv() { return Trivialization(ChristoffelField::zero("scaled", 2)); }

}  // namespace

TEST_CASE("straightening adds the quadratic christoffel term") {
    // v = w + Gamma(u)(u) = (-8,-4) + (9,4) = (1,0) for the hand-picked field.
    Trivialization triv(constant_gamma());
    FiberPoint p = trivialize(triv, jet("cart", vec2(0.5, -1), vec2(1, 2), vec2(-8, -4)));
    CHECK(p.chart_id == "cart");
    CHECK(sup(Vec(p.u - vec2(1, 2))) == 0.0);
    CHECK(p.v[0] == 1.0);
    CHECK(p.v[1] == 0.0);

    CHECK_THROWS_AS(trivialize(triv, jet("polar", vec2(1, 0), vec2(1, 0), vec2(0, 0))),
                    ChartError);
    CHECK_THROWS_AS(untrivialize(triv, FiberPoint{"polar", vec2(1, 0), vec2(1, 0), vec2(0, 0)}),
                    ChartError);
}

TEST_CASE("straightening and its inverse cancel on random jets") {
    std::mt19937_64 rng(41);
    for (Trivialization triv : {Trivialization(constant_gamma("polar")), polar_triv()}) {
        for (int k = 0; k < 50; ++k) {
            Vec y = vec2(1.5, 0.1) + rand_vec(rng, 2, 0.4);
            Jet2 start = jet("polar", y, rand_vec(rng, 2), rand_vec(rng, 2));
            Jet2 back = untrivialize(triv, trivialize(triv, start));
            CHECK(jets_equal(start, back, 1e-12));

            FiberPoint p{"polar", y, rand_vec(rng, 2), rand_vec(rng, 2)};
            FiberPoint q = trivialize(triv, untrivialize(triv, p));
            CHECK(sup(Vec(q.u - p.u)) <= 1e-12);
            CHECK(sup(Vec(q.v - p.v)) <= 1e-12);
        }
    }
}

TEST_CASE("the inverse fiber chart is realized by an actual curve") {
    Trivialization triv = polar_triv();
    FiberPoint p{"polar", vec2(2, 0.3), vec2(0.5, -1), vec2(1, 2)};
    Curve2 curve = untrivialize_curve(triv, p);
    Jet2 j = untrivialize(triv, p);
    CHECK(sup(Vec(curve.value() - j.y)) == 0.0);
    CHECK(sup(Vec(curve.velocity() - j.u)) == 0.0);
    CHECK(sup(Vec(curve.acceleration() - j.w)) == 0.0);

    // Second difference of the path reproduces the acceleration.
    double h = 1e-4;
    Vec fd = (curve.sample(h) - 2.0 * curve.sample(0.0) + curve.sample(-h)) / (h * h);
    CHECK(sup(Vec(fd - j.w)) <= 1e-6);
}

TEST_CASE("fiber maps expose adapted coordinates and invert exactly") {
    Trivialization triv(constant_gamma());
    FiberChartMaps maps = fiber_maps(triv);
    Jet2 j = jet("cart", vec2(0.5, -1), vec2(1, 2), vec2(-8, -4));
    CHECK(sup(Vec(maps.phi1(j) - j.u)) == 0.0);  // slot one is the velocity
    CHECK(maps.phi2(j)[0] == 1.0);
    CHECK(maps.phi2(j)[1] == 0.0);
    Jet2 back = maps.inverse(j.y, maps.phi1(j), maps.phi2(j));
    CHECK(jets_equal(j, back, 1e-14));
}

TEST_CASE("fiber transitions are the doubled base tangent map") {
    Map2 sigma = polar_to_cart();
    TransitionOperator t = transition_function(cart_triv(), polar_triv(), sigma, vec2(2, 0.3));
    CHECK(t.target_chart() == "cart");
    CHECK(t.source_chart() == "polar");
    CHECK(sup(Vec(t.target_point() - sigma.value(vec2(2, 0.3)))) <= 1e-14);

    Mat dsigma = sigma.jacobian(vec2(2, 0.3));
    CHECK(sup(Mat(t.block(0, 0) - dsigma)) <= 1e-10);
    CHECK(sup(Mat(t.block(1, 1) - dsigma)) <= 1e-10);
    CHECK(sup(t.block(0, 1)) <= 1e-10);
    CHECK(sup(t.block(1, 0)) <= 1e-10);

    // Applying the operator equals straighten -> jet chart change -> restraighten.
    std::mt19937_64 rng(47);
    for (int k = 0; k < 10; ++k) {
        FiberPoint p{"polar", vec2(2, 0.3), rand_vec(rng, 2), rand_vec(rng, 2)};
        FiberPoint via = trivialize(
            cart_triv(), change_jet_chart(untrivialize(polar_triv(), p), sigma, "cart"));
        FiberPoint got = t.apply(p);
        CHECK(sup(Vec(got.u - via.u)) <= 1e-10);
        CHECK(sup(Vec(got.v - via.v)) <= 1e-10);

        auto [tu, tv] = t.apply(p.u, p.v);
        CHECK(sup(Vec(tu - got.u)) == 0.0);
        CHECK(sup(Vec(tv - got.v)) == 0.0);
    }

    // Linearity of the fiber action.
    FiberPoint a{"polar", vec2(2, 0.3), vec2(1, 0), vec2(0, 1)};
    FiberPoint b{"polar", vec2(2, 0.3), vec2(0, 2), vec2(3, 0)};
    auto [au, av] = t.apply(a.u, a.v);
    auto [bu, bv] = t.apply(b.u, b.v);
    auto [su, sv] = t.apply(Vec(a.u + b.u), Vec(a.v + b.v));
    CHECK(sup(Vec(su - au - bu)) <= 1e-12);
    CHECK(sup(Vec(sv - av - bv)) <= 1e-12);
}

TEST_CASE("incompatible christoffel fields are refused with the worst residual") {
    ChristoffelField off("polar", 2, [](const Vec& y) {
        Mat gr = Mat::Zero(2, 2), gt = Mat::Zero(2, 2);
        gr(1, 1) = -y[0] + 0.5;
        gt(0, 1) = gt(1, 0) = 1.0 / y[0];
        return std::vector<Mat>{gr, gt};
    });
    try {
        transition_function(cart_triv(), Trivialization(off), polar_to_cart(), vec2(2, 0.3));
        FAIL("incompatible fields must not produce a transition operator");
    } catch (const IncompatibilityError& e) {
        CHECK(e.worst_residual > 1e-2);
        CHECK(std::string(e.what()).find("polar") != std::string::npos);
    }
    CHECK_THROWS_AS(transition_function(cart_triv(), polar_triv(), polar_to_cart(),
                                        vec2(2, 0.3), -1.0),
                    ParameterError);
}

TEST_CASE("transition operators satisfy the cocycle identity on triples") {
    Atlas atlas = three_charts();
    Trivialization ta = cart_triv(), tb = polar_triv(), tc = scaled_triv();
    for (Vec x : {vec2(2, 0.4), vec2(3, 1)}) {  // scaled-chart coordinates
        CHECK(cocycle_residual(atlas, ta, tb, tc, x) <= 1e-10);
    }
    // A corrupted middle leg breaks the identity loudly.
    ChristoffelField off("polar", 2, [](const Vec& y) {
        Mat gr = Mat::Zero(2, 2), gt = Mat::Zero(2, 2);
        gr(1, 1) = -y[0] + 0.5;
        gt(0, 1) = gt(1, 0) = 1.0 / y[0];
        return std::vector<Mat>{gr, gt};
    });
    CHECK(cocycle_residual(atlas, ta, Trivialization(off), tc, vec2(2, 0.4)) > 1e-3);
}

TEST_CASE("without straightening the raw chart change is not fiberwise additive") {
    // At polar (1, 0) with pure angular velocities the defect is 2 exactly;
    // this is what forces the connection into the fiber charts.
    Map2 sigma = polar_to_cart();
    double defect = raw_fiber_linearity_defect(sigma, vec2(1, 0), vec2(0, 1), vec2(0, 0),
                                               vec2(0, 1), vec2(0, 0));
    CHECK(defect == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(defect > 1e-2);

    // Linear chart changes have no quadratic term and no defect.
    Mat two = 2.0 * Mat::Identity(2, 2);
    CHECK(raw_fiber_linearity_defect(Map2::linear(two), vec2(1, 0), vec2(0, 1), vec2(1, 1),
                                     vec2(2, 0), vec2(0, 3)) <= 1e-15);
}

TEST_CASE("doubled-tangent cocycle check passes for compatible covers") {
    Atlas atlas = three_charts();
    std::map<std::string, FiberChartMaps> covers;
    covers["cart"] = fiber_maps(cart_triv());
    covers["polar"] = fiber_maps(polar_triv());
    covers["scaled"] = fiber_maps(scaled_triv());
    IsoReport rep = tm_tm_isomorphism_check(covers, atlas);
    CHECK(rep.pass);
    CHECK(rep.worst <= 1e-10);
    CHECK(rep.pairs_checked == 6);
    CHECK(rep.points_checked > 0);
    CHECK(rep.violations.empty());

    // Corrupting one cover's acceleration slot shows up as violations.
    FiberChartMaps bad = fiber_maps(polar_triv());
    auto phi2 = bad.phi2;
    bad.phi2 = [phi2](const Jet2& j) { return Vec(1.01 * phi2(j)); };
    auto inv = bad.inverse;
    bad.inverse = [inv](const Vec& y, const Vec& u, const Vec& v) {
        return inv(y, u, Vec(v / 1.01));
    };
    covers["polar"] = bad;
    IsoReport rep2 = tm_tm_isomorphism_check(covers, atlas);
    CHECK_FALSE(rep2.pass);
    CHECK(rep2.worst > 1e-4);
    CHECK_FALSE(rep2.violations.empty());
    CHECK(rep2.violations.front().residual > 0.0);
}

TEST_CASE("christoffel extraction recovers a symmetric field") {
    Atlas atlas = three_charts();
    Trivialization triv = polar_triv();
    ChristoffelField got = extract_christoffel(fiber_maps(triv), atlas, "polar");
    ChristoffelField want = polar_flat_gamma();
    std::mt19937_64 rng(53);
    for (int k = 0; k < 20; ++k) {
        Vec y = vec2(1.5, 0.1) + rand_vec(rng, 2, 0.4);
        std::vector<Mat> a = got.matrices(y);
        std::vector<Mat> b = want.matrices(y);
        CHECK(sup(Mat(a[0] - b[0])) <= 1e-10);
        CHECK(sup(Mat(a[1] - b[1])) <= 1e-10);
    }
}

TEST_CASE("extraction sees only the symmetric part of the field") {
    // G1 = [[0,1],[0,0]] has symmetrization [[0,1/2],[1/2,0]]; the
    // polarization construction cannot distinguish the two.
    Mat g1(2, 2), g2(2, 2);
    g1 << 0, 1, 0, 0;
    g2 << 0, 0, 0, 0;
    ChristoffelField skewed("cart", 2,
                            [g1, g2](const Vec&) { return std::vector<Mat>{g1, g2}; });
    Atlas atlas = three_charts();
    ChristoffelField got =
        extract_christoffel(fiber_maps(Trivialization(skewed)), atlas, "cart");
    std::vector<Mat> mats = got.matrices(vec2(1, 1));
    Mat sym = 0.5 * (g1 + g1.transpose());
    CHECK(sup(Mat(mats[0] - sym)) <= 1e-12);
    CHECK(sup(mats[1]) <= 1e-12);

    Vec u = vec2(1, 0), v = vec2(0, 1);
    CHECK(got.apply(vec2(1, 1), u, v)[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(got.apply(vec2(1, 1), v, u)[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("extraction refuses fiber maps no linear cover can produce") {
    Atlas atlas = three_charts();
    Trivialization triv = cart_triv();
    Vec probe = vec2(1, 1);

    auto extraction_error = [&](const FiberChartMaps& maps) {
        try {
            extract_christoffel(maps, atlas, "cart").matrices(probe);
        } catch (const ExtractionError& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    FiberChartMaps drifted = fiber_maps(triv);
    auto phi1 = drifted.phi1;
    drifted.phi1 = [phi1](const Jet2& j) { return Vec(phi1(j) + 0.01 * j.y); };
    CHECK(extraction_error(drifted).find("slot one") != std::string::npos);

    FiberChartMaps sloped = fiber_maps(triv);
    sloped.phi2 = [](const Jet2& j) { return Vec(1.1 * j.w); };
    CHECK(extraction_error(sloped).find("acceleration plus a velocity term") !=
          std::string::npos);

    FiberChartMaps shifted = fiber_maps(triv);
    shifted.phi2 = [](const Jet2& j) { return Vec(j.w + 0.01 * Vec::Ones(2)); };
    CHECK(extraction_error(shifted).find("vanish on the zero jet") != std::string::npos);

    FiberChartMaps cubic = fiber_maps(triv);
    cubic.phi2 = [](const Jet2& j) {
        Vec out = j.w;
        out[0] += j.u[0] * j.u[0] * j.u[0];
        return out;
    };
    CHECK(extraction_error(cubic).find("not quadratic") != std::string::npos);

    CHECK_THROWS_AS(extract_christoffel(fiber_maps(triv), atlas, "polar"), ChartError);
    CHECK_THROWS_AS(extract_christoffel(fiber_maps(triv), atlas, "cart").matrices(vec2(-1, 0)),
                    DomainError);
    FiberChartMaps incomplete = fiber_maps(triv);
    incomplete.phi2 = nullptr;
    CHECK_THROWS_AS(extract_christoffel(incomplete, atlas, "cart"), ParameterError);
}
