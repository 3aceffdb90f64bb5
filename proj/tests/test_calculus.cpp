#include <doctest.h>

#include <cmath>
#include <random>

#include "t2m/expr.hpp"
#include "t2m/map2.hpp"

#include "helpers.hpp"

using namespace t2m;
using namespace t2m::testutil;

namespace {

// sigma(y) = (y1^2, y1 y2)
Map2 square_mix() {
    return Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{y[0] * y[0], y[0] * y[1]};
    });
}

}  // namespace

TEST_CASE("point evaluation carries value and both derivative actions") {
    // Hand derivatives of (y1^2, y1 y2) at y = (1, 2):
    //   J = [[2, 0], [2, 1]],  d2(u, v) = (2 u1 v1, u1 v2 + u2 v1).
    Map2 sigma = square_mix();
    Vec y = vec2(1, 2), u = vec2(1, 0), v = vec2(0, 1);
    EvalTriple t = eval_map2(sigma, y, u, v);
    CHECK(sup(Vec(t.value - vec2(1, 2))) == 0.0);
    CHECK(sup(Vec(t.du - vec2(2, 2))) == 0.0);
    CHECK(sup(Vec(t.d2uv - vec2(0, 1))) == 0.0);

    Mat j = sigma.jacobian(y);
    Mat want(2, 2);
    want << 2, 0, 2, 1;
    CHECK(sup(Mat(j - want)) == 0.0);
}

TEST_CASE("second derivative action is symmetric in its two slots") {
    Map2 sigma = cart_to_polar();
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        Vec y = vec2(1, 0) + rand_vec(rng, 2, 0.4);
        Vec u = rand_vec(rng, 2), v = rand_vec(rng, 2);
        Map2::PointEval e = sigma.at(y);
        CHECK(sup(Vec(e.second(u, v) - e.second(v, u))) <= 1e-14);
    }
}

TEST_CASE("composition satisfies the order-2 chain rule") {
    // outer(x) = x1^2 + x2 over inner(y) = (y1 y2, y1 + y2) composes to
    // h(y) = (y1 y2)^2 + y1 + y2; at y = (1, 2), u = (1, 0), v = (0, 1):
    //   h = 7,  grad h = (9, 5),  Hess h = [[8, 8], [8, 2]].
    Map2 inner = Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{y[0] * y[1], y[0] + y[1]};
    });
    Map2 outer = Map2::analytic(2, 1, [](const HDVector& x) {
        return HDVector{x[0] * x[0] + x[1]};
    });
    Map2 comp = compose_map2(outer, inner);
    CHECK(comp.domain_dim() == 2);
    CHECK(comp.codomain_dim() == 1);

    EvalTriple t = eval_map2(comp, vec2(1, 2), vec2(1, 0), vec2(0, 1));
    CHECK(t.value[0] == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(t.du[0] == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(t.d2uv[0] == doctest::Approx(8.0).epsilon(1e-14));

    // Same composite written directly; dual propagation of both must agree.
    Map2 direct = Map2::analytic(2, 1, [](const HDVector& y) {
        return HDVector{y[0] * y[1] * y[0] * y[1] + y[0] + y[1]};
    });
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        Vec y = rand_vec(rng, 2), u = rand_vec(rng, 2), v = rand_vec(rng, 2);
        EvalTriple a = eval_map2(comp, y, u, v);
        EvalTriple b = eval_map2(direct, y, u, v);
        CHECK(sup(Vec(a.value - b.value)) <= 1e-12);
        CHECK(sup(Vec(a.du - b.du)) <= 1e-12);
        CHECK(sup(Vec(a.d2uv - b.d2uv)) <= 1e-12);
    }
}

TEST_CASE("composition restricts the domain to inner preimages") {
    Map2 inner = Map2::identity(2);
    Map2 outer = cart_to_polar();
    Map2 comp = compose_map2(outer, inner);
    CHECK(comp.in_domain(vec2(1, 0)));
    CHECK_FALSE(comp.in_domain(vec2(0, 0)));
    CHECK_THROWS_AS(comp.at(vec2(0, 0)), DomainError);
}

TEST_CASE("composition rejects dimension mismatches") {
    CHECK_THROWS_AS(compose_map2(Map2::identity(3), Map2::identity(2)), ShapeError);
}

TEST_CASE("finite differences confirm analytic derivatives") {
    Map2 sigma = Map2::analytic(2, 2, [](const HDVector& y) {
        return HDVector{sin(y[0]) * exp(y[1]), cos(y[0] * y[1])};
    });
    DerivativeCheckReport rep = fd_check(sigma, vec2(0.3, -0.2), 1e-4, 8);
    CHECK(rep.samples == 8);
    CHECK(rep.max_rel_error_first < 1e-6);
    CHECK(rep.max_rel_error_second < 1e-6);
}

TEST_CASE("finite-difference error shrinks quadratically with the step") {
    // Central differences carry an O(step^2) truncation term; on a map with
    // nonvanishing higher derivatives, halving the step should shrink the
    // error by roughly four while truncation dominates rounding.
    Map2 sigma = Map2::analytic(1, 1, [](const HDVector& y) { return HDVector{sin(y[0])}; });
    Vec y(1);
    y << 0.7;
    double coarse = fd_check(sigma, y, 2e-3, 4, 9).max_rel_error_first;
    double fine = fd_check(sigma, y, 1e-3, 4, 9).max_rel_error_first;
    CHECK(coarse > 1e-10);  // truncation visible
    CHECK(coarse / fine > 2.5);
    CHECK(coarse / fine < 6.0);
}

TEST_CASE("fd_check rejects nonpositive steps") {
    CHECK_THROWS_AS(fd_check(Map2::identity(2), vec2(0, 0), 0.0, 4), ParameterError);
    CHECK_THROWS_AS(fd_check(Map2::identity(2), vec2(0, 0), 1e-4, 0), ParameterError);
}

TEST_CASE("linear and affine maps have constant derivatives") {
    Mat a(2, 2);
    a << 1, 2, 3, 4;
    Vec b = vec2(-1, 5);
    Map2 lin = Map2::linear(a);
    Map2 aff = Map2::affine(a, b);
    Vec y = vec2(2, -3), u = vec2(1, 1), v = vec2(0, 2);
    CHECK(sup(Vec(lin.value(y) - a * y)) == 0.0);
    CHECK(sup(Vec(aff.value(y) - (a * y + b))) == 0.0);
    EvalTriple t = eval_map2(aff, y, u, v);
    CHECK(sup(Vec(t.du - a * u)) == 0.0);
    CHECK(sup(t.d2uv) == 0.0);

    Map2 c = Map2::constant(2, vec2(7, 7));
    EvalTriple tc = eval_map2(c, y, u, v);
    CHECK(sup(Vec(tc.value - vec2(7, 7))) == 0.0);
    CHECK(sup(tc.du) == 0.0);
    CHECK(sup(tc.d2uv) == 0.0);
}

TEST_CASE("shape mismatches are rejected up front") {
    Map2 sigma = square_mix();
    Vec y3(3);
    y3 << 1, 2, 3;
    CHECK_THROWS_AS(sigma.at(y3), ShapeError);
    Map2::PointEval e = sigma.at(vec2(1, 2));
    CHECK_THROWS_AS(e.first(y3), ShapeError);
    CHECK_THROWS_AS(e.second(vec2(1, 0), y3), ShapeError);
}

TEST_CASE("predicates combine and carry labels") {
    Predicate ball = Predicate::ball(vec2(0, 0), 1.0);
    Predicate box = Predicate::box(vec2(0, -1), vec2(2, 1));
    CHECK(ball(vec2(0.5, 0)));
    CHECK_FALSE(ball(vec2(1, 0)));  // open ball
    CHECK((ball && box)(vec2(0.5, 0)));
    CHECK_FALSE((ball && box)(vec2(-0.5, 0)));
    CHECK((ball || box)(vec2(1.5, 0)));
    CHECK((!ball)(vec2(2, 0)));
    CHECK(Predicate::all()(vec2(100, 100)));
    CHECK(ball.label().find("ball") != std::string::npos);
}

TEST_CASE("dual scalars propagate second-order products exactly") {
    // For a(t) and b(t) seeded along directions u and v, the mixed slot of
    // a * b must be a_uv b + a_u b_v + a_v b_u + a b_uv.
    HyperDual a(2.0, 3.0, -1.0, 0.5);
    HyperDual b(-1.0, 0.5, 2.0, 4.0);
    HyperDual p = a * b;
    CHECK(p.f == -2.0);
    CHECK(p.du == 3.0 * -1.0 + 2.0 * 0.5);
    CHECK(p.dv == -1.0 * -1.0 + 2.0 * 2.0);
    CHECK(p.duv == 0.5 * -1.0 + 3.0 * 2.0 + -1.0 * 0.5 + 2.0 * 4.0);

    HyperDual q = a / b;
    HyperDual back = q * b;
    CHECK(back.f == doctest::Approx(a.f).epsilon(1e-15));
    CHECK(back.du == doctest::Approx(a.du).epsilon(1e-15));
    CHECK(back.dv == doctest::Approx(a.dv).epsilon(1e-15));
    CHECK(back.duv == doctest::Approx(a.duv).epsilon(1e-15));
}

TEST_CASE("expression grammar: constants, functions, precedence") {
    Vec one1(1);
    one1 << 2.0;
    CHECK(Expr::parse("pi", 0).eval(Vec(0)) == doctest::Approx(M_PI).epsilon(1e-16));
    CHECK(Expr::parse("-y1^2", 1).eval(one1) == -4.0);   // unary minus after ^
    CHECK(Expr::parse("2^3^2", 1).eval(one1) == 512.0);  // ^ right-associative
    CHECK(Expr::parse("2*3 + 4/8", 1).eval(one1) == 6.5);

    Vec y = vec2(1, 1);
    CHECK(Expr::parse("atan2(y2, y1)", 2).eval(y) == doctest::Approx(M_PI / 4).epsilon(1e-16));
    CHECK(Expr::parse("sqrt(y1^2 + y2^2)", 2).eval(y) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(Expr::parse("log(exp(y1))", 2).eval(y) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Expr::parse("atan(1) * 4", 2).eval(y) == doctest::Approx(M_PI).epsilon(1e-15));
}

TEST_CASE("expression errors carry line and column") {
    auto message_of = [](const char* text, int nvars) {
        try {
            Expr::parse(text, nvars);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of("y1 +", 2).find("line 1, column 5") != std::string::npos);
    CHECK(message_of("sin(y3)", 2).find("variable 'y3' outside y1..y2") != std::string::npos);
    CHECK(message_of("y1 y2", 2).find("unexpected trailing input") != std::string::npos);
    CHECK(message_of("(y1", 2).find("expected ')'") != std::string::npos);
    CHECK_THROWS_AS(Expr::parse("", 2).eval(vec2(0, 0)), Error);
}

TEST_CASE("expression maps differentiate through the parsed tree") {
    Map2 sigma = expr_map({"y1^2", "y1*y2"}, 2);
    EvalTriple t = eval_map2(sigma, vec2(1, 2), vec2(1, 0), vec2(0, 1));
    CHECK(sup(Vec(t.value - vec2(1, 2))) == 0.0);
    CHECK(sup(Vec(t.du - vec2(2, 2))) == 0.0);
    CHECK(sup(Vec(t.d2uv - vec2(0, 1))) == 0.0);

    DerivativeCheckReport rep =
        fd_check(expr_map({"sin(y1)*exp(y2)", "atan2(y2, y1)"}, 2), vec2(1.0, 0.3), 1e-4, 6);
    CHECK(rep.max_rel_error_first < 1e-6);
    CHECK(rep.max_rel_error_second < 1e-6);
}
