#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "t2m/hyperdual.hpp"
#include "t2m/types.hpp"

namespace t2m {

// Membership test for the open subset of model space a map or chart lives on.
class Predicate {
public:
    Predicate() : fn_([](const Vec&) { return true; }), label_("all") {}
    Predicate(std::function<bool(const Vec&)> fn, std::string label)
        : fn_(std::move(fn)), label_(std::move(label)) {}

    bool operator()(const Vec& y) const { return fn_(y); }
    const std::string& label() const { return label_; }

    static Predicate all() { return {}; }
    static Predicate ball(Vec center, double radius);
    static Predicate box(Vec lo, Vec hi);
    Predicate operator&&(const Predicate& other) const;
    Predicate operator||(const Predicate& other) const;
    Predicate operator!() const;

private:
    std::function<bool(const Vec&)> fn_;
    std::string label_;
};

struct EvalTriple {
    Vec value;  // sigma(y)
    Vec du;     // d sigma(y) u
    Vec d2uv;   // d^2 sigma(y)(u, v)
};

// A map between open subsets of model spaces, evaluable to second order.
// The frozen per-point view hands out the value together with the first
// derivative action u -> d sigma(y) u and the symmetric bilinear action
// (u, v) -> d^2 sigma(y)(u, v); nothing larger than a vector is ever
// materialized unless the caller asks for a Jacobian.
class Map2 {
public:
    struct PointEval {
        Vec value;
        std::function<Vec(const Vec&)> first;
        std::function<Vec(const Vec&, const Vec&)> second;
    };

    using HDFunction = std::function<HDVector(const HDVector&)>;

    Map2() = default;

    int domain_dim() const { return dom_; }
    int codomain_dim() const { return cod_; }
    const Predicate& domain() const { return domain_; }
    bool in_domain(const Vec& y) const { return y.size() == dom_ && domain_(y); }

    // Freeze the map at y.  Throws DomainError / ShapeError.
    PointEval at(const Vec& y) const;

    Vec value(const Vec& y) const { return at(y).value; }
    Mat jacobian(const Vec& y) const;

    // Build from a function evaluated on HyperDual scalars; derivatives come
    // out of the propagation, so they are exact for the expression written.
    static Map2 analytic(int dom, int cod, HDFunction fn, Predicate domain = Predicate::all());

    // Build from separately supplied closed-form value/first/second actions.
    static Map2 from_parts(int dom, int cod,
                           std::function<Vec(const Vec&)> value,
                           std::function<Vec(const Vec&, const Vec&)> first,
                           std::function<Vec(const Vec&, const Vec&, const Vec&)> second,
                           Predicate domain = Predicate::all());

    static Map2 identity(int dim);
    static Map2 linear(const Mat& a, Predicate domain = Predicate::all());
    static Map2 affine(const Mat& a, const Vec& b, Predicate domain = Predicate::all());
    static Map2 constant(int dom, const Vec& c);

private:
    int dom_ = 0;
    int cod_ = 0;
    Predicate domain_;
    std::function<PointEval(const Vec&)> eval_;
};

// (sigma(y), d sigma(y) u, d^2 sigma(y)(u, v)) in one call.
EvalTriple eval_map2(const Map2& map, const Vec& y, const Vec& u, const Vec& v);

// Order-2 chain rule:
//   d(tau.sigma)(y)u        = d tau(sigma y)(d sigma(y) u)
//   d^2(tau.sigma)(y)(u,v)  = d^2 tau(sigma y)(d sigma(y)u, d sigma(y)v)
//                             + d tau(sigma y)(d^2 sigma(y)(u,v))
Map2 compose_map2(const Map2& outer, const Map2& inner);

struct DerivativeCheckReport {
    double max_rel_error_first = 0.0;
    double max_rel_error_second = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

// Compare the claimed first/second actions against central finite
// differences on random unit directions.  Errors are relative,
// |claimed - fd| / (1 + |fd|).
DerivativeCheckReport fd_check(const Map2& map, const Vec& y, double step, int samples,
                               std::uint64_t seed = 42);

}  // namespace t2m
