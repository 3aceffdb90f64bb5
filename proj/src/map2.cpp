#include "t2m/map2.hpp"

#include <random>

namespace t2m {

Predicate Predicate::ball(Vec center, double radius) {
    auto c = std::make_shared<Vec>(std::move(center));
    return {[c, radius](const Vec& y) { return (y - *c).norm() < radius; },
            "ball(r=" + std::to_string(radius) + ")"};
}

Predicate Predicate::box(Vec lo, Vec hi) {
    auto l = std::make_shared<Vec>(std::move(lo));
    auto h = std::make_shared<Vec>(std::move(hi));
    return {[l, h](const Vec& y) {
                if (y.size() != l->size()) return false;
                for (Eigen::Index i = 0; i < y.size(); ++i)
                    if (!(y[i] > (*l)[i] && y[i] < (*h)[i])) return false;
                return true;
            },
            "box"};
}

Predicate Predicate::operator&&(const Predicate& other) const {
    Predicate a = *this, b = other;
    return {[a, b](const Vec& y) { return a(y) && b(y); },
            "(" + label_ + " and " + other.label_ + ")"};
}

Predicate Predicate::operator||(const Predicate& other) const {
    Predicate a = *this, b = other;
    return {[a, b](const Vec& y) { return a(y) || b(y); },
            "(" + label_ + " or " + other.label_ + ")"};
}

Predicate Predicate::operator!() const {
    Predicate a = *this;
    return {[a](const Vec& y) { return !a(y); }, "not " + label_};
}

namespace {

void require_dim(const Vec& x, int dim, const char* what) {
    if (x.size() != dim)
        throw ShapeError(std::string(what) + " has dimension " + std::to_string(x.size()) +
                         ", expected " + std::to_string(dim));
}

Vec collect(const HDVector& out, double HyperDual::*member) {
    Vec r(static_cast<Eigen::Index>(out.size()));
    for (std::size_t i = 0; i < out.size(); ++i) r[static_cast<Eigen::Index>(i)] = out[i].*member;
    return r;
}

}  // namespace

Map2::PointEval Map2::at(const Vec& y) const {
    require_dim(y, dom_, "point");
    if (!domain_(y))
        throw DomainError("point " + format_point(y) + " outside map domain " + domain_.label());
    return eval_(y);
}

Mat Map2::jacobian(const Vec& y) const {
    PointEval e = at(y);
    Mat j(cod_, dom_);
    for (int c = 0; c < dom_; ++c) {
        Vec basis = Vec::Zero(dom_);
        basis[c] = 1.0;
        j.col(c) = e.first(basis);
    }
    return j;
}

Map2 Map2::analytic(int dom, int cod, HDFunction fn, Predicate domain) {
    if (dom < 1 || cod < 1) throw ParameterError("map dimensions must be positive");
    Map2 m;
    m.dom_ = dom;
    m.cod_ = cod;
    m.domain_ = std::move(domain);
    auto kernel = std::make_shared<HDFunction>(std::move(fn));
    m.eval_ = [kernel, dom, cod](const Vec& y) {
        const Vec zero = Vec::Zero(dom);
        HDVector base = (*kernel)(seed_vector(y, zero, zero));
        if (static_cast<int>(base.size()) != cod)
            throw ShapeError("map produced " + std::to_string(base.size()) +
                             " components, expected " + std::to_string(cod));
        PointEval e;
        e.value = collect(base, &HyperDual::f);
        Vec point = y;
        e.first = [kernel, point, dom](const Vec& u) {
            require_dim(u, dom, "direction");
            const Vec zero = Vec::Zero(dom);
            return collect((*kernel)(seed_vector(point, u, zero)), &HyperDual::du);
        };
        e.second = [kernel, point, dom](const Vec& u, const Vec& v) {
            require_dim(u, dom, "direction");
            require_dim(v, dom, "direction");
            return collect((*kernel)(seed_vector(point, u, v)), &HyperDual::duv);
        };
        return e;
    };
    return m;
}

Map2 Map2::from_parts(int dom, int cod, std::function<Vec(const Vec&)> value,
                      std::function<Vec(const Vec&, const Vec&)> first,
                      std::function<Vec(const Vec&, const Vec&, const Vec&)> second,
                      Predicate domain) {
    if (dom < 1 || cod < 1) throw ParameterError("map dimensions must be positive");
    Map2 m;
    m.dom_ = dom;
    m.cod_ = cod;
    m.domain_ = std::move(domain);
    auto v = std::make_shared<decltype(value)>(std::move(value));
    auto f = std::make_shared<decltype(first)>(std::move(first));
    auto s = std::make_shared<decltype(second)>(std::move(second));
    m.eval_ = [v, f, s, dom](const Vec& y) {
        PointEval e;
        e.value = (*v)(y);
        Vec point = y;
        e.first = [f, point, dom](const Vec& u) {
            require_dim(u, dom, "direction");
            return (*f)(point, u);
        };
        e.second = [s, point, dom](const Vec& u, const Vec& v2) {
            require_dim(u, dom, "direction");
            require_dim(v2, dom, "direction");
            return (*s)(point, u, v2);
        };
        return e;
    };
    return m;
}

Map2 Map2::identity(int dim) {
    return from_parts(
        dim, dim, [](const Vec& y) { return y; }, [](const Vec&, const Vec& u) { return u; },
        [dim](const Vec&, const Vec&, const Vec&) { return Vec(Vec::Zero(dim)); });
}

Map2 Map2::linear(const Mat& a, Predicate domain) {
    const int cod = static_cast<int>(a.rows());
    Mat m = a;
    return from_parts(
        static_cast<int>(a.cols()), cod, [m](const Vec& y) { return Vec(m * y); },
        [m](const Vec&, const Vec& u) { return Vec(m * u); },
        [cod](const Vec&, const Vec&, const Vec&) { return Vec(Vec::Zero(cod)); },
        std::move(domain));
}

Map2 Map2::affine(const Mat& a, const Vec& b, Predicate domain) {
    const int cod = static_cast<int>(a.rows());
    Mat m = a;
    Vec off = b;
    return from_parts(
        static_cast<int>(a.cols()), cod, [m, off](const Vec& y) { return Vec(m * y + off); },
        [m](const Vec&, const Vec& u) { return Vec(m * u); },
        [cod](const Vec&, const Vec&, const Vec&) { return Vec(Vec::Zero(cod)); },
        std::move(domain));
}

Map2 Map2::constant(int dom, const Vec& c) {
    const int cod = static_cast<int>(c.size());
    Vec value = c;
    return from_parts(
        dom, cod, [value](const Vec&) { return value; },
        [cod](const Vec&, const Vec&) { return Vec(Vec::Zero(cod)); },
        [cod](const Vec&, const Vec&, const Vec&) { return Vec(Vec::Zero(cod)); });
}

EvalTriple eval_map2(const Map2& map, const Vec& y, const Vec& u, const Vec& v) {
    Map2::PointEval e = map.at(y);
    return {e.value, e.first(u), e.second(u, v)};
}

Map2 compose_map2(const Map2& outer, const Map2& inner) {
    if (inner.codomain_dim() != outer.domain_dim())
        throw ShapeError("composition mismatch: inner codomain " +
                         std::to_string(inner.codomain_dim()) + " vs outer domain " +
                         std::to_string(outer.domain_dim()));
    auto in = std::make_shared<Map2>(inner);
    auto out = std::make_shared<Map2>(outer);
    Predicate dom(
        [in, out](const Vec& y) {
            if (!in->in_domain(y)) return false;
            return out->in_domain(in->value(y));
        },
        "preimage(" + outer.domain().label() + ")");
    return Map2::from_parts(
        inner.domain_dim(), outer.codomain_dim(),
        [in, out](const Vec& y) { return out->at(in->at(y).value).value; },
        [in, out](const Vec& y, const Vec& u) {
            auto ie = in->at(y);
            return out->at(ie.value).first(ie.first(u));
        },
        [in, out](const Vec& y, const Vec& u, const Vec& v) {
            auto ie = in->at(y);
            auto oe = out->at(ie.value);
            return Vec(oe.second(ie.first(u), ie.first(v)) + oe.first(ie.second(u, v)));
        },
        std::move(dom));
}

DerivativeCheckReport fd_check(const Map2& map, const Vec& y, double step, int samples,
                               std::uint64_t seed) {
    if (step <= 0.0) throw ParameterError("fd_check step must be positive");
    if (samples < 1) throw ParameterError("fd_check needs at least one sample");

    const int dim = map.domain_dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto unit = [&]() {
        Vec d(dim);
        do {
            for (int i = 0; i < dim; ++i) d[i] = gauss(rng);
        } while (d.norm() < 1e-8);
        return Vec(d / d.norm());
    };

    DerivativeCheckReport report;
    report.samples = samples;
    report.seed = seed;
    Map2::PointEval e = map.at(y);

    for (int s = 0; s < samples; ++s) {
        const Vec u = unit();
        const Vec v = unit();

        const Vec fd_first =
            (map.value(y + step * u) - map.value(y - step * u)) / (2.0 * step);
        const Vec fd_second = (map.value(y + step * (u + v)) - map.value(y + step * (u - v)) -
                               map.value(y - step * (u - v)) + map.value(y - step * (u + v))) /
                              (4.0 * step * step);

        const double err1 = (e.first(u) - fd_first).norm() / (1.0 + fd_first.norm());
        const double err2 = (e.second(u, v) - fd_second).norm() / (1.0 + fd_second.norm());
        report.max_rel_error_first = std::max(report.max_rel_error_first, err1);
        report.max_rel_error_second = std::max(report.max_rel_error_second, err2);
    }
    return report;
}

}  // namespace t2m
