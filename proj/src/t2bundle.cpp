#include "t2m/t2bundle.hpp"

#include <cmath>

namespace t2m {

namespace {

void require_size(const Vec& x, int dim, const char* what) {
    if (x.size() != dim)
        throw ShapeError(std::string(what) + " has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(dim));
}

double sup(const Vec& x) { return x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0; }

// Deterministic generic vectors for probing, away from any coordinate axis.
Vec generic_u(int dim) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) g[i] = 0.7 + 0.3 * i;
    return g;
}

Vec generic_v(int dim) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) g[i] = (i % 2 ? -1.1 : 0.9) * (1.0 + 0.25 * i);
    return g;
}

// Fiber probe directions on which a quadratic deviation is fully visible:
// the zero vector, both slot bases, pairwise sums in the u slot, and one
// generic pair.
std::vector<std::pair<Vec, Vec>> fiber_probes(int dim) {
    Vec zero = Vec::Zero(dim);
    std::vector<std::pair<Vec, Vec>> probes;
    probes.emplace_back(zero, zero);
    for (int i = 0; i < dim; ++i) probes.emplace_back(Vec(Vec::Unit(dim, i)), zero);
    for (int i = 0; i < dim; ++i) probes.emplace_back(zero, Vec(Vec::Unit(dim, i)));
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            probes.emplace_back(Vec(Vec::Unit(dim, i) + Vec::Unit(dim, j)), zero);
    probes.emplace_back(generic_u(dim), generic_v(dim));
    return probes;
}

Mat jacobian_of(const Map2::PointEval& e, int dim) {
    Mat jac(dim, dim);
    for (int j = 0; j < dim; ++j) jac.col(j) = e.first(Vec(Vec::Unit(dim, j)));
    return jac;
}

// Push one fiber vector through straighten-inverse, jet chart change, and
// straighten, reusing a point evaluation of sigma at the source point.
std::pair<Vec, Vec> push_fiber(const Trivialization& target, const Trivialization& source,
                               const Map2::PointEval& e, const Vec& x, const Vec& u,
                               const Vec& v) {
    Vec w = v - source.christoffel().apply(x, u, u);
    Vec su = e.first(u);
    Vec sw = e.second(u, u) + e.first(w);
    return {su, Vec(sw + target.christoffel().apply(e.value, su, su))};
}

// Matrix of the pushed fiber map on the standard basis of E x E.
Mat push_fiber_basis_matrix(const Trivialization& target, const Trivialization& source,
                            const Map2& sigma, const Vec& x) {
    const int dim = source.dim();
    Map2::PointEval e = sigma.at(x);
    Mat m(2 * dim, 2 * dim);
    for (int k = 0; k < 2 * dim; ++k) {
        Vec col = Vec::Zero(2 * dim);
        col[k] = 1.0;
        auto [su, sv] = push_fiber(target, source, e, x, col.head(dim), col.tail(dim));
        m.col(k).head(dim) = su;
        m.col(k).tail(dim) = sv;
    }
    return m;
}

}  // namespace

Trivialization::Trivialization(ChristoffelField gamma) : gamma_(std::move(gamma)) {
    if (gamma_.empty())
        throw ParameterError("trivialization needs a Christoffel field");
}

TransitionOperator::TransitionOperator(std::string target_chart, std::string source_chart,
                                       Vec source_point, Vec target_point, Mat matrix)
    : target_chart_(std::move(target_chart)),
      source_chart_(std::move(source_chart)),
      source_point_(std::move(source_point)),
      target_point_(std::move(target_point)),
      matrix_(std::move(matrix)) {
    const int dim = static_cast<int>(source_point_.size());
    if (target_point_.size() != dim)
        throw ShapeError("transition operator base points have different dimensions");
    if (matrix_.rows() != 2 * dim || matrix_.cols() != 2 * dim)
        throw ShapeError("transition operator matrix is not " + std::to_string(2 * dim) +
                         "x" + std::to_string(2 * dim));
}

Mat TransitionOperator::block(int row, int col) const {
    if (row < 0 || row > 1 || col < 0 || col > 1)
        throw ParameterError("block index must be 0 or 1");
    const int dim = this->dim();
    return matrix_.block(row * dim, col * dim, dim, dim);
}

std::pair<Vec, Vec> TransitionOperator::apply(const Vec& u, const Vec& v) const {
    const int dim = this->dim();
    require_size(u, dim, "u slot");
    require_size(v, dim, "v slot");
    Vec stacked(2 * dim);
    stacked.head(dim) = u;
    stacked.tail(dim) = v;
    Vec out = matrix_ * stacked;
    return {Vec(out.head(dim)), Vec(out.tail(dim))};
}

FiberPoint TransitionOperator::apply(const FiberPoint& p) const {
    if (p.chart_id != source_chart_)
        throw ChartError("fiber point lives in chart '" + p.chart_id +
                         "', operator expects '" + source_chart_ + "'");
    auto [u, v] = apply(p.u, p.v);
    return {target_chart_, target_point_, std::move(u), std::move(v)};
}

FiberPoint trivialize(const Trivialization& triv, const Jet2& jet) {
    if (jet.chart_id != triv.chart_id())
        throw ChartError("jet lives in chart '" + jet.chart_id +
                         "', trivialization covers '" + triv.chart_id() + "'");
    return {jet.chart_id, jet.y, jet.u,
            Vec(jet.w + triv.christoffel().apply(jet.y, jet.u, jet.u))};
}

Jet2 untrivialize(const Trivialization& triv, const FiberPoint& p) {
    if (p.chart_id != triv.chart_id())
        throw ChartError("fiber point lives in chart '" + p.chart_id +
                         "', trivialization covers '" + triv.chart_id() + "'");
    return {p.chart_id, p.y, p.u, Vec(p.v - triv.christoffel().apply(p.y, p.u, p.u))};
}

Curve2 untrivialize_curve(const Trivialization& triv, const FiberPoint& p) {
    Jet2 jet = untrivialize(triv, p);
    return Curve2::polynomial(jet.chart_id, jet.y, jet.u, jet.w);
}

TransitionOperator transition_function(const Trivialization& target,
                                       const Trivialization& source, const Map2& sigma,
                                       const Vec& x_source, double tol) {
    if (tol <= 0.0) throw ParameterError("tolerance must be positive");
    const int dim = source.dim();
    if (target.dim() != dim || sigma.domain_dim() != dim || sigma.codomain_dim() != dim)
        throw ShapeError("trivializations and chart change have mismatched dimensions");
    Map2::PointEval e = sigma.at(x_source);
    Mat jac = jacobian_of(e, dim);
    double worst = 0.0;
    for (const auto& [u, v] : fiber_probes(dim)) {
        auto [su, sv] = push_fiber(target, source, e, x_source, u, v);
        worst = std::max(worst, sup(Vec(su - jac * u)));
        worst = std::max(worst, sup(Vec(sv - jac * v)));
    }
    if (worst > tol)
        throw IncompatibilityError(
            "Christoffel fields of charts '" + source.chart_id() + "' and '" +
                target.chart_id() + "' violate the compatibility law at " +
                format_point(x_source) + " (worst fiber residual " + std::to_string(worst) +
                ")",
            worst);
    Mat m = Mat::Zero(2 * dim, 2 * dim);
    m.topLeftCorner(dim, dim) = jac;
    m.bottomRightCorner(dim, dim) = jac;
    return TransitionOperator(target.chart_id(), source.chart_id(), x_source, e.value,
                              std::move(m));
}

double cocycle_residual(const Atlas& atlas, const Trivialization& ta,
                        const Trivialization& tb, const Trivialization& tc, const Vec& x_c) {
    Map2 s_bc = transition_map(atlas, tb.chart_id(), tc.chart_id());
    Map2 s_ab = transition_map(atlas, ta.chart_id(), tb.chart_id());
    Map2 s_ac = transition_map(atlas, ta.chart_id(), tc.chart_id());
    Mat t_bc = push_fiber_basis_matrix(tb, tc, s_bc, x_c);
    Mat t_ab = push_fiber_basis_matrix(ta, tb, s_ab, s_bc.value(x_c));
    Mat t_ac = push_fiber_basis_matrix(ta, tc, s_ac, x_c);
    return (t_ac - t_ab * t_bc).cwiseAbs().maxCoeff();
}

FiberChartMaps fiber_maps(const Trivialization& triv) {
    std::string id = triv.chart_id();
    ChristoffelField gamma = triv.christoffel();
    FiberChartMaps maps;
    maps.chart_id = id;
    maps.dim = gamma.dim();
    maps.phi1 = [id](const Jet2& jet) {
        if (jet.chart_id != id)
            throw ChartError("jet lives in chart '" + jet.chart_id + "', fiber maps cover '" +
                             id + "'");
        return jet.u;
    };
    maps.phi2 = [id, gamma](const Jet2& jet) {
        if (jet.chart_id != id)
            throw ChartError("jet lives in chart '" + jet.chart_id + "', fiber maps cover '" +
                             id + "'");
        return Vec(jet.w + gamma.apply(jet.y, jet.u, jet.u));
    };
    maps.inverse = [id, gamma](const Vec& y, const Vec& u, const Vec& v) {
        return Jet2{id, y, u, Vec(v - gamma.apply(y, u, u))};
    };
    return maps;
}

IsoReport tm_tm_isomorphism_check(const std::map<std::string, FiberChartMaps>& covers,
                                  const Atlas& atlas, double tol) {
    if (tol <= 0.0) throw ParameterError("tolerance must be positive");
    IsoReport report;
    for (const auto& [to, from] : atlas.transition_pairs()) {
        auto to_it = covers.find(to);
        auto from_it = covers.find(from);
        if (to_it == covers.end() || from_it == covers.end()) continue;
        const FiberChartMaps& tgt = to_it->second;
        const FiberChartMaps& src = from_it->second;
        Map2 sigma = transition_map(atlas, to, from);
        ++report.pairs_checked;
        for (const Vec& x : atlas.overlap_samples(to, from)) {
            Map2::PointEval e = sigma.at(x);
            Mat jac = jacobian_of(e, atlas.model_dim());
            double worst = 0.0;
            for (const auto& [u, v] : fiber_probes(atlas.model_dim())) {
                Jet2 jet = src.inverse(x, u, v);
                Jet2 moved = change_jet_chart(jet, sigma, to);
                worst = std::max(worst, sup(Vec(tgt.phi1(moved) - jac * u)));
                worst = std::max(worst, sup(Vec(tgt.phi2(moved) - jac * v)));
            }
            ++report.points_checked;
            report.worst = std::max(report.worst, worst);
            if (worst > tol) {
                report.pass = false;
                report.violations.push_back({to, from, x, worst});
            }
        }
    }
    return report;
}

ChristoffelField extract_christoffel(const FiberChartMaps& maps, const Atlas& atlas,
                                     const std::string& chart_id, double tol) {
    if (maps.chart_id != chart_id)
        throw ChartError("fiber maps cover chart '" + maps.chart_id + "', requested '" +
                         chart_id + "'");
    if (!maps.phi1 || !maps.phi2) throw ParameterError("fiber maps are incomplete");
    const Chart& chart = atlas.chart(chart_id);
    if (maps.dim != chart.dim)
        throw ShapeError("fiber maps have dimension " + std::to_string(maps.dim) +
                         ", chart has " + std::to_string(chart.dim));
    const int dim = maps.dim;
    Predicate image = chart.image;
    auto coeffs = [maps, image, chart_id, dim, tol](const Vec& y) {
        if (!image(y))
            throw DomainError("point " + format_point(y) + " outside image of chart '" +
                              chart_id + "'");
        auto jet = [&](const Vec& u, const Vec& w) { return Jet2{chart_id, y, u, w}; };
        const Vec zero = Vec::Zero(dim);
        const Vec gu = generic_u(dim);
        const Vec gw = generic_v(dim);
        // An adapted trivializing cover returns the jet velocity in slot one.
        for (const Vec* u : {&gu, &zero})
            if (double r = sup(Vec(maps.phi1(jet(*u, gw)) - *u)); r > tol)
                throw ExtractionError("slot one of the fiber maps is not the jet velocity at " +
                                      format_point(y) + " (residual " + std::to_string(r) + ")");
        // Slot two must be affine in the acceleration with unit slope ...
        Vec base = maps.phi2(jet(gu, zero));
        if (double r = sup(Vec(maps.phi2(jet(gu, gw)) - base - gw));
            r > tol * (1.0 + sup(base)))
            throw ExtractionError("slot two of the fiber maps is not acceleration plus a "
                                  "velocity term at " + format_point(y) + " (residual " +
                                  std::to_string(r) + ")");
        // ... and vanish on the zero jet.
        if (double r = sup(maps.phi2(jet(zero, zero))); r > tol)
            throw ExtractionError("slot two of the fiber maps does not vanish on the zero "
                                  "jet at " + format_point(y) + " (residual " +
                                  std::to_string(r) + ")");
        std::vector<Vec> diag(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            diag[static_cast<std::size_t>(i)] = maps.phi2(jet(Vec(Vec::Unit(dim, i)), zero));
        std::vector<Mat> out(static_cast<std::size_t>(dim), Mat(dim, dim));
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                Vec value = i == j ? diag[static_cast<std::size_t>(i)]
                                   : Vec(0.5 * (maps.phi2(jet(
                                                    Vec(Vec::Unit(dim, i) + Vec::Unit(dim, j)),
                                                    zero)) -
                                                diag[static_cast<std::size_t>(i)] -
                                                diag[static_cast<std::size_t>(j)]));
                for (int k = 0; k < dim; ++k) {
                    out[static_cast<std::size_t>(k)](i, j) = value[k];
                    out[static_cast<std::size_t>(k)](j, i) = value[k];
                }
            }
        // The velocity term must be exactly quadratic for the polarization
        // to reproduce it.
        Vec qgu(dim);
        for (int k = 0; k < dim; ++k) qgu[k] = gu.dot(out[static_cast<std::size_t>(k)] * gu);
        if (double r = sup(Vec(base - qgu)); r > tol * (1.0 + sup(base)))
            throw ExtractionError("velocity term of the fiber maps is not quadratic at " +
                                  format_point(y) + " (residual " + std::to_string(r) + ")");
        return out;
    };
    return ChristoffelField(chart_id, dim, coeffs);
}

double raw_fiber_linearity_defect(const Map2& sigma, const Vec& y, const Vec& u1,
                                  const Vec& w1, const Vec& u2, const Vec& w2) {
    Map2::PointEval e = sigma.at(y);
    auto raw = [&](const Vec& u, const Vec& w) {
        return std::pair<Vec, Vec>{e.first(u), Vec(e.second(u, u) + e.first(w))};
    };
    auto [a1, b1] = raw(u1, w1);
    auto [a2, b2] = raw(u2, w2);
    auto [a12, b12] = raw(Vec(u1 + u2), Vec(w1 + w2));
    return std::max(sup(Vec(a12 - a1 - a2)), sup(Vec(b12 - b1 - b2)));
}

}  // namespace t2m
