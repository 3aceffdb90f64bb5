#include "t2m/connection.hpp"

#include <Eigen/LU>

namespace t2m {

namespace {

void require_size(const Vec& x, int dim, const char* what) {
    if (x.size() != dim)
        throw ShapeError(std::string(what) + " has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(dim));
}

}  // namespace

ChristoffelField::ChristoffelField(std::string chart_id, int dim, CoeffFn coeffs)
    : chart_id_(std::move(chart_id)), dim_(dim), coeffs_(std::move(coeffs)) {
    if (dim_ < 1) throw ParameterError("Christoffel field dimension must be positive");
    if (!coeffs_) throw ParameterError("Christoffel field needs a coefficient function");
}

ChristoffelField ChristoffelField::zero(std::string chart_id, int dim) {
    return ChristoffelField(std::move(chart_id), dim, [dim](const Vec&) {
        return std::vector<Mat>(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
    });
}

std::vector<Mat> ChristoffelField::matrices(const Vec& y) const {
    if (empty()) throw ParameterError("Christoffel field is empty");
    require_size(y, dim_, "point");
    std::vector<Mat> g = coeffs_(y);
    if (static_cast<int>(g.size()) != dim_)
        throw ShapeError("Christoffel coefficients produced " + std::to_string(g.size()) +
                         " matrices, expected " + std::to_string(dim_));
    for (const Mat& m : g)
        if (m.rows() != dim_ || m.cols() != dim_)
            throw ShapeError("Christoffel coefficient matrix is not " + std::to_string(dim_) +
                             "x" + std::to_string(dim_));
    return g;
}

Vec ChristoffelField::apply(const Vec& y, const Vec& u, const Vec& v) const {
    require_size(u, dim_, "first argument");
    require_size(v, dim_, "second argument");
    std::vector<Mat> g = matrices(y);
    Vec out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = u.dot(g[static_cast<std::size_t>(k)] * v);
    return out;
}

std::pair<Vec, Vec> LocalConnectionMap::operator()(const Vec& y, const Vec& u, const Vec& v,
                                                   const Vec& w) const {
    return vilms_local(gamma, y, u, v, w);
}

std::pair<Vec, Vec> vilms_local(const ChristoffelField& gamma, const Vec& y, const Vec& u,
                                const Vec& v, const Vec& w) {
    require_size(w, gamma.dim(), "fourth slot");
    return {y, Vec(w + gamma.apply(y, u, v))};
}

Vec compat_residual(const ChristoffelField& gamma_to, const ChristoffelField& gamma_from,
                    const Map2& sigma, const Vec& y, const Vec& u, const Vec& v) {
    Map2::PointEval e = sigma.at(y);
    return gamma_to.apply(e.value, e.first(u), e.first(v)) + e.second(u, v) -
           e.first(gamma_from.apply(y, u, v));
}

ChristoffelField pushforward_christoffel(const ChristoffelField& gamma_from,
                                         const Map2& forward, const Map2& inverse,
                                         std::string target_chart) {
    if (forward.domain_dim() != gamma_from.dim() ||
        forward.codomain_dim() != inverse.domain_dim() ||
        inverse.codomain_dim() != gamma_from.dim())
        throw ShapeError("pushforward maps do not match the Christoffel field dimension");
    const int dim = forward.codomain_dim();
    auto coeffs = [gamma_from, forward, inverse, dim](const Vec& x) {
        Vec y = inverse.value(x);
        Map2::PointEval e = forward.at(y);
        Mat jac(dim, dim);
        for (int j = 0; j < dim; ++j) jac.col(j) = e.first(Vec(Vec::Unit(dim, j)));
        Eigen::FullPivLU<Mat> lu(jac);
        if (!lu.isInvertible())
            throw SingularError("chart change has singular derivative at " + format_point(y));
        // Solve the compatibility law for the target-chart field on basis
        // pairs: Gamma_to(x)(e_i)(e_j) = dsigma(Gamma_from(y)(u_i)(u_j))
        //                                - d^2 sigma(y)(u_i, u_j),
        // where u_i = dsigma(y)^{-1} e_i.
        std::vector<Vec> pre(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            pre[static_cast<std::size_t>(i)] = lu.solve(Vec(Vec::Unit(dim, i)));
        std::vector<Mat> out(static_cast<std::size_t>(dim), Mat(dim, dim));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const Vec& ui = pre[static_cast<std::size_t>(i)];
                const Vec& uj = pre[static_cast<std::size_t>(j)];
                Vec g = jac * gamma_from.apply(y, ui, uj) - e.second(ui, uj);
                for (int k = 0; k < dim; ++k) out[static_cast<std::size_t>(k)](i, j) = g[k];
            }
        return out;
    };
    return ChristoffelField(std::move(target_chart), dim, coeffs);
}

ChristoffelField pushforward_christoffel(const Atlas& atlas,
                                         const ChristoffelField& gamma_from,
                                         const std::string& target_chart) {
    return pushforward_christoffel(gamma_from,
                                   transition_map(atlas, target_chart, gamma_from.chart_id()),
                                   transition_map(atlas, gamma_from.chart_id(), target_chart),
                                   target_chart);
}

std::vector<Mat> metric_to_christoffel(const MetricFn& metric, const Vec& y, double fd_step) {
    if (fd_step <= 0.0) throw ParameterError("metric derivative step must be positive");
    const int dim = static_cast<int>(y.size());
    Mat g = metric(y);
    if (g.rows() != dim || g.cols() != dim)
        throw ShapeError("metric matrix is not " + std::to_string(dim) + "x" +
                         std::to_string(dim));
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible())
        throw SingularError("metric is singular at " + format_point(y));
    Mat ginv = lu.inverse();
    std::vector<Mat> dg(static_cast<std::size_t>(dim));
    for (int l = 0; l < dim; ++l) {
        Vec step = fd_step * Vec::Unit(dim, l);
        dg[static_cast<std::size_t>(l)] =
            (metric(Vec(y + step)) - metric(Vec(y - step))) / (2.0 * fd_step);
    }
    std::vector<Mat> gamma(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double s = 0.0;
                for (int l = 0; l < dim; ++l)
                    s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) +
                                       dg[static_cast<std::size_t>(j)](i, l) -
                                       dg[static_cast<std::size_t>(l)](i, j));
                gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
            }
    return gamma;
}

ChristoffelField levi_civita_field(std::string chart_id, int dim, MetricFn metric,
                                   double fd_step) {
    auto coeffs = [metric = std::move(metric), fd_step](const Vec& y) {
        return metric_to_christoffel(metric, y, fd_step);
    };
    return ChristoffelField(std::move(chart_id), dim, coeffs);
}

}  // namespace t2m
