#pragma once

#include "t2m/atlas.hpp"

namespace t2m {

// Per-chart Christoffel field.  The bilinear map at y is stored through its
// coefficient matrices G_k(y):  apply(y, u, v)_k = u' G_k(y) v.  Bilinearity
// in (u, v) is then exact by construction; symmetry of each G_k is NOT
// assumed (torsion is allowed).
class ChristoffelField {
public:
    using CoeffFn = std::function<std::vector<Mat>(const Vec&)>;

    ChristoffelField() = default;
    ChristoffelField(std::string chart_id, int dim, CoeffFn coeffs);

    static ChristoffelField zero(std::string chart_id, int dim);

    const std::string& chart_id() const { return chart_id_; }
    int dim() const { return dim_; }
    bool empty() const { return !coeffs_; }

    // Coefficient matrices at y, shape-checked.
    std::vector<Mat> matrices(const Vec& y) const;

    // Gamma(y)(u)(v).
    Vec apply(const Vec& y, const Vec& u, const Vec& v) const;

private:
    std::string chart_id_;
    int dim_ = 0;
    CoeffFn coeffs_;
};

// Local form of a linear connection over one chart:
//   D(y, u, v, w) = (y, w + Gamma(y)(u)(v)).
struct LocalConnectionMap {
    ChristoffelField gamma;

    std::pair<Vec, Vec> operator()(const Vec& y, const Vec& u, const Vec& v,
                                   const Vec& w) const;
};

// D(y, u, v, w) = (y, w + Gamma(y)(u)(v)).
std::pair<Vec, Vec> vilms_local(const ChristoffelField& gamma, const Vec& y, const Vec& u,
                                const Vec& v, const Vec& w);

// Residual of the cross-chart Christoffel compatibility law at a point of the
// overlap, evaluated in from-chart coordinates y:
//   Gamma_to(sigma(y))(dsigma u)(dsigma v) + d^2 sigma(y)(u, v)
//     - dsigma(Gamma_from(y)(u)(v)).
// Zero exactly when the two fields describe the same connection across sigma.
Vec compat_residual(const ChristoffelField& gamma_to, const ChristoffelField& gamma_from,
                    const Map2& sigma, const Vec& y, const Vec& u, const Vec& v);

// Transport a Christoffel field across a chart change so that the
// compatibility law holds by construction.  `forward` maps from-chart to
// target-chart coordinates, `inverse` maps back; the returned field takes
// target-chart points.  Throws SingularError where dsigma is not invertible.
ChristoffelField pushforward_christoffel(const ChristoffelField& gamma_from,
                                         const Map2& forward, const Map2& inverse,
                                         std::string target_chart);
ChristoffelField pushforward_christoffel(const Atlas& atlas,
                                         const ChristoffelField& gamma_from,
                                         const std::string& target_chart);

using MetricFn = std::function<Mat(const Vec&)>;

// Levi-Civita coefficients at one point,
//   Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij),
// with metric derivatives by central differences at `fd_step`.
std::vector<Mat> metric_to_christoffel(const MetricFn& metric, const Vec& y,
                                       double fd_step = 1e-5);

// Christoffel field computing metric_to_christoffel at every point.
ChristoffelField levi_civita_field(std::string chart_id, int dim, MetricFn metric,
                                   double fd_step = 1e-5);

}  // namespace t2m
