#pragma once

#include "t2m/connection.hpp"

namespace t2m {

// Connection-induced fiber chart of the second-order tangent bundle over one
// base chart: jets (y, u, w) are straightened to (y, u, v = w + Gamma(y)(u)(u)).
class Trivialization {
public:
    explicit Trivialization(ChristoffelField gamma);

    const std::string& chart_id() const { return gamma_.chart_id(); }
    int dim() const { return gamma_.dim(); }
    const ChristoffelField& christoffel() const { return gamma_; }

private:
    ChristoffelField gamma_;
};

// A point of the trivialized bundle: base point plus the two fiber slots.
struct FiberPoint {
    std::string chart_id;
    Vec y;
    Vec u;
    Vec v;
};

// Fiberwise transition operator between two trivializations over a shared
// base point, stored as its matrix on E x E (u stacked over v).
class TransitionOperator {
public:
    TransitionOperator(std::string target_chart, std::string source_chart, Vec source_point,
                       Vec target_point, Mat matrix);

    const std::string& target_chart() const { return target_chart_; }
    const std::string& source_chart() const { return source_chart_; }
    const Vec& source_point() const { return source_point_; }
    const Vec& target_point() const { return target_point_; }
    int dim() const { return static_cast<int>(source_point_.size()); }
    const Mat& matrix() const { return matrix_; }

    // d x d block; row/col index 0 is the u slot, 1 the v slot.
    Mat block(int row, int col) const;

    std::pair<Vec, Vec> apply(const Vec& u, const Vec& v) const;
    FiberPoint apply(const FiberPoint& p) const;

private:
    std::string target_chart_, source_chart_;
    Vec source_point_, target_point_;
    Mat matrix_;
};

// (y, u, w) -> (y, u, w + Gamma(y)(u)(u)).  Throws ChartError when the jet
// lives in a different chart.
FiberPoint trivialize(const Trivialization& triv, const Jet2& jet);

// Inverse fiber chart, realized by the curve
//   f(t) = y + t u + (t^2/2) (v - Gamma(y)(u)(u)),
// whose 2-jet is (y, u, v - Gamma(y)(u)(u)).
Jet2 untrivialize(const Trivialization& triv, const FiberPoint& p);

// The curve realizing untrivialize, exposed for cross-checks.
Curve2 untrivialize_curve(const Trivialization& triv, const FiberPoint& p);

// Fiber transition between trivializations over the base change sigma
// (source-chart to target-chart coordinates), evaluated at a source-chart
// point.  The operator is computed two ways — by pushing fiber vectors
// through target-chart straightening after the jet chart change, and by the
// block formula dsigma(y) x dsigma(y) — and the two must agree pointwise on a
// probe set within `tol`; otherwise the Christoffel fields are incompatible
// across this overlap and an IncompatibilityError carries the worst residual.
TransitionOperator transition_function(const Trivialization& target,
                                       const Trivialization& source, const Map2& sigma,
                                       const Vec& x_source, double tol = 1e-10);

// Largest entry of T_ac - T_ab T_bc at a point given in c-chart coordinates,
// each factor obtained by pushing the fiber basis through the corresponding
// pair of trivializations (no compatibility gate, so corrupted fields show up
// as a large residual instead of an exception).
double cocycle_residual(const Atlas& atlas, const Trivialization& ta,
                        const Trivialization& tb, const Trivialization& tc, const Vec& x_c);

// Per-chart fiber coordinates of a trivializing cover, split into the two
// slots, with the inverse map back to jets.  Built-in trivializations convert
// via fiber_maps(); hand-built instances support fault injection and the
// converse extraction below.
struct FiberChartMaps {
    std::string chart_id;
    int dim = 0;
    std::function<Vec(const Jet2&)> phi1;
    std::function<Vec(const Jet2&)> phi2;
    std::function<Jet2(const Vec& y, const Vec& u, const Vec& v)> inverse;
};

FiberChartMaps fiber_maps(const Trivialization& triv);

struct IsoViolation {
    std::string target_chart;
    std::string source_chart;
    Vec point;       // source-chart coordinates
    double residual; // worst probe deviation from the block form
};

struct IsoReport {
    bool pass = true;
    double worst = 0.0;
    int pairs_checked = 0;
    int points_checked = 0;
    std::vector<IsoViolation> violations;
};

// Checks, over every stored overlap sample, that the fiber transition induced
// by the given covers is block-diagonal with both blocks equal to the base
// tangent map dsigma(y) within `tol` — the statement that the bundle carries
// the same cocycle as the doubled tangent bundle.
IsoReport tm_tm_isomorphism_check(const std::map<std::string, FiberChartMaps>& covers,
                                  const Atlas& atlas, double tol = 1e-10);

// Converse construction: recover the Christoffel field of a chart from its
// fiber maps.  Diagonal values come from jets with zero acceleration,
//   Gamma(y)(u)(u) = phi2(jet(y, u, 0)),
// and off-diagonal values from the symmetric polarization
//   Gamma(y)(u)(v) = [Gamma(y)(u+v)(u+v) - Gamma(y)(u)(u) - Gamma(y)(v)(v)] / 2.
// Every evaluation first verifies, on deterministic probes, that phi1 returns
// the jet velocity, that phi2 has unit slope in the acceleration, and that
// phi2 at zero acceleration is exactly quadratic in the velocity; any failure
// raises ExtractionError, since no fiberwise-linear cover can produce such
// maps.  Extraction is blind to any antisymmetric part of the original field.
ChristoffelField extract_christoffel(const FiberChartMaps& maps, const Atlas& atlas,
                                     const std::string& chart_id, double tol = 1e-8);

// Additivity defect of the raw jet chart change (u, w) -> (du, d2(u,u) + dw)
// on the fiber over y: the sup-norm of raw(p1 + p2) - raw(p1) - raw(p2).
// Nonzero exactly where the second differential of sigma is nonzero — the
// reason straightening by a connection is needed before fiberwise linearity
// can hold.
double raw_fiber_linearity_defect(const Map2& sigma, const Vec& y, const Vec& u1,
                                  const Vec& w1, const Vec& u2, const Vec& w2);

}  // namespace t2m
