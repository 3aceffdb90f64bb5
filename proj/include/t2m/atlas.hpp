#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "t2m/map2.hpp"

namespace t2m {

// A chart is known to the library only through its id and the open image of
// its coordinate map; everything else enters via transition maps.
struct Chart {
    std::string id;
    int dim = 0;
    Predicate image;
};

// Second-order tangent vector in chart coordinates: basepoint, velocity and
// acceleration of a representative curve at t = 0.
struct Jet2 {
    std::string chart_id;
    Vec y;
    Vec u;
    Vec w;
};

// A curve through a chart with its 2-jet at t = 0.  The optional path
// evaluator backs finite-difference cross-checks.
class Curve2 {
public:
    Curve2(std::string chart_id, Vec value, Vec velocity, Vec acceleration,
           std::function<Vec(double)> path = nullptr);

    // Propagate a one-parameter HyperDual evaluator through t = 0.
    static Curve2 analytic(std::string chart_id, int dim,
                           std::function<HDVector(const HyperDual&)> fn);

    // c(t) = y + t u + (t^2/2) w.
    static Curve2 polynomial(std::string chart_id, Vec y, Vec u, Vec w);

    const std::string& chart_id() const { return chart_id_; }
    const Vec& value() const { return value_; }
    const Vec& velocity() const { return velocity_; }
    const Vec& acceleration() const { return acceleration_; }
    bool has_path() const { return static_cast<bool>(path_); }
    Vec sample(double t) const;

private:
    std::string chart_id_;
    Vec value_, velocity_, acceleration_;
    std::function<Vec(double)> path_;
};

class Atlas {
public:
    explicit Atlas(int model_dim) : model_dim_(model_dim) {}

    int model_dim() const { return model_dim_; }

    void add_chart(Chart chart);
    // sigma maps from-chart coordinates to to-chart coordinates on the
    // overlap; samples are given in from-chart coordinates.
    void add_transition(const std::string& to, const std::string& from, Map2 sigma,
                        std::vector<Vec> samples = {});
    void add_triple_samples(const std::string& a, const std::string& b, const std::string& c,
                            std::vector<Vec> samples_in_c);

    const Chart& chart(const std::string& id) const;
    bool has_chart(const std::string& id) const;
    std::vector<std::string> chart_ids() const;

    bool has_transition(const std::string& to, const std::string& from) const;
    const std::vector<Vec>& overlap_samples(const std::string& to, const std::string& from) const;
    std::vector<std::pair<std::string, std::string>> transition_pairs() const;
    const std::map<std::tuple<std::string, std::string, std::string>, std::vector<Vec>>&
    triple_samples() const {
        return triples_;
    }

private:
    int model_dim_;
    std::vector<Chart> charts_;
    std::map<std::pair<std::string, std::string>, Map2> transitions_;
    std::map<std::pair<std::string, std::string>, std::vector<Vec>> samples_;
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<Vec>> triples_;

    friend Map2 transition_map(const Atlas&, const std::string&, const std::string&);
};

// sigma_{to,from}; the identity for to == from.  Throws ChartError for an
// unknown id or a pair without a stored overlap.
Map2 transition_map(const Atlas& atlas, const std::string& to, const std::string& from);

// Read the 2-jet off a curve, verifying the basepoint lies in the chart image.
Jet2 curve_to_jet(const Atlas& atlas, const Curve2& curve);

// Chart-change law for 2-jets:
//   (y, u, w) -> (sigma(y), d sigma(y) u, d^2 sigma(y)(u,u) + d sigma(y) w).
Jet2 change_jet_chart(const Jet2& jet, const Map2& sigma, const std::string& target_chart);
Jet2 change_jet_chart(const Atlas& atlas, const Jet2& jet, const std::string& target_chart);

// Componentwise comparison in a shared chart.  Throws ChartError when the
// jets live in different charts.
bool jets_equal(const Jet2& a, const Jet2& b, double tol);

}  // namespace t2m
