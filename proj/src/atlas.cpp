#include "t2m/atlas.hpp"

#include <algorithm>

namespace t2m {

Curve2::Curve2(std::string chart_id, Vec value, Vec velocity, Vec acceleration,
               std::function<Vec(double)> path)
    : chart_id_(std::move(chart_id)),
      value_(std::move(value)),
      velocity_(std::move(velocity)),
      acceleration_(std::move(acceleration)),
      path_(std::move(path)) {
    if (velocity_.size() != value_.size() || acceleration_.size() != value_.size())
        throw ShapeError("curve derivative dimensions disagree with the basepoint");
}

Curve2 Curve2::analytic(std::string chart_id, int dim,
                        std::function<HDVector(const HyperDual&)> fn) {
    // Seeding t = (0, 1, 1, 0) makes du the velocity and duv the acceleration.
    HDVector out = fn(HyperDual(0.0, 1.0, 1.0, 0.0));
    if (static_cast<int>(out.size()) != dim)
        throw ShapeError("curve evaluator produced " + std::to_string(out.size()) +
                         " components, expected " + std::to_string(dim));
    Vec y(dim), u(dim), w(dim);
    for (int i = 0; i < dim; ++i) {
        y[i] = out[static_cast<std::size_t>(i)].f;
        u[i] = out[static_cast<std::size_t>(i)].du;
        w[i] = out[static_cast<std::size_t>(i)].duv;
    }
    auto path = [fn, dim](double t) {
        HDVector v = fn(HyperDual(t));
        Vec p(dim);
        for (int i = 0; i < dim; ++i) p[i] = v[static_cast<std::size_t>(i)].f;
        return p;
    };
    return Curve2(std::move(chart_id), std::move(y), std::move(u), std::move(w), path);
}

Curve2 Curve2::polynomial(std::string chart_id, Vec y, Vec u, Vec w) {
    Vec y0 = y, u0 = u, w0 = w;
    auto path = [y0, u0, w0](double t) { return Vec(y0 + t * u0 + 0.5 * t * t * w0); };
    return Curve2(std::move(chart_id), std::move(y), std::move(u), std::move(w), path);
}

Vec Curve2::sample(double t) const {
    if (!path_) throw ParameterError("curve has no path evaluator");
    return path_(t);
}

void Atlas::add_chart(Chart chart) {
    if (chart.dim != model_dim_)
        throw ShapeError("chart '" + chart.id + "' dimension " + std::to_string(chart.dim) +
                         " disagrees with model dimension " + std::to_string(model_dim_));
    if (has_chart(chart.id)) throw ChartError("duplicate chart id '" + chart.id + "'");
    charts_.push_back(std::move(chart));
}

void Atlas::add_transition(const std::string& to, const std::string& from, Map2 sigma,
                           std::vector<Vec> samples) {
    if (!has_chart(to)) throw ChartError("unknown chart id '" + to + "'");
    if (!has_chart(from)) throw ChartError("unknown chart id '" + from + "'");
    if (sigma.domain_dim() != model_dim_ || sigma.codomain_dim() != model_dim_)
        throw ShapeError("transition " + to + "<-" + from + " has wrong dimensions");
    transitions_.insert_or_assign({to, from}, std::move(sigma));
    samples_[{to, from}] = std::move(samples);
}

void Atlas::add_triple_samples(const std::string& a, const std::string& b, const std::string& c,
                               std::vector<Vec> samples_in_c) {
    for (const auto* id : {&a, &b, &c})
        if (!has_chart(*id)) throw ChartError("unknown chart id '" + *id + "'");
    triples_[{a, b, c}] = std::move(samples_in_c);
}

const Chart& Atlas::chart(const std::string& id) const {
    for (const auto& c : charts_)
        if (c.id == id) return c;
    throw ChartError("unknown chart id '" + id + "'");
}

bool Atlas::has_chart(const std::string& id) const {
    return std::any_of(charts_.begin(), charts_.end(),
                       [&](const Chart& c) { return c.id == id; });
}

std::vector<std::string> Atlas::chart_ids() const {
    std::vector<std::string> ids;
    ids.reserve(charts_.size());
    for (const auto& c : charts_) ids.push_back(c.id);
    return ids;
}

bool Atlas::has_transition(const std::string& to, const std::string& from) const {
    return transitions_.count({to, from}) > 0;
}

const std::vector<Vec>& Atlas::overlap_samples(const std::string& to,
                                               const std::string& from) const {
    auto it = samples_.find({to, from});
    if (it == samples_.end())
        throw ChartError("no overlap samples for " + to + "<-" + from);
    return it->second;
}

std::vector<std::pair<std::string, std::string>> Atlas::transition_pairs() const {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(transitions_.size());
    for (const auto& [key, value] : transitions_) pairs.push_back(key);
    return pairs;
}

Map2 transition_map(const Atlas& atlas, const std::string& to, const std::string& from) {
    if (!atlas.has_chart(to)) throw ChartError("unknown chart id '" + to + "'");
    if (!atlas.has_chart(from)) throw ChartError("unknown chart id '" + from + "'");
    if (to == from) {
        auto it = atlas.transitions_.find({to, from});
        if (it != atlas.transitions_.end()) return it->second;
        return Map2::identity(atlas.model_dim());
    }
    auto it = atlas.transitions_.find({to, from});
    if (it == atlas.transitions_.end())
        throw ChartError("charts '" + to + "' and '" + from + "' have no stored overlap");
    return it->second;
}

Jet2 curve_to_jet(const Atlas& atlas, const Curve2& curve) {
    const Chart& chart = atlas.chart(curve.chart_id());
    if (!chart.image(curve.value()))
        throw DomainError("curve basepoint " + format_point(curve.value()) +
                          " outside image of chart '" + chart.id + "'");
    return {curve.chart_id(), curve.value(), curve.velocity(), curve.acceleration()};
}

Jet2 change_jet_chart(const Jet2& jet, const Map2& sigma, const std::string& target_chart) {
    Map2::PointEval e = sigma.at(jet.y);
    return {target_chart, e.value, e.first(jet.u),
            Vec(e.second(jet.u, jet.u) + e.first(jet.w))};
}

Jet2 change_jet_chart(const Atlas& atlas, const Jet2& jet, const std::string& target_chart) {
    if (jet.chart_id == target_chart) return jet;
    return change_jet_chart(jet, transition_map(atlas, target_chart, jet.chart_id),
                            target_chart);
}

bool jets_equal(const Jet2& a, const Jet2& b, double tol) {
    if (a.chart_id != b.chart_id)
        throw ChartError("jets live in charts '" + a.chart_id + "' and '" + b.chart_id +
                         "'; change charts before comparing");
    return (a.y - b.y).lpNorm<Eigen::Infinity>() <= tol &&
           (a.u - b.u).lpNorm<Eigen::Infinity>() <= tol &&
           (a.w - b.w).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace t2m
