#include "t2m/prolim.hpp"

#include <Eigen/LU>

#include <random>

namespace t2m {

namespace {

double sup(const Vec& x) { return x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0; }

// Doubled action on E x E (u stacked over v).
Mat doubled(const Mat& m) {
    Mat d = Mat::Zero(2 * m.rows(), 2 * m.cols());
    d.topLeftCorner(m.rows(), m.cols()) = m;
    d.bottomRightCorner(m.rows(), m.cols()) = m;
    return d;
}

// Deterministic sample jets at a given dimension for structural audits.
std::vector<Jet2> audit_jets(const std::string& chart, int dim) {
    Vec a(dim), b(dim), c(dim);
    for (int i = 0; i < dim; ++i) {
        a[i] = 0.5 + 0.25 * i;
        b[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + 0.1 * i);
        c[i] = 2.0 - 0.3 * i;
    }
    return {Jet2{chart, a, b, c}, Jet2{chart, Vec(-c), Vec(a - b), Vec(0.5 * a)}};
}

}  // namespace

std::string level_chart_id(int level) { return "level" + std::to_string(level); }

Tower::Tower(std::vector<int> level_dims) : dims_(std::move(level_dims)) {
    if (dims_.empty()) throw ParameterError("tower needs at least one level");
    for (int d : dims_)
        if (d < 1) throw ParameterError("level dimensions must be positive");
}

Tower Tower::truncation(std::vector<int> level_dims) {
    Tower tower(std::move(level_dims));
    for (std::size_t i = 1; i < tower.dims_.size(); ++i)
        if (tower.dims_[i] < tower.dims_[i - 1])
            throw ParameterError("truncation tower needs non-decreasing level dimensions");
    for (int j = 2; j <= tower.depth(); ++j)
        for (int i = 1; i < j; ++i) {
            Mat m = Mat::Zero(tower.dim(i), tower.dim(j));
            m.leftCols(tower.dim(i)).setIdentity();
            tower.rho_[{j, i}] = std::move(m);
        }
    return tower;
}

void Tower::require_level(int level) const {
    if (level < 1 || level > depth())
        throw ParameterError("level " + std::to_string(level) + " outside 1.." +
                             std::to_string(depth()));
}

int Tower::dim(int level) const {
    require_level(level);
    return dims_[static_cast<std::size_t>(level - 1)];
}

Mat Tower::rho(int j, int i) const {
    require_level(j);
    require_level(i);
    if (i > j)
        throw ParameterError("no connecting map upward from level " + std::to_string(j) +
                             " to " + std::to_string(i));
    if (i == j) return Mat::Identity(dim(i), dim(i));
    auto it = rho_.find({j, i});
    if (it == rho_.end())
        throw ParameterError("no connecting map stored for levels " + std::to_string(j) +
                             " -> " + std::to_string(i));
    return it->second;
}

bool Tower::has_rho(int j, int i) const { return i == j || rho_.count({j, i}) > 0; }

void Tower::set_rho(int j, int i, Mat m) {
    require_level(j);
    require_level(i);
    if (i >= j) throw ParameterError("connecting maps go from a deeper level to a shallower one");
    if (m.rows() != dim(i) || m.cols() != dim(j))
        throw ShapeError("connecting map for levels " + std::to_string(j) + " -> " +
                         std::to_string(i) + " must be " + std::to_string(dim(i)) + "x" +
                         std::to_string(dim(j)));
    rho_[{j, i}] = std::move(m);
}

Map2 Tower::phi(int j, int i) const {
    auto it = phi_.find({j, i});
    if (it != phi_.end()) return it->second;
    if (i == j) return Map2::identity(dim(i));
    return Map2::linear(rho(j, i));
}

bool Tower::has_phi_override(int j, int i) const { return phi_.count({j, i}) > 0; }

void Tower::set_phi(int j, int i, Map2 m) {
    require_level(j);
    require_level(i);
    if (i >= j) throw ParameterError("connecting maps go from a deeper level to a shallower one");
    if (m.domain_dim() != dim(j) || m.codomain_dim() != dim(i))
        throw ShapeError("chart-level connecting map has wrong dimensions for levels " +
                         std::to_string(j) + " -> " + std::to_string(i));
    phi_.insert_or_assign({j, i}, std::move(m));
}

TowerReport check_tower(const Tower& tower, double tol) {
    TowerReport report;
    auto record = [&](const std::string& what, int j, int i, int k, double residual) {
        ++report.checks;
        report.worst = std::max(report.worst, residual);
        if (residual > tol) {
            report.pass = false;
            report.violations.push_back({what, j, i, k, residual});
        }
    };
    const int depth = tower.depth();
    for (int j = 2; j <= depth; ++j)
        for (int i = 1; i < j; ++i) {
            Mat r = tower.rho(j, i);
            Eigen::FullPivLU<Mat> lu(r);
            record("connecting map surjective", j, i, 0,
                   static_cast<double>(tower.dim(i) - lu.rank()));
        }
    for (int j = 3; j <= depth; ++j)
        for (int i = 2; i < j; ++i)
            for (int k = 1; k < i; ++k)
                record("connecting map composition", j, i, k,
                       (tower.rho(i, k) * tower.rho(j, i) - tower.rho(j, k))
                           .cwiseAbs()
                           .maxCoeff());
    for (int j = 3; j <= depth; ++j) {
        for (const Jet2& jet : audit_jets(level_chart_id(j), tower.dim(j)))
            for (int i = 2; i < j; ++i)
                for (int k = 1; k < i; ++k) {
                    Jet2 two_step = project_jet(tower, project_jet(tower, jet, j, i), i, k);
                    Jet2 direct = project_jet(tower, jet, j, k);
                    double res = std::max({sup(Vec(two_step.y - direct.y)),
                                           sup(Vec(two_step.u - direct.u)),
                                           sup(Vec(two_step.w - direct.w))});
                    record("jet projection functorial", j, i, k, res);
                }
    }
    return report;
}

Jet2 project_jet(const Tower& tower, const Jet2& jet, int j, int i) {
    if (i > j)
        throw ParameterError("cannot project a level-" + std::to_string(j) +
                             " jet up to level " + std::to_string(i));
    if (jet.y.size() != tower.dim(j))
        throw ShapeError("jet has " + std::to_string(jet.y.size()) +
                         " coordinates, level " + std::to_string(j) + " has " +
                         std::to_string(tower.dim(j)));
    if (jet.chart_id != level_chart_id(j))
        throw ChartError("jet lives in chart '" + jet.chart_id + "', expected '" +
                         level_chart_id(j) + "'");
    if (i == j) return jet;
    return change_jet_chart(jet, tower.phi(j, i), level_chart_id(i));
}

double tower_jet_residual(const Tower& tower, const TowerJet& tj) {
    if (static_cast<int>(tj.levels.size()) != tower.depth())
        throw ShapeError("tower jet has " + std::to_string(tj.levels.size()) +
                         " levels, tower has " + std::to_string(tower.depth()));
    double worst = 0.0;
    for (int j = 2; j <= tower.depth(); ++j)
        for (int i = 1; i < j; ++i) {
            Jet2 down = project_jet(tower, tj.levels[static_cast<std::size_t>(j - 1)], j, i);
            const Jet2& stored = tj.levels[static_cast<std::size_t>(i - 1)];
            worst = std::max({worst, sup(Vec(down.y - stored.y)), sup(Vec(down.u - stored.u)),
                              sup(Vec(down.w - stored.w))});
        }
    return worst;
}

TowerJet project_all(const Tower& tower, const Jet2& top) {
    TowerJet tj;
    tj.levels.reserve(static_cast<std::size_t>(tower.depth()));
    for (int i = 1; i <= tower.depth(); ++i)
        tj.levels.push_back(project_jet(tower, top, tower.depth(), i));
    return tj;
}

TowerJet reconstruct_limit_jet(const Tower& tower, const std::vector<Jet2>& family,
                               double tol) {
    const int depth = tower.depth();
    if (static_cast<int>(family.size()) != depth)
        throw ShapeError("family has " + std::to_string(family.size()) +
                         " levels, tower has " + std::to_string(depth));
    for (int j = 2; j <= depth; ++j)
        for (int i = 1; i < j; ++i) {
            Jet2 down = project_jet(tower, family[static_cast<std::size_t>(j - 1)], j, i);
            const Jet2& stored = family[static_cast<std::size_t>(i - 1)];
            double res = std::max({sup(Vec(down.y - stored.y)), sup(Vec(down.u - stored.u)),
                                   sup(Vec(down.w - stored.w))});
            if (res > tol)
                throw ReconstructionError(
                    "family is not projection-compatible between levels " +
                        std::to_string(j) + " and " + std::to_string(i) + " (residual " +
                        std::to_string(res) + ")",
                    j, i);
        }
    // Realize the limit jet by the deepest level's polynomial representative
    // curve and expand it back into a family.
    const Jet2& top = family[static_cast<std::size_t>(depth - 1)];
    Curve2 h = Curve2::polynomial(level_chart_id(depth), top.y, top.u, top.w);
    Jet2 top_jet{level_chart_id(depth), h.value(), h.velocity(), h.acceleration()};
    return project_all(tower, top_jet);
}

MembershipReport tower_membership(const TowerLinearMap& map, const Tower& tower, double tol) {
    MembershipReport report;
    if (static_cast<int>(map.levels.size()) != tower.depth()) {
        report.member = false;
        report.reason = "map has " + std::to_string(map.levels.size()) + " levels, tower has " +
                        std::to_string(tower.depth());
        return report;
    }
    for (int i = 1; i <= tower.depth(); ++i) {
        const Mat& l = map.levels[static_cast<std::size_t>(i - 1)];
        if (l.rows() != 2 * tower.dim(i) || l.cols() != 2 * tower.dim(i)) {
            report.member = false;
            report.reason = "level " + std::to_string(i) + " map is not " +
                            std::to_string(2 * tower.dim(i)) + " square";
            return report;
        }
        Eigen::FullPivLU<Mat> lu(l);
        if (!lu.isInvertible()) {
            report.member = false;
            if (report.reason.empty())
                report.reason = "level " + std::to_string(i) + " map is singular";
        }
    }
    for (int j = 2; j <= tower.depth(); ++j)
        for (int k = 1; k < j; ++k) {
            Mat r2 = doubled(tower.rho(j, k));
            double res = (r2 * map.levels[static_cast<std::size_t>(j - 1)] -
                          map.levels[static_cast<std::size_t>(k - 1)] * r2)
                             .cwiseAbs()
                             .maxCoeff();
            report.worst = std::max(report.worst, res);
            if (res > tol) {
                report.member = false;
                if (report.reason.empty())
                    report.reason = "commutation with the connecting maps fails for levels " +
                                    std::to_string(j) + " -> " + std::to_string(k) +
                                    " (residual " + std::to_string(res) + ")";
            }
        }
    return report;
}

TowerLinearMap tower_compose(const TowerLinearMap& a, const TowerLinearMap& b) {
    if (a.levels.size() != b.levels.size())
        throw ShapeError("tower maps have different depths");
    TowerLinearMap out;
    out.levels.reserve(a.levels.size());
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        if (a.levels[i].cols() != b.levels[i].rows())
            throw ShapeError("level " + std::to_string(i + 1) + " maps are not composable");
        out.levels.emplace_back(a.levels[i] * b.levels[i]);
    }
    return out;
}

TowerLinearMap tower_invert(const TowerLinearMap& a) {
    TowerLinearMap out;
    out.levels.reserve(a.levels.size());
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        Eigen::FullPivLU<Mat> lu(a.levels[i]);
        if (!lu.isInvertible())
            throw SingularError("level " + std::to_string(i + 1) + " map is singular");
        out.levels.emplace_back(lu.inverse());
    }
    return out;
}

TowerLinearMap tower_identity(const Tower& tower) {
    TowerLinearMap out;
    for (int i = 1; i <= tower.depth(); ++i)
        out.levels.emplace_back(Mat::Identity(2 * tower.dim(i), 2 * tower.dim(i)));
    return out;
}

TowerLinearMap random_tower_map(const Tower& tower, std::uint64_t seed) {
    const int depth = tower.depth();
    const int dn = tower.dim(depth);
    // Birth level of each deepest-level coordinate.
    std::vector<int> born(static_cast<std::size_t>(dn), depth);
    for (int c = 0; c < dn; ++c)
        for (int l = 1; l <= depth; ++l)
            if (c < tower.dim(l)) {
                born[static_cast<std::size_t>(c)] = l;
                break;
            }
    auto fiber_born = [&](int r) { return born[static_cast<std::size_t>(r < dn ? r : r - dn)]; };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Mat top = Mat::Zero(2 * dn, 2 * dn);
    for (int r = 0; r < 2 * dn; ++r)
        for (int c = 0; c < 2 * dn; ++c)
            if (fiber_born(c) <= fiber_born(r)) top(r, c) = 0.4 * uni(rng) / (2.0 * dn);
    top.diagonal().array() += 1.0;
    TowerLinearMap out;
    for (int l = 1; l <= depth; ++l) {
        const int dl = tower.dim(l);
        std::vector<int> keep;
        for (int c = 0; c < dl; ++c) keep.push_back(c);
        for (int c = 0; c < dl; ++c) keep.push_back(dn + c);
        Mat sub(2 * dl, 2 * dl);
        for (int r = 0; r < 2 * dl; ++r)
            for (int c = 0; c < 2 * dl; ++c)
                sub(r, c) = top(keep[static_cast<std::size_t>(r)],
                                keep[static_cast<std::size_t>(c)]);
        out.levels.push_back(std::move(sub));
    }
    return out;
}

double limit_square_residual(const std::vector<Trivialization>& trivs, const Tower& tower,
                             int j, int i, const std::vector<Jet2>& samples_level_j) {
    if (static_cast<int>(trivs.size()) != tower.depth())
        throw ParameterError("need one trivialization per tower level");
    for (int l = 1; l <= tower.depth(); ++l) {
        const Trivialization& t = trivs[static_cast<std::size_t>(l - 1)];
        if (t.chart_id() != level_chart_id(l))
            throw ChartError("trivialization " + std::to_string(l) + " covers chart '" +
                             t.chart_id() + "', expected '" + level_chart_id(l) + "'");
        if (t.dim() != tower.dim(l))
            throw ShapeError("trivialization " + std::to_string(l) + " has dimension " +
                             std::to_string(t.dim()) + ", level has " +
                             std::to_string(tower.dim(l)));
    }
    if (i > j) throw ParameterError("squares are checked downward: need i <= j");
    Map2 phi = tower.phi(j, i);
    Mat rho = tower.rho(j, i);
    double worst = 0.0;
    for (const Jet2& jet : samples_level_j) {
        Jet2 down = project_jet(tower, jet, j, i);
        // Base square: connecting map of the basepoint vs basepoint of the
        // projected jet.
        worst = std::max(worst, sup(Vec(phi.value(jet.y) - down.y)));
        // Fiber square: doubled connecting map of the straightened fiber vs
        // straightened fiber of the projected jet.
        FiberPoint high = trivialize(trivs[static_cast<std::size_t>(j - 1)], jet);
        FiberPoint low = trivialize(trivs[static_cast<std::size_t>(i - 1)], down);
        worst = std::max({worst, sup(Vec(phi.value(high.y) - low.y)),
                          sup(Vec(rho * high.u - low.u)), sup(Vec(rho * high.v - low.v))});
    }
    return worst;
}

TowerReport limit_connection_check(const TowerChristoffel& gammas, const Tower& tower,
                                   int samples, std::uint64_t seed, double tol) {
    const int depth = tower.depth();
    if (static_cast<int>(gammas.levels.size()) != depth)
        throw ShapeError("need one Christoffel field per tower level");
    for (int l = 1; l <= depth; ++l) {
        const ChristoffelField& g = gammas.levels[static_cast<std::size_t>(l - 1)];
        if (g.dim() != tower.dim(l))
            throw ShapeError("level " + std::to_string(l) + " field has dimension " +
                             std::to_string(g.dim()) + ", level has " +
                             std::to_string(tower.dim(l)));
        if (g.chart_id() != level_chart_id(l))
            throw ChartError("level " + std::to_string(l) + " field covers chart '" +
                             g.chart_id() + "', expected '" + level_chart_id(l) + "'");
    }
    if (samples < 1) throw ParameterError("sample count must be positive");
    TowerReport report;
    auto record = [&](const std::string& what, int j, int i, double residual) {
        ++report.checks;
        report.worst = std::max(report.worst, residual);
        if (residual > tol) {
            report.pass = false;
            report.violations.push_back({what, j, i, 0, residual});
        }
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int dn = tower.dim(depth);
    auto draw = [&] {
        Vec x(dn);
        for (int c = 0; c < dn; ++c) x[c] = uni(rng);
        return x;
    };
    for (int s = 0; s < samples; ++s) {
        Vec y = draw(), u = draw(), v = draw(), w = draw();
        for (int j = 2; j <= depth; ++j)
            for (int i = 1; i < j; ++i) {
                Mat to_j = tower.rho(depth, j);
                Mat r = tower.rho(j, i);
                Vec yj = to_j * y, uj = to_j * u, vj = to_j * v, wj = to_j * w;
                const ChristoffelField& gj = gammas.levels[static_cast<std::size_t>(j - 1)];
                const ChristoffelField& gi = gammas.levels[static_cast<std::size_t>(i - 1)];
                Vec lhs = r * gj.apply(yj, uj, vj);
                Vec rhs = gi.apply(Vec(r * yj), Vec(r * uj), Vec(r * vj));
                record("christoffel equivariance", j, i, sup(Vec(lhs - rhs)));
                auto high = vilms_local(gj, yj, uj, vj, wj);
                auto low = vilms_local(gi, Vec(r * yj), Vec(r * uj), Vec(r * vj), Vec(r * wj));
                record("local connection map commutes with projection", j, i,
                       sup(Vec(r * high.second - low.second)));
            }
    }
    return report;
}

}  // namespace t2m
