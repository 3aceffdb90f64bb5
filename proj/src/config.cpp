#include "t2m/config.hpp"

#include <algorithm>
#include <fstream>

namespace t2m {

namespace {

using nlohmann::json;

const json& need(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(ctx + " needs field '" + key + "'");
    return j.at(key);
}

std::string need_string(const json& j, const char* key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_string()) throw ConfigError(ctx + " field '" + key + "' must be a string");
    return v.get<std::string>();
}

Vec vec_from(const json& j, int dim, const std::string& ctx) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ConfigError(ctx + " must be an array of " + std::to_string(dim) + " numbers");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number())
            throw ConfigError(ctx + " must contain only numbers");
        v[i] = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

std::vector<std::string> string_list(const json& j, int count, const std::string& ctx) {
    if (!j.is_array() || static_cast<int>(j.size()) != count)
        throw ConfigError(ctx + " must be an array of " + std::to_string(count) + " strings");
    std::vector<std::string> out;
    for (const json& e : j) {
        if (!e.is_string()) throw ConfigError(ctx + " must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

// dim x dim table of expression strings.
std::vector<std::vector<std::string>> string_table(const json& j, int dim,
                                                   const std::string& ctx) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ConfigError(ctx + " must be a " + std::to_string(dim) + "x" +
                          std::to_string(dim) + " table of strings");
    std::vector<std::vector<std::string>> out;
    for (const json& row : j) out.push_back(string_list(row, dim, ctx));
    return out;
}

MetricFn metric_from_exprs(const std::vector<std::vector<std::string>>& table, int dim) {
    std::vector<std::vector<Expr>> parsed(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
        for (const std::string& text : table[i]) parsed[i].push_back(Expr::parse(text, dim));
    return [parsed, dim](const Vec& y) {
        Mat g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                g(i, j) = parsed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                              .eval(y);
        return g;
    };
}

}  // namespace

Predicate predicate_from_json(const json& j, int dim) {
    std::string kind = need_string(j, "kind", "domain");
    if (kind == "all") return Predicate::all();
    if (kind == "ball") {
        Vec center = vec_from(need(j, "center", "ball domain"), dim, "ball center");
        const json& rj = need(j, "radius", "ball domain");
        if (!rj.is_number() || rj.get<double>() <= 0.0)
            throw ConfigError("ball radius must be a positive number");
        return Predicate::ball(center, rj.get<double>());
    }
    if (kind == "box") {
        Vec lo = vec_from(need(j, "lo", "box domain"), dim, "box lo");
        Vec hi = vec_from(need(j, "hi", "box domain"), dim, "box hi");
        return Predicate::box(lo, hi);
    }
    if (kind == "pos") {
        Expr e = Expr::parse(need_string(j, "expr", "pos domain"), dim);
        return Predicate([e](const Vec& y) { return e.eval(y) > 0.0; },
                         e.text() + " > 0");
    }
    if (kind == "all_of" || kind == "any_of") {
        const json& parts = need(j, "of", kind + " domain");
        if (!parts.is_array() || parts.empty())
            throw ConfigError(kind + " domain needs a nonempty 'of' array");
        Predicate acc = predicate_from_json(parts[0], dim);
        for (std::size_t i = 1; i < parts.size(); ++i) {
            Predicate next = predicate_from_json(parts[i], dim);
            acc = kind == "all_of" ? (acc && next) : (acc || next);
        }
        return acc;
    }
    if (kind == "not") return !predicate_from_json(need(j, "of", "not domain"), dim);
    throw ConfigError("unknown domain kind '" + kind + "'");
}

ChristoffelField christoffel_from_json(const json& j, const std::string& chart_id, int dim) {
    std::string kind = need_string(j, "kind", "christoffel entry");
    if (kind == "zero") return ChristoffelField::zero(chart_id, dim);
    if (kind == "expr") {
        const json& entries = need(j, "entries", "christoffel entry");
        if (!entries.is_array() || static_cast<int>(entries.size()) != dim)
            throw ConfigError("christoffel entries must hold " + std::to_string(dim) +
                              " coefficient tables");
        std::vector<std::vector<std::vector<std::string>>> tables;
        for (const json& table : entries)
            tables.push_back(string_table(table, dim, "christoffel coefficients"));
        return christoffel_from_exprs(chart_id, dim, tables);
    }
    if (kind == "metric") {
        MetricFn metric = metric_from_exprs(
            string_table(need(j, "metric", "christoffel entry"), dim, "metric"), dim);
        double step = j.contains("step") ? j.at("step").get<double>() : 1e-5;
        if (step <= 0.0) throw ConfigError("metric derivative step must be positive");
        return levi_civita_field(chart_id, dim, std::move(metric), step);
    }
    if (kind == "pushforward")
        throw ConfigError("pushforward fields are resolved by load_fixture, not directly");
    throw ConfigError("unknown christoffel kind '" + kind + "'");
}

Fixture load_fixture(const json& doc) {
    try {
        const json& dim_j = need(doc, "dim", "fixture");
        if (!dim_j.is_number_integer() || dim_j.get<int>() < 1)
            throw ConfigError("fixture dim must be a positive integer");
        const int dim = dim_j.get<int>();
        Fixture fx(dim);
        fx.name = need_string(doc, "name", "fixture");
        if (doc.contains("description")) fx.description = doc.at("description").get<std::string>();

        if (doc.contains("charts")) {
            const json& charts = doc.at("charts");
            if (!charts.is_array()) throw ConfigError("fixture charts must be an array");
            for (const json& cj : charts) {
                Chart c;
                c.id = need_string(cj, "id", "chart");
                c.dim = dim;
                c.image = cj.contains("domain") ? predicate_from_json(cj.at("domain"), dim)
                                                : Predicate::all();
                fx.atlas.add_chart(std::move(c));
            }
        }

        if (doc.contains("transitions"))
            for (const json& tj : doc.at("transitions")) {
                std::string to = need_string(tj, "to", "transition");
                std::string from = need_string(tj, "from", "transition");
                std::string ctx = "transition " + to + "<-" + from;
                if (!fx.atlas.has_chart(to) || !fx.atlas.has_chart(from))
                    throw ConfigError(ctx + " references an unknown chart");
                Predicate overlap = fx.atlas.chart(from).image;
                if (tj.contains("domain"))
                    overlap = overlap && predicate_from_json(tj.at("domain"), dim);
                Map2 sigma = expr_map(string_list(need(tj, "map", ctx), dim, ctx + " map"),
                                      dim, overlap);
                std::vector<Vec> samples;
                if (tj.contains("samples")) {
                    int idx = 0;
                    for (const json& sj : tj.at("samples")) {
                        Vec x = vec_from(sj, dim, ctx + " sample " + std::to_string(idx));
                        if (!sigma.in_domain(x))
                            throw ConfigError(ctx + " sample " + std::to_string(idx) + " " +
                                              format_point(x) +
                                              " is outside the declared overlap");
                        Vec image = sigma.value(x);
                        if (!fx.atlas.chart(to).image(image))
                            throw ConfigError(ctx + " sample " + std::to_string(idx) +
                                              " maps to " + format_point(image) +
                                              " outside the image of chart '" + to + "'");
                        samples.push_back(std::move(x));
                        ++idx;
                    }
                }
                fx.atlas.add_transition(to, from, std::move(sigma), std::move(samples));
            }

        if (doc.contains("triple_overlaps"))
            for (const json& oj : doc.at("triple_overlaps")) {
                const json& ids = need(oj, "charts", "triple overlap");
                if (!ids.is_array() || ids.size() != 3)
                    throw ConfigError("triple overlap needs exactly three chart ids");
                std::string a = ids[0].get<std::string>();
                std::string b = ids[1].get<std::string>();
                std::string c = ids[2].get<std::string>();
                std::string ctx = "triple overlap (" + a + ", " + b + ", " + c + ")";
                for (auto [to, from] : {std::pair{b, c}, {a, b}, {a, c}})
                    if (!fx.atlas.has_transition(to, from))
                        throw ConfigError(ctx + " needs the transition " + to + "<-" + from);
                Map2 s_bc = transition_map(fx.atlas, b, c);
                Map2 s_ab = transition_map(fx.atlas, a, b);
                Map2 s_ac = transition_map(fx.atlas, a, c);
                std::vector<Vec> samples;
                int idx = 0;
                for (const json& sj : need(oj, "samples", ctx)) {
                    Vec x = vec_from(sj, dim, ctx + " sample " + std::to_string(idx));
                    if (!s_bc.in_domain(x) || !s_ac.in_domain(x) ||
                        !s_ab.in_domain(s_bc.value(x)))
                        throw ConfigError(ctx + " sample " + std::to_string(idx) + " " +
                                          format_point(x) +
                                          " is outside one of the pairwise overlaps");
                    samples.push_back(std::move(x));
                    ++idx;
                }
                fx.atlas.add_triple_samples(a, b, c, std::move(samples));
            }

        if (doc.contains("christoffels")) {
            std::vector<std::pair<std::string, std::string>> deferred;  // chart <- source
            for (const json& gj : doc.at("christoffels")) {
                std::string chart = need_string(gj, "chart", "christoffel entry");
                if (!fx.atlas.has_chart(chart))
                    throw ConfigError("christoffel entry references unknown chart '" + chart +
                                      "'");
                if (fx.christoffels.count(chart) ||
                    std::any_of(deferred.begin(), deferred.end(),
                                [&](const auto& d) { return d.first == chart; }))
                    throw ConfigError("duplicate christoffel entry for chart '" + chart + "'");
                if (need_string(gj, "kind", "christoffel entry") == "pushforward")
                    deferred.emplace_back(chart,
                                          need_string(gj, "from", "pushforward christoffel"));
                else
                    fx.christoffels.emplace(chart, christoffel_from_json(gj, chart, dim));
            }
            while (!deferred.empty()) {
                std::size_t before = deferred.size();
                for (auto it = deferred.begin(); it != deferred.end();) {
                    auto src = fx.christoffels.find(it->second);
                    if (src != fx.christoffels.end()) {
                        if (!fx.atlas.has_transition(it->first, it->second) ||
                            !fx.atlas.has_transition(it->second, it->first))
                            throw ConfigError("pushforward christoffel for chart '" +
                                              it->first +
                                              "' needs transitions in both directions");
                        fx.christoffels.emplace(
                            it->first,
                            pushforward_christoffel(fx.atlas, src->second, it->first));
                        it = deferred.erase(it);
                    } else {
                        ++it;
                    }
                }
                if (deferred.size() == before)
                    throw ConfigError("pushforward christoffel for chart '" +
                                      deferred.front().first + "' has unresolved source '" +
                                      deferred.front().second + "'");
            }
        }

        if (doc.contains("metrics"))
            for (const json& mj : doc.at("metrics")) {
                std::string chart = need_string(mj, "chart", "metric entry");
                if (!fx.atlas.has_chart(chart))
                    throw ConfigError("metric entry references unknown chart '" + chart + "'");
                fx.metrics.emplace(chart,
                                   metric_from_exprs(string_table(need(mj, "entries",
                                                                       "metric entry"),
                                                                  dim, "metric entries"),
                                                     dim));
            }

        if (doc.contains("tower")) {
            const json& tw = doc.at("tower");
            const json& dims_j = need(tw, "dims", "tower");
            if (!dims_j.is_array() || dims_j.empty())
                throw ConfigError("tower dims must be a nonempty array");
            std::vector<int> dims;
            for (const json& d : dims_j) {
                if (!d.is_number_integer() || d.get<int>() < 1)
                    throw ConfigError("tower dims must be positive integers");
                dims.push_back(d.get<int>());
            }
            std::string rho_kind =
                tw.contains("rho") ? tw.at("rho").get<std::string>() : "truncation";
            if (rho_kind != "truncation")
                throw ConfigError("unknown tower rho kind '" + rho_kind + "'");
            Tower tower = Tower::truncation(dims);
            if (tw.contains("rho_overrides"))
                for (const json& ov : tw.at("rho_overrides")) {
                    int j = need(ov, "j", "rho override").get<int>();
                    int i = need(ov, "i", "rho override").get<int>();
                    const json& rows = need(ov, "matrix", "rho override");
                    if (j < 1 || j > tower.depth() || i < 1 || i >= j)
                        throw ConfigError("rho override needs levels 1 <= i < j <= depth");
                    Mat m(tower.dim(i), tower.dim(j));
                    if (!rows.is_array() || static_cast<int>(rows.size()) != m.rows())
                        throw ConfigError("rho override matrix has wrong row count");
                    for (int r = 0; r < m.rows(); ++r)
                        m.row(r) = vec_from(rows[static_cast<std::size_t>(r)],
                                            static_cast<int>(m.cols()), "rho override row")
                                       .transpose();
                    tower.set_rho(j, i, std::move(m));
                }
            TowerChristoffel gammas;
            for (int level = 1; level <= tower.depth(); ++level)
                gammas.levels.push_back(
                    ChristoffelField::zero(level_chart_id(level), tower.dim(level)));
            if (tw.contains("christoffels"))
                for (const json& gj : tw.at("christoffels")) {
                    int level = need(gj, "level", "tower christoffel").get<int>();
                    if (level < 1 || level > tower.depth())
                        throw ConfigError("tower christoffel level outside 1..depth");
                    gammas.levels[static_cast<std::size_t>(level - 1)] = christoffel_from_json(
                        gj, level_chart_id(level), tower.dim(level));
                }
            fx.tower = std::move(tower);
            fx.tower_gammas = std::move(gammas);
        }

        if (fx.atlas.chart_ids().empty() && !fx.tower)
            throw ConfigError("fixture needs charts or a tower");

        return fx;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("fixture document: ") + e.what());
    }
}

Fixture load_fixture_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open fixture file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("fixture file '" + path + "': " + e.what());
    }
    return load_fixture(doc);
}

}  // namespace t2m
