#pragma once

#include <optional>

#include <json.hpp>

#include "t2m/expr.hpp"
#include "t2m/prolim.hpp"

namespace t2m {

// A loaded fixture manifold: atlas, per-chart Christoffel fields, and an
// optional level tower with its per-level fields.
struct Fixture {
    explicit Fixture(int dim) : atlas(dim) {}

    int dim() const { return atlas.model_dim(); }

    std::string name;
    std::string description;
    Atlas atlas;
    std::map<std::string, ChristoffelField> christoffels;
    // Optional per-chart metric tensors, kept for derivative-based
    // cross-checks against the declared fields.
    std::map<std::string, MetricFn> metrics;
    std::optional<Tower> tower;
    std::optional<TowerChristoffel> tower_gammas;
};

// Open-set predicate from its JSON description.  Kinds:
//   {"kind": "all"}
//   {"kind": "ball", "center": [...], "radius": r}           (open, |y-c| < r)
//   {"kind": "box", "lo": [...], "hi": [...]}                (open box)
//   {"kind": "pos", "expr": "..."}                           (expression > 0)
//   {"kind": "all_of" | "any_of", "of": [preds...]}
//   {"kind": "not", "of": pred}
Predicate predicate_from_json(const nlohmann::json& j, int dim);

// Christoffel field from its JSON description.  Kinds:
//   {"chart": id, "kind": "zero"}
//   {"chart": id, "kind": "expr", "entries": [[[...]]] }     (dim^3 expressions)
//   {"chart": id, "kind": "metric", "metric": [[...]], "step": 1e-5}
//   {"chart": id, "kind": "pushforward", "from": other-id}
// The pushforward kind needs the atlas transitions in both directions and
// the source chart's field, so it is resolved by load_fixture after the
// plain kinds.
ChristoffelField christoffel_from_json(const nlohmann::json& j, const std::string& chart_id,
                                       int dim);

// Parse and cross-validate a whole fixture document.  Throws ConfigError on
// structural problems, including overlap samples that fail the declared
// predicates on either side of a transition.
Fixture load_fixture(const nlohmann::json& doc);
Fixture load_fixture_file(const std::string& path);

}  // namespace t2m
