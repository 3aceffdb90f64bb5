#include "t2m/fixtures.hpp"

namespace t2m {

namespace {

// Flat plane: Cartesian chart on the slit plane (the closed left half-axis
// removed so the angle is single-valued) and a polar chart with r > 0,
// -pi < theta < pi.  The Cartesian field is zero; the polar field is its
// pushforward across the chart change.
constexpr const char* kFlat = R"json({
  "name": "flat-cartesian-polar",
  "description": "Flat plane in Cartesian and polar charts; the polar field is the pushforward of the zero field",
  "dim": 2,
  "charts": [
    {"id": "cart",
     "domain": {"kind": "any_of", "of": [
       {"kind": "pos", "expr": "y2"},
       {"kind": "pos", "expr": "-y2"},
       {"kind": "pos", "expr": "y1"}]}},
    {"id": "polar",
     "domain": {"kind": "all_of", "of": [
       {"kind": "pos", "expr": "y1"},
       {"kind": "pos", "expr": "y2+pi"},
       {"kind": "pos", "expr": "pi-y2"}]}}
  ],
  "transitions": [
    {"to": "cart", "from": "polar",
     "map": ["y1*cos(y2)", "y1*sin(y2)"],
     "samples": [[1.0, 0.5], [2.0, -1.0], [0.7, 2.5], [1.5, -2.8], [1.2, 0.0]]},
    {"to": "polar", "from": "cart",
     "map": ["sqrt(y1^2+y2^2)", "atan2(y2,y1)"],
     "samples": [[1.0, 0.0], [1.0, 1.0], [-1.0, 0.5], [0.3, -2.0], [2.0, -1.0]]}
  ],
  "christoffels": [
    {"chart": "cart", "kind": "zero"},
    {"chart": "polar", "kind": "pushforward", "from": "cart"}
  ],
  "metrics": [
    {"chart": "cart", "entries": [["1", "0"], ["0", "1"]]},
    {"chart": "polar", "entries": [["1", "0"], ["0", "y1^2"]]}
  ]
})json";

// Same plane, but the polar field is written out with one entry shifted by
// 0.1, so every cross-chart law must fail loudly.
constexpr const char* kFlatFaultGamma = R"json({
  "name": "flat-cartesian-polar-fault-gamma",
  "description": "Flat fixture with one polar Christoffel entry shifted by 0.1; cross-chart checks must fail",
  "dim": 2,
  "charts": [
    {"id": "cart",
     "domain": {"kind": "any_of", "of": [
       {"kind": "pos", "expr": "y2"},
       {"kind": "pos", "expr": "-y2"},
       {"kind": "pos", "expr": "y1"}]}},
    {"id": "polar",
     "domain": {"kind": "all_of", "of": [
       {"kind": "pos", "expr": "y1"},
       {"kind": "pos", "expr": "y2+pi"},
       {"kind": "pos", "expr": "pi-y2"}]}}
  ],
  "transitions": [
    {"to": "cart", "from": "polar",
     "map": ["y1*cos(y2)", "y1*sin(y2)"],
     "samples": [[1.0, 0.5], [2.0, -1.0], [0.7, 2.5], [1.5, -2.8], [1.2, 0.0]]},
    {"to": "polar", "from": "cart",
     "map": ["sqrt(y1^2+y2^2)", "atan2(y2,y1)"],
     "samples": [[1.0, 0.0], [1.0, 1.0], [-1.0, 0.5], [0.3, -2.0], [2.0, -1.0]]}
  ],
  "christoffels": [
    {"chart": "cart", "kind": "zero"},
    {"chart": "polar", "kind": "expr", "entries": [
      [["0", "0"], ["0", "-y1+0.1"]],
      [["0", "1/y1"], ["1/y1", "0"]]]}
  ],
  "metrics": [
    {"chart": "cart", "entries": [["1", "0"], ["0", "1"]]},
    {"chart": "polar", "entries": [["1", "0"], ["0", "y1^2"]]}
  ]
})json";

// Round sphere through three stereographic charts: from the north pole, the
// south pole, and the east pole (1,0,0).  Every chart sees the round metric
// as the same conformal expression, and the Christoffel entries below are
// its closed-form symbols, so all structural identities hold to rounding.
constexpr const char* kSphere = R"json({
  "name": "sphere-stereographic-3chart",
  "description": "Round sphere with three stereographic charts and the conformal round-metric fields",
  "dim": 2,
  "charts": [
    {"id": "n"}, {"id": "s"}, {"id": "e"}
  ],
  "transitions": [
    {"to": "s", "from": "n",
     "map": ["y1/(y1^2+y2^2)", "y2/(y1^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+y2^2"},
     "samples": [[1.0, 0.0], [0.5, 0.5], [-1.0, 2.0], [0.3, -0.7], [2.0, 1.0]]},
    {"to": "n", "from": "s",
     "map": ["y1/(y1^2+y2^2)", "y2/(y1^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+y2^2"},
     "samples": [[1.0, 0.0], [0.4, -0.6], [-1.5, 1.0], [2.0, 2.0], [0.2, 0.9]]},
    {"to": "e", "from": "n",
     "map": ["2*y2/((y1-1)^2+y2^2)", "(y1^2+y2^2-1)/((y1-1)^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "(y1-1)^2+y2^2"},
     "samples": [[0.0, 0.0], [0.5, 0.5], [-1.0, 0.3], [2.0, -1.0], [0.7, -0.2]]},
    {"to": "n", "from": "e",
     "map": ["(y1^2+y2^2-1)/(y1^2+(y2-1)^2)", "2*y1/(y1^2+(y2-1)^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+(y2-1)^2"},
     "samples": [[0.5, 0.3], [1.2, -0.7], [-0.9, 0.4], [2.0, 1.0], [-1.5, -2.0]]},
    {"to": "e", "from": "s",
     "map": ["2*y2/((y1-1)^2+y2^2)", "(1-y1^2-y2^2)/((y1-1)^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "(y1-1)^2+y2^2"},
     "samples": [[0.0, 0.0], [0.6, 0.4], [-1.0, 0.5], [1.5, -1.0], [0.2, 0.8]]},
    {"to": "s", "from": "e",
     "map": ["(y1^2+y2^2-1)/(y1^2+(y2+1)^2)", "2*y1/(y1^2+(y2+1)^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+(y2+1)^2"},
     "samples": [[0.5, 0.3], [1.2, -0.7], [-0.9, 0.4], [2.0, 1.0], [0.3, 2.0]]}
  ],
  "triple_overlaps": [
    {"charts": ["n", "s", "e"],
     "samples": [[0.5, 0.3], [1.2, -0.7], [-0.9, 0.4], [2.0, 1.0], [-1.5, -2.0]]}
  ],
  "christoffels": [
    {"chart": "n", "kind": "expr", "entries": [
      [["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"],
       ["-2*y2/(1+y1^2+y2^2)", "2*y1/(1+y1^2+y2^2)"]],
      [["2*y2/(1+y1^2+y2^2)", "-2*y1/(1+y1^2+y2^2)"],
       ["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"]]]},
    {"chart": "s", "kind": "expr", "entries": [
      [["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"],
       ["-2*y2/(1+y1^2+y2^2)", "2*y1/(1+y1^2+y2^2)"]],
      [["2*y2/(1+y1^2+y2^2)", "-2*y1/(1+y1^2+y2^2)"],
       ["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"]]]},
    {"chart": "e", "kind": "expr", "entries": [
      [["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"],
       ["-2*y2/(1+y1^2+y2^2)", "2*y1/(1+y1^2+y2^2)"]],
      [["2*y2/(1+y1^2+y2^2)", "-2*y1/(1+y1^2+y2^2)"],
       ["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"]]]}
  ],
  "metrics": [
    {"chart": "n", "entries": [["4/(1+y1^2+y2^2)^2", "0"], ["0", "4/(1+y1^2+y2^2)^2"]]},
    {"chart": "s", "entries": [["4/(1+y1^2+y2^2)^2", "0"], ["0", "4/(1+y1^2+y2^2)^2"]]},
    {"chart": "e", "entries": [["4/(1+y1^2+y2^2)^2", "0"], ["0", "4/(1+y1^2+y2^2)^2"]]}
  ]
})json";

// Sphere with the north chart's field corrupted in one entry.
constexpr const char* kSphereFaultGamma = R"json({
  "name": "sphere-stereographic-3chart-fault-gamma",
  "description": "Sphere fixture with one north-chart Christoffel entry shifted by 0.1; cross-chart checks must fail",
  "dim": 2,
  "charts": [
    {"id": "n"}, {"id": "s"}, {"id": "e"}
  ],
  "transitions": [
    {"to": "s", "from": "n",
     "map": ["y1/(y1^2+y2^2)", "y2/(y1^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+y2^2"},
     "samples": [[1.0, 0.0], [0.5, 0.5], [-1.0, 2.0], [0.3, -0.7], [2.0, 1.0]]},
    {"to": "n", "from": "s",
     "map": ["y1/(y1^2+y2^2)", "y2/(y1^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+y2^2"},
     "samples": [[1.0, 0.0], [0.4, -0.6], [-1.5, 1.0], [2.0, 2.0], [0.2, 0.9]]},
    {"to": "e", "from": "n",
     "map": ["2*y2/((y1-1)^2+y2^2)", "(y1^2+y2^2-1)/((y1-1)^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "(y1-1)^2+y2^2"},
     "samples": [[0.0, 0.0], [0.5, 0.5], [-1.0, 0.3], [2.0, -1.0], [0.7, -0.2]]},
    {"to": "n", "from": "e",
     "map": ["(y1^2+y2^2-1)/(y1^2+(y2-1)^2)", "2*y1/(y1^2+(y2-1)^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+(y2-1)^2"},
     "samples": [[0.5, 0.3], [1.2, -0.7], [-0.9, 0.4], [2.0, 1.0], [-1.5, -2.0]]},
    {"to": "e", "from": "s",
     "map": ["2*y2/((y1-1)^2+y2^2)", "(1-y1^2-y2^2)/((y1-1)^2+y2^2)"],
     "domain": {"kind": "pos", "expr": "(y1-1)^2+y2^2"},
     "samples": [[0.0, 0.0], [0.6, 0.4], [-1.0, 0.5], [1.5, -1.0], [0.2, 0.8]]},
    {"to": "s", "from": "e",
     "map": ["(y1^2+y2^2-1)/(y1^2+(y2+1)^2)", "2*y1/(y1^2+(y2+1)^2)"],
     "domain": {"kind": "pos", "expr": "y1^2+(y2+1)^2"},
     "samples": [[0.5, 0.3], [1.2, -0.7], [-0.9, 0.4], [2.0, 1.0], [0.3, 2.0]]}
  ],
  "triple_overlaps": [
    {"charts": ["n", "s", "e"],
     "samples": [[0.5, 0.3], [1.2, -0.7], [-0.9, 0.4], [2.0, 1.0], [-1.5, -2.0]]}
  ],
  "christoffels": [
    {"chart": "n", "kind": "expr", "entries": [
      [["-2*y1/(1+y1^2+y2^2)+0.1", "-2*y2/(1+y1^2+y2^2)"],
       ["-2*y2/(1+y1^2+y2^2)", "2*y1/(1+y1^2+y2^2)"]],
      [["2*y2/(1+y1^2+y2^2)", "-2*y1/(1+y1^2+y2^2)"],
       ["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"]]]},
    {"chart": "s", "kind": "expr", "entries": [
      [["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"],
       ["-2*y2/(1+y1^2+y2^2)", "2*y1/(1+y1^2+y2^2)"]],
      [["2*y2/(1+y1^2+y2^2)", "-2*y1/(1+y1^2+y2^2)"],
       ["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"]]]},
    {"chart": "e", "kind": "expr", "entries": [
      [["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"],
       ["-2*y2/(1+y1^2+y2^2)", "2*y1/(1+y1^2+y2^2)"]],
      [["2*y2/(1+y1^2+y2^2)", "-2*y1/(1+y1^2+y2^2)"],
       ["-2*y1/(1+y1^2+y2^2)", "-2*y2/(1+y1^2+y2^2)"]]]}
  ],
  "metrics": [
    {"chart": "n", "entries": [["4/(1+y1^2+y2^2)^2", "0"], ["0", "4/(1+y1^2+y2^2)^2"]]},
    {"chart": "s", "entries": [["4/(1+y1^2+y2^2)^2", "0"], ["0", "4/(1+y1^2+y2^2)^2"]]},
    {"chart": "e", "entries": [["4/(1+y1^2+y2^2)^2", "0"], ["0", "4/(1+y1^2+y2^2)^2"]]}
  ]
})json";

// Depth-4 coordinate-truncation tower.  The level fields add a per-level
// diagonal quadratic term to a shared first-coordinate term, so truncation
// carries each level's field exactly onto the next.
constexpr const char* kTower = R"json({
  "name": "truncation-tower-d4",
  "description": "Depth-4 coordinate-truncation tower with a compatible quadratic field family",
  "dim": 4,
  "tower": {
    "dims": [1, 2, 3, 4],
    "rho": "truncation",
    "christoffels": [
      {"level": 1, "kind": "expr", "entries": [
        [["y1^2+0.5*y1"]]]},
      {"level": 2, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0"], ["0", "0"]],
        [["0.5*y1", "0"], ["0", "y2^2"]]]},
      {"level": 3, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
        [["0.5*y1", "0", "0"], ["0", "y2^2", "0"], ["0", "0", "0"]],
        [["0.5*y1", "0", "0"], ["0", "0", "0"], ["0", "0", "y3^2"]]]},
      {"level": 4, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "y2^2", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "y3^2", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "y4^2"]]]}
    ]
  }
})json";

// Tower with one connecting map perturbed: composition identities break.
constexpr const char* kTowerFaultRho = R"json({
  "name": "truncation-tower-d4-fault-rho",
  "description": "Truncation tower with the 3->2 connecting map perturbed; structural checks must fail",
  "dim": 4,
  "tower": {
    "dims": [1, 2, 3, 4],
    "rho": "truncation",
    "rho_overrides": [
      {"j": 3, "i": 2, "matrix": [[1.0, 0.0, 0.05], [0.0, 1.0, 0.0]]}
    ],
    "christoffels": [
      {"level": 1, "kind": "expr", "entries": [
        [["y1^2+0.5*y1"]]]},
      {"level": 2, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0"], ["0", "0"]],
        [["0.5*y1", "0"], ["0", "y2^2"]]]},
      {"level": 3, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
        [["0.5*y1", "0", "0"], ["0", "y2^2", "0"], ["0", "0", "0"]],
        [["0.5*y1", "0", "0"], ["0", "0", "0"], ["0", "0", "y3^2"]]]},
      {"level": 4, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "y2^2", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "y3^2", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "y4^2"]]]}
    ]
  }
})json";

// Tower with the level-2 field corrupted: equivariance breaks against both
// the levels above and below.
constexpr const char* kTowerFaultGamma = R"json({
  "name": "truncation-tower-d4-fault-gamma",
  "description": "Truncation tower with the level-2 field corrupted; projection compatibility must fail",
  "dim": 4,
  "tower": {
    "dims": [1, 2, 3, 4],
    "rho": "truncation",
    "christoffels": [
      {"level": 1, "kind": "expr", "entries": [
        [["y1^2+0.5*y1"]]]},
      {"level": 2, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0"], ["0", "0.1"]],
        [["0.5*y1", "0"], ["0", "y2^2"]]]},
      {"level": 3, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
        [["0.5*y1", "0", "0"], ["0", "y2^2", "0"], ["0", "0", "0"]],
        [["0.5*y1", "0", "0"], ["0", "0", "0"], ["0", "0", "y3^2"]]]},
      {"level": 4, "kind": "expr", "entries": [
        [["y1^2+0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "y2^2", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "y3^2", "0"], ["0", "0", "0", "0"]],
        [["0.5*y1", "0", "0", "0"], ["0", "0", "0", "0"],
         ["0", "0", "0", "0"], ["0", "0", "0", "y4^2"]]]}
    ]
  }
})json";

const std::pair<const char*, const char*> kBuiltins[] = {
    {"flat-cartesian-polar", kFlat},
    {"sphere-stereographic-3chart", kSphere},
    {"truncation-tower-d4", kTower},
    {"flat-cartesian-polar-fault-gamma", kFlatFaultGamma},
    {"sphere-stereographic-3chart-fault-gamma", kSphereFaultGamma},
    {"truncation-tower-d4-fault-rho", kTowerFaultRho},
    {"truncation-tower-d4-fault-gamma", kTowerFaultGamma},
};

}  // namespace

std::vector<FixtureInfo> builtin_fixtures() {
    std::vector<FixtureInfo> out;
    for (const auto& [name, text] : kBuiltins) {
        nlohmann::json doc = nlohmann::json::parse(text);
        out.push_back({name, doc.value("description", "")});
    }
    return out;
}

bool is_builtin_fixture(const std::string& name) {
    for (const auto& [builtin, text] : kBuiltins)
        if (name == builtin) return true;
    return false;
}

nlohmann::json builtin_fixture_json(const std::string& name) {
    for (const auto& [builtin, text] : kBuiltins)
        if (name == builtin) return nlohmann::json::parse(text);
    throw ConfigError("unknown built-in fixture '" + name + "'");
}

Fixture load_builtin_fixture(const std::string& name) {
    return load_fixture(builtin_fixture_json(name));
}

}  // namespace t2m
