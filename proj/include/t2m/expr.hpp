#pragma once

#include <memory>

#include "t2m/connection.hpp"

namespace t2m {

// One scalar expression over the variables y1..yn, with +, -, *, /, ^
// (right-associative, binding tighter than unary minus), the functions
// sin, cos, exp, sqrt, log, atan, the two-argument atan2, and the constant
// pi.  Parsed once, evaluable over plain numbers or second-order duals, so
// the same text drives values and exact derivatives.
class Expr {
public:
    struct Node;  // parse-tree node; defined with the parser

    Expr() = default;

    // Throws ConfigError with line and column on malformed input.
    static Expr parse(const std::string& text, int nvars);

    bool valid() const { return static_cast<bool>(root_); }
    int nvars() const { return nvars_; }
    const std::string& text() const { return text_; }

    double eval(const Vec& y) const;
    HyperDual eval(const HDVector& y) const;

private:
    std::shared_ptr<const Node> root_;
    int nvars_ = 0;
    std::string text_;
};

// A map whose components are expressions of y1..yn; derivatives come from
// dual propagation through the parsed trees.
Map2 expr_map(const std::vector<std::string>& components, int nvars,
              Predicate domain = Predicate::all());

// Christoffel field with coefficient entries given as expressions:
// entries[k][i][j] is the (i, j) entry of the k-th coefficient matrix.
ChristoffelField christoffel_from_exprs(
    std::string chart_id, int dim,
    const std::vector<std::vector<std::vector<std::string>>>& entries);

}  // namespace t2m
