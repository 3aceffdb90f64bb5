#include "t2m/expr.hpp"

#include <cctype>
#include <cmath>

namespace t2m {

struct Expr::Node {
    enum class Kind { number, variable, add, sub, mul, div, pow, neg, call1, call2 };

    Kind kind;
    double number = 0.0;
    int var = 0;
    int func = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

constexpr const char* kUnaryNames[] = {"sin", "cos", "exp", "sqrt", "log", "atan"};
constexpr int kUnaryCount = 6;

NodePtr make(Kind kind, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& text, int nvars) : s_(text), nvars_(nvars) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ < s_.size()) fail("unexpected trailing input");
        if (!e) fail("empty expression");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(msg + " at line " + std::to_string(line_) + ", column " +
                          std::to_string(col_));
    }

    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = make(Kind::add, lhs, term());
            } else if (accept('-')) {
                lhs = make(Kind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            if (accept('*')) {
                lhs = make(Kind::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Kind::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    // '^' binds tighter than unary minus: -y1^2 parses as -(y1^2), and the
    // exponent may itself carry a sign: y1^-2.
    NodePtr unary() {
        if (accept('-')) return make(Kind::neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Kind::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        char c = peek();
        if (c == '(') {
            advance();
            NodePtr inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("expected a number, variable, function, or parenthesized expression");
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            advance();
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                advance();
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_;
            advance();
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) advance();
            if (pos_ == s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                pos_ = mark;  // the 'e' was not an exponent
            } else {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    advance();
            }
        }
        std::string tok = s_.substr(start, pos_ - start);
        if (tok == ".") fail("malformed number");
        auto n = std::make_shared<Expr::Node>();
        n->kind = Kind::number;
        n->number = std::stod(tok);
        return n;
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '_'))
            advance();
        std::string name = s_.substr(start, pos_ - start);
        if (name == "pi") {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Kind::number;
            n->number = 3.14159265358979323846;
            return n;
        }
        if (name == "atan2") {
            expect('(');
            NodePtr a = expr();
            expect(',');
            NodePtr b = expr();
            expect(')');
            return make(Kind::call2, a, b);
        }
        for (int f = 0; f < kUnaryCount; ++f)
            if (name == kUnaryNames[f]) {
                expect('(');
                NodePtr a = expr();
                expect(')');
                auto n = std::make_shared<Expr::Node>();
                n->kind = Kind::call1;
                n->func = f;
                n->a = std::move(a);
                return n;
            }
        if (name.size() >= 2 && name[0] == 'y') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::stoi(name.substr(1));
                if (idx < 1 || idx > nvars_)
                    fail("variable '" + name + "' outside y1..y" + std::to_string(nvars_));
                auto n = std::make_shared<Expr::Node>();
                n->kind = Kind::variable;
                n->var = idx - 1;
                return n;
            }
        }
        fail("unknown name '" + name + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int nvars_;
};

template <class T>
T eval_node(const Expr::Node& n, const std::vector<T>& vars) {
    using std::atan;
    using std::atan2;
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    switch (n.kind) {
        case Kind::number:
            return T(n.number);
        case Kind::variable:
            return vars[static_cast<std::size_t>(n.var)];
        case Kind::add:
            return eval_node(*n.a, vars) + eval_node(*n.b, vars);
        case Kind::sub:
            return eval_node(*n.a, vars) - eval_node(*n.b, vars);
        case Kind::mul:
            return eval_node(*n.a, vars) * eval_node(*n.b, vars);
        case Kind::div:
            return eval_node(*n.a, vars) / eval_node(*n.b, vars);
        case Kind::pow:
            return pow(eval_node(*n.a, vars), eval_node(*n.b, vars));
        case Kind::neg:
            return -eval_node(*n.a, vars);
        case Kind::call1: {
            T a = eval_node(*n.a, vars);
            switch (n.func) {
                case 0: return sin(a);
                case 1: return cos(a);
                case 2: return exp(a);
                case 3: return sqrt(a);
                case 4: return log(a);
                default: return atan(a);
            }
        }
        case Kind::call2:
            return atan2(eval_node(*n.a, vars), eval_node(*n.b, vars));
    }
    throw ParameterError("unreachable expression node");
}

}  // namespace

Expr Expr::parse(const std::string& text, int nvars) {
    if (nvars < 0) throw ParameterError("variable count must be nonnegative");
    Expr e;
    e.root_ = Parser(text, nvars).run();
    e.nvars_ = nvars;
    e.text_ = text;
    return e;
}

double Expr::eval(const Vec& y) const {
    if (!root_) throw ParameterError("expression is empty");
    if (y.size() != nvars_)
        throw ShapeError("expression over " + std::to_string(nvars_) + " variables given " +
                         std::to_string(y.size()));
    std::vector<double> vars(static_cast<std::size_t>(nvars_));
    for (int i = 0; i < nvars_; ++i) vars[static_cast<std::size_t>(i)] = y[i];
    return eval_node(*root_, vars);
}

HyperDual Expr::eval(const HDVector& y) const {
    if (!root_) throw ParameterError("expression is empty");
    if (static_cast<int>(y.size()) != nvars_)
        throw ShapeError("expression over " + std::to_string(nvars_) + " variables given " +
                         std::to_string(y.size()));
    return eval_node(*root_, y);
}

Map2 expr_map(const std::vector<std::string>& components, int nvars, Predicate domain) {
    std::vector<Expr> parsed;
    parsed.reserve(components.size());
    for (const std::string& text : components) parsed.push_back(Expr::parse(text, nvars));
    const int cod = static_cast<int>(parsed.size());
    return Map2::analytic(
        nvars, cod,
        [parsed](const HDVector& y) {
            HDVector out;
            out.reserve(parsed.size());
            for (const Expr& e : parsed) out.push_back(e.eval(y));
            return out;
        },
        std::move(domain));
}

ChristoffelField christoffel_from_exprs(
    std::string chart_id, int dim,
    const std::vector<std::vector<std::vector<std::string>>>& entries) {
    if (static_cast<int>(entries.size()) != dim)
        throw ShapeError("need dim coefficient matrices, got " +
                         std::to_string(entries.size()));
    std::vector<std::vector<std::vector<Expr>>> parsed(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (static_cast<int>(entries[k].size()) != dim)
            throw ShapeError("coefficient matrix " + std::to_string(k) + " has " +
                             std::to_string(entries[k].size()) + " rows, expected " +
                             std::to_string(dim));
        parsed[k].resize(entries[k].size());
        for (std::size_t i = 0; i < entries[k].size(); ++i) {
            if (static_cast<int>(entries[k][i].size()) != dim)
                throw ShapeError("coefficient matrix " + std::to_string(k) + " row " +
                                 std::to_string(i) + " has " +
                                 std::to_string(entries[k][i].size()) + " entries, expected " +
                                 std::to_string(dim));
            for (const std::string& text : entries[k][i])
                parsed[k][i].push_back(Expr::parse(text, dim));
        }
    }
    auto coeffs = [parsed, dim](const Vec& y) {
        std::vector<Mat> out(parsed.size(), Mat(dim, dim));
        for (std::size_t k = 0; k < parsed.size(); ++k)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    out[k](i, j) = parsed[k][static_cast<std::size_t>(i)]
                                         [static_cast<std::size_t>(j)]
                                             .eval(y);
        return out;
    };
    return ChristoffelField(std::move(chart_id), dim, coeffs);
}

}  // namespace t2m
