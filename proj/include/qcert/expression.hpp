#pragma once

// A small arithmetic language for scalar fields:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          (right-associative)
//   primary := number | x<k> | fn '(' args ')' | '(' expr ')'
//
// Variables are x1..xn. Functions: exp, log, sqrt, abs (one argument),
// min, max (two arguments).

#include <qcert/error.hpp>
#include <qcert/function_model.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qcert {

class Expression {
public:
    enum class Kind { number, variable, negate, add, subtract, multiply, divide, power, call };
    enum class Function { exp, log, sqrt, abs, min, max };

    struct Node {
        Kind kind = Kind::number;
        double value = 0.0;         // number
        std::size_t index = 0;      // variable, 0-based
        Function fn = Function::exp;
        std::vector<std::shared_ptr<const Node>> children;
    };

    Expression() = default;
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    const Node& root() const { return *root_; }
    bool empty() const { return !root_; }

    /// Number of variables referenced, i.e. the largest k in x<k>.
    std::size_t arity() const { return root_ ? arity(*root_) : 0; }

    double operator()(std::span<const double> x) const { return eval(*root_, x); }

    /// Canonical, fully parenthesized text that parses back to an equal tree.
    std::string to_string() const { return root_ ? print(*root_) : std::string(); }

    static const char* name(Function f) {
        switch (f) {
            case Function::exp: return "exp";
            case Function::log: return "log";
            case Function::sqrt: return "sqrt";
            case Function::abs: return "abs";
            case Function::min: return "min";
            case Function::max: return "max";
        }
        return "?";
    }

private:
    static std::size_t arity(const Node& n) {
        std::size_t a = n.kind == Kind::variable ? n.index + 1 : 0;
        for (const auto& c : n.children) a = std::max(a, arity(*c));
        return a;
    }

    static double finite_or_throw(double v) {
        if (!std::isfinite(v)) throw Error(ErrorKind::Overflow, "expression evaluated to a non-finite value");
        return v;
    }

    static double eval(const Node& n, std::span<const double> x) {
        switch (n.kind) {
            case Kind::number: return n.value;
            case Kind::variable:
                if (n.index >= x.size()) throw Error(ErrorKind::DimensionMismatch, "variable beyond point dimension");
                return x[n.index];
            case Kind::negate: return -eval(*n.children[0], x);
            case Kind::add: {
                const double a = eval(*n.children[0], x);
                return finite_or_throw(a + eval(*n.children[1], x));
            }
            case Kind::subtract: {
                const double a = eval(*n.children[0], x);
                return finite_or_throw(a - eval(*n.children[1], x));
            }
            case Kind::multiply: {
                const double a = eval(*n.children[0], x);
                return finite_or_throw(a * eval(*n.children[1], x));
            }
            case Kind::divide: {
                const double a = eval(*n.children[0], x);
                const double b = eval(*n.children[1], x);
                if (b == 0.0) throw Error(ErrorKind::DomainError, "division by zero");
                return finite_or_throw(a / b);
            }
            case Kind::power: {
                const double a = eval(*n.children[0], x);
                const double b = eval(*n.children[1], x);
                if (a < 0.0 && std::trunc(b) != b) throw Error(ErrorKind::DomainError, "negative base with fractional exponent");
                if (a == 0.0 && b < 0.0) throw Error(ErrorKind::DomainError, "zero to a negative power");
                return finite_or_throw(std::pow(a, b));
            }
            case Kind::call: {
                const double a = eval(*n.children[0], x);
                switch (n.fn) {
                    case Function::exp: return finite_or_throw(std::exp(a));
                    case Function::log:
                        if (!(a > 0.0)) throw Error(ErrorKind::DomainError, "log of a non-positive value");
                        return std::log(a);
                    case Function::sqrt:
                        if (a < 0.0) throw Error(ErrorKind::DomainError, "sqrt of a negative value");
                        return std::sqrt(a);
                    case Function::abs: return std::abs(a);
                    case Function::min: return std::min(a, eval(*n.children[1], x));
                    case Function::max: return std::max(a, eval(*n.children[1], x));
                }
                break;
            }
        }
        throw Error(ErrorKind::DomainError, "malformed expression node");
    }

    static std::string print(const Node& n) {
        auto bin = [&](const char* op) {
            return "(" + print(*n.children[0]) + " " + op + " " + print(*n.children[1]) + ")";
        };
        switch (n.kind) {
            case Kind::number: {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
                return buf;
            }
            case Kind::variable: return "x" + std::to_string(n.index + 1);
            case Kind::negate: return "(-" + print(*n.children[0]) + ")";
            case Kind::add: return bin("+");
            case Kind::subtract: return bin("-");
            case Kind::multiply: return bin("*");
            case Kind::divide: return bin("/");
            case Kind::power: return bin("^");
            case Kind::call: {
                std::string s = std::string(name(n.fn)) + "(";
                for (std::size_t i = 0; i < n.children.size(); ++i) s += (i ? ", " : "") + print(*n.children[i]);
                return s + ")";
            }
        }
        return "?";
    }

    std::shared_ptr<const Node> root_;
};

namespace detail {

class ExpressionParser {
public:
    ExpressionParser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

    Expression parse() {
        skip_space();
        auto root = parse_expr();
        skip_space();
        if (pos_ != text_.size()) throw ParseError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        return Expression(std::move(root));
    }

private:
    using NodePtr = std::shared_ptr<const Expression::Node>;
    using Kind = Expression::Kind;

    static NodePtr make(Kind kind, std::vector<NodePtr> children) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = kind;
        n->children = std::move(children);
        return n;
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            skip_space();
            throw ParseError(pos_, std::string("expected '") + c + "'");
        }
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make(Kind::add, {lhs, parse_term()});
            else if (accept('-')) lhs = make(Kind::subtract, {lhs, parse_term()});
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(Kind::multiply, {lhs, parse_unary()});
            else if (accept('/')) lhs = make(Kind::divide, {lhs, parse_unary()});
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(Kind::negate, {parse_unary()});
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make(Kind::power, {base, parse_unary()});
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError(pos_, "expected an operand, found end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(pos_, "expected an operand, found '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) ++end;
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
            if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
                end = e;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
        if (ec != std::errc() || ptr != text_.data() + end || !std::isfinite(value))
            throw ParseError(start, "malformed number");
        pos_ = end;
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::number;
        n->value = value;
        return n;
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view id = text_.substr(start, pos_ - start);

        if (id.size() >= 2 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string_view::npos) {
            std::size_t k = 0;
            const auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), k);
            if (ec != std::errc() || k == 0) throw ParseError(start, "variables are numbered from x1");
            if (dim_ != 0 && k > dim_)
                throw ParseError(start, "variable " + std::string(id) + " exceeds dimension " + std::to_string(dim_));
            auto n = std::make_shared<Expression::Node>();
            n->kind = Kind::variable;
            n->index = k - 1;
            return n;
        }

        static constexpr struct {
            std::string_view name;
            Expression::Function fn;
            std::size_t args;
        } table[] = {
            {"exp", Expression::Function::exp, 1},   {"log", Expression::Function::log, 1},
            {"sqrt", Expression::Function::sqrt, 1}, {"abs", Expression::Function::abs, 1},
            {"min", Expression::Function::min, 2},   {"max", Expression::Function::max, 2},
        };
        for (const auto& entry : table) {
            if (entry.name != id) continue;
            expect('(');
            std::vector<NodePtr> args{parse_expr()};
            while (accept(',')) args.push_back(parse_expr());
            if (args.size() != entry.args) {
                throw ParseError(start, std::string(entry.name) + " takes " + std::to_string(entry.args) + " argument(s)");
            }
            expect(')');
            auto n = std::make_shared<Expression::Node>();
            n->kind = Kind::call;
            n->fn = entry.fn;
            n->children = std::move(args);
            return n;
        }
        throw ParseError(start, "unknown identifier '" + std::string(id) + "'");
    }

    std::string_view text_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses expression text. dim = 0 accepts any x<k>; otherwise k <= dim.
inline Expression parse(std::string_view text, std::size_t dim = 0) {
    return detail::ExpressionParser(text, dim).parse();
}

inline double eval_expression(const Expression& e, std::span<const double> x) { return e(x); }

/// Wraps an expression as a field without analytic gradient.
inline ScalarField to_field(const Expression& e, std::size_t dim) {
    if (e.arity() > dim) throw Error(ErrorKind::DimensionMismatch, "expression uses more variables than the domain has");
    return ScalarField{dim, [e](const Vector& x) { return e(x); }, {}};
}

} // namespace qcert
