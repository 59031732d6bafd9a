#pragma once

// Small arithmetic expression language for integrands f(t,y,v) and outer
// functions H(z1..zn): parsing, exact symbolic partial derivatives, and
// evaluation. Trees are immutable values; everything here is pure.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracvar/special_functions.hpp"

namespace fracvar {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ExprAst {
public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
    // digamma is not part of the user grammar; it only appears in derivative
    // trees produced for gamma(...) with a non-constant argument.
    enum class Func { Sqrt, Exp, Ln, Sin, Cos, Gamma, Digamma };

    static ExprAst constant(double v) {
        ExprAst e;
        e.kind_ = Kind::Constant;
        e.value_ = v;
        return e;
    }
    static ExprAst variable(std::string name, int index) {
        ExprAst e;
        e.kind_ = Kind::Variable;
        e.name_ = std::move(name);
        e.index_ = index;
        return e;
    }
    static ExprAst binary(Kind k, ExprAst lhs, ExprAst rhs) {
        ExprAst e;
        e.kind_ = k;
        e.children_.reserve(2);
        e.children_.push_back(std::move(lhs));
        e.children_.push_back(std::move(rhs));
        return e;
    }
    static ExprAst negate(ExprAst operand) {
        ExprAst e;
        e.kind_ = Kind::Neg;
        e.children_.push_back(std::move(operand));
        return e;
    }
    static ExprAst call(Func f, ExprAst arg) {
        ExprAst e;
        e.kind_ = Kind::Call;
        e.func_ = f;
        e.children_.push_back(std::move(arg));
        return e;
    }

    Kind kind() const { return kind_; }
    Func func() const { return func_; }
    double value() const { return value_; }
    const std::string& name() const { return name_; }
    int index() const { return index_; }
    const ExprAst& child(std::size_t i) const { return children_[i]; }
    std::size_t child_count() const { return children_.size(); }

    bool is_constant() const { return kind_ == Kind::Constant; }
    bool is_constant(double v) const { return kind_ == Kind::Constant && value_ == v; }

    bool depends_on(std::string_view var) const {
        if (kind_ == Kind::Variable) return name_ == var;
        for (const auto& c : children_)
            if (c.depends_on(var)) return true;
        return false;
    }

private:
    Kind kind_ = Kind::Constant;
    Func func_ = Func::Sqrt;
    double value_ = 0.0;
    int index_ = -1;
    std::string name_;
    std::vector<ExprAst> children_;
};

namespace detail {

inline std::optional<ExprAst::Func> lookup_function(std::string_view name) {
    if (name == "sqrt") return ExprAst::Func::Sqrt;
    if (name == "exp") return ExprAst::Func::Exp;
    if (name == "ln") return ExprAst::Func::Ln;
    if (name == "sin") return ExprAst::Func::Sin;
    if (name == "cos") return ExprAst::Func::Cos;
    if (name == "gamma") return ExprAst::Func::Gamma;
    return std::nullopt;
}

inline std::string_view function_name(ExprAst::Func f) {
    switch (f) {
    case ExprAst::Func::Sqrt: return "sqrt";
    case ExprAst::Func::Exp: return "exp";
    case ExprAst::Func::Ln: return "ln";
    case ExprAst::Func::Sin: return "sin";
    case ExprAst::Func::Cos: return "cos";
    case ExprAst::Func::Gamma: return "gamma";
    case ExprAst::Func::Digamma: return "digamma";
    }
    return "?";
}

// Recursive-descent parser. Precedence, loosest first:
//   add/sub < mul/div < unary minus < pow (right associative) < atoms.
class Parser {
public:
    Parser(std::string_view src, std::span<const std::string> variables)
        : src_(src), variables_(variables) {}

    ExprAst parse() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("empty expression", 0);
        ExprAst e = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError("unexpected trailing input '" +
                                 std::string(src_.substr(pos_)) + "'",
                             pos_);
        return e;
    }

private:
    ExprAst parse_sum() {
        ExprAst lhs = parse_term();
        for (;;) {
            skip_ws();
            if (consume('+'))
                lhs = ExprAst::binary(ExprAst::Kind::Add, std::move(lhs), parse_term());
            else if (consume('-'))
                lhs = ExprAst::binary(ExprAst::Kind::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    ExprAst parse_term() {
        ExprAst lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (consume('*'))
                lhs = ExprAst::binary(ExprAst::Kind::Mul, std::move(lhs), parse_unary());
            else if (consume('/'))
                lhs = ExprAst::binary(ExprAst::Kind::Div, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    ExprAst parse_unary() {
        skip_ws();
        if (consume('-'))
            return ExprAst::negate(parse_unary());
        return parse_power();
    }

    ExprAst parse_power() {
        ExprAst base = parse_atom();
        skip_ws();
        if (consume('^')) {
            // exponent may carry its own unary minus: t^-2
            return ExprAst::binary(ExprAst::Kind::Pow, std::move(base), parse_unary());
        }
        return base;
    }

    ExprAst parse_atom() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprAst inner = parse_sum();
            skip_ws();
            if (!consume(')'))
                throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprAst parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
        }
        double value = 0.0;
        const char* first = src_.data() + start;
        const char* last = src_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last)
            throw ParseError("malformed number '" +
                                 std::string(src_.substr(start, pos_ - start)) + "'",
                             start);
        return ExprAst::constant(value);
    }

    ExprAst parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            auto func = lookup_function(name);
            if (!func)
                throw ParseError("unknown function '" + name + "'", start);
            ++pos_;
            ExprAst arg = parse_sum();
            skip_ws();
            if (!consume(')'))
                throw ParseError("expected ')' after argument of '" + name + "'", pos_);
            return ExprAst::call(*func, std::move(arg));
        }
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i] == name)
                return ExprAst::variable(name, static_cast<int>(i));
        throw ParseError("unknown identifier \"" + name + "\"", start);
    }

    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool consume(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view src_;
    std::span<const std::string> variables_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parse `source` over the given (distinct) variable names. Throws ParseError
/// with a position on malformed input or identifiers outside the set.
inline ExprAst parse_expression(std::string_view source,
                                const std::vector<std::string>& variables) {
    for (std::size_t i = 0; i < variables.size(); ++i)
        for (std::size_t j = i + 1; j < variables.size(); ++j)
            if (variables[i] == variables[j])
                throw std::invalid_argument("parse_expression: duplicate variable '" +
                                            variables[i] + "'");
    return detail::Parser(source, variables).parse();
}

inline double evaluate(const ExprAst& e, std::span<const double> values) {
    using K = ExprAst::Kind;
    switch (e.kind()) {
    case K::Constant:
        return e.value();
    case K::Variable:
        if (e.index() < 0 || static_cast<std::size_t>(e.index()) >= values.size())
            throw EvalError("unbound variable '" + e.name() + "'");
        return values[static_cast<std::size_t>(e.index())];
    case K::Add:
        return evaluate(e.child(0), values) + evaluate(e.child(1), values);
    case K::Sub:
        return evaluate(e.child(0), values) - evaluate(e.child(1), values);
    case K::Mul:
        return evaluate(e.child(0), values) * evaluate(e.child(1), values);
    case K::Div: {
        const double num = evaluate(e.child(0), values);
        const double den = evaluate(e.child(1), values);
        if (den == 0.0)
            throw EvalError("division by zero");
        return num / den;
    }
    case K::Pow: {
        const double base = evaluate(e.child(0), values);
        const double expo = evaluate(e.child(1), values);
        if (base < 0.0 && std::floor(expo) != expo)
            throw EvalError("negative base raised to non-integer exponent");
        if (base == 0.0 && expo < 0.0)
            throw EvalError("zero base raised to negative exponent");
        return std::pow(base, expo);
    }
    case K::Neg:
        return -evaluate(e.child(0), values);
    case K::Call: {
        const double a = evaluate(e.child(0), values);
        switch (e.func()) {
        case ExprAst::Func::Sqrt:
            if (a < 0.0) throw EvalError("sqrt of negative value");
            return std::sqrt(a);
        case ExprAst::Func::Exp:
            return std::exp(a);
        case ExprAst::Func::Ln:
            if (a <= 0.0) throw EvalError("ln of non-positive value");
            return std::log(a);
        case ExprAst::Func::Sin:
            return std::sin(a);
        case ExprAst::Func::Cos:
            return std::cos(a);
        case ExprAst::Func::Gamma:
            if (a <= 0.0) throw EvalError("gamma of non-positive value");
            return gamma(a);
        case ExprAst::Func::Digamma:
            if (a <= 0.0) throw EvalError("digamma of non-positive value");
            return digamma(a);
        }
        throw EvalError("unknown function");
    }
    }
    throw EvalError("malformed expression node");
}

/// Name-keyed evaluation for callers that do not track variable order.
inline double evaluate(const ExprAst& e, const std::map<std::string, double>& bindings) {
    using K = ExprAst::Kind;
    if (e.kind() == K::Variable) {
        auto it = bindings.find(e.name());
        if (it == bindings.end())
            throw EvalError("unbound variable '" + e.name() + "'");
        return it->second;
    }
    if (e.kind() == K::Constant)
        return e.value();
    // Ground every variable leaf, then evaluate through the span path.
    struct Subst {
        static ExprAst apply(const ExprAst& n, const std::map<std::string, double>& b) {
            if (n.kind() == K::Variable) {
                auto it = b.find(n.name());
                if (it == b.end())
                    throw EvalError("unbound variable '" + n.name() + "'");
                return ExprAst::constant(it->second);
            }
            if (n.kind() == K::Constant)
                return n;
            if (n.child_count() == 1) {
                ExprAst c = apply(n.child(0), b);
                if (n.kind() == K::Neg) return ExprAst::negate(std::move(c));
                return ExprAst::call(n.func(), std::move(c));
            }
            return ExprAst::binary(n.kind(), apply(n.child(0), b), apply(n.child(1), b));
        }
    };
    ExprAst grounded = Subst::apply(e, bindings);
    return evaluate(grounded, std::span<const double>{});
}

namespace detail {

// Conservative folding: 0/1 identities plus negation of literals. No CAS.
inline ExprAst fold(ExprAst e);

inline ExprAst fold_binary(ExprAst::Kind k, ExprAst lhs, ExprAst rhs) {
    using K = ExprAst::Kind;
    switch (k) {
    case K::Add:
        if (lhs.is_constant(0.0)) return rhs;
        if (rhs.is_constant(0.0)) return lhs;
        break;
    case K::Sub:
        if (rhs.is_constant(0.0)) return lhs;
        if (lhs.is_constant(0.0)) return fold(ExprAst::negate(std::move(rhs)));
        break;
    case K::Mul:
        if (lhs.is_constant(0.0) || rhs.is_constant(0.0)) return ExprAst::constant(0.0);
        if (lhs.is_constant(1.0)) return rhs;
        if (rhs.is_constant(1.0)) return lhs;
        break;
    case K::Div:
        if (lhs.is_constant(0.0)) return ExprAst::constant(0.0);
        if (rhs.is_constant(1.0)) return lhs;
        break;
    case K::Pow:
        if (rhs.is_constant(1.0)) return lhs;
        if (rhs.is_constant(0.0)) return ExprAst::constant(1.0);
        break;
    default:
        break;
    }
    return ExprAst::binary(k, std::move(lhs), std::move(rhs));
}

inline ExprAst fold(ExprAst e) {
    using K = ExprAst::Kind;
    switch (e.kind()) {
    case K::Constant:
    case K::Variable:
        return e;
    case K::Neg: {
        ExprAst c = fold(e.child(0));
        if (c.is_constant())
            return ExprAst::constant(-c.value());
        return ExprAst::negate(std::move(c));
    }
    case K::Call:
        return ExprAst::call(e.func(), fold(e.child(0)));
    default:
        return fold_binary(e.kind(), fold(e.child(0)), fold(e.child(1)));
    }
}

} // namespace detail

/// Exact partial derivative with respect to `var`, with 0/1 identities folded.
/// A tree that does not mention `var` differentiates to the literal 0.
inline ExprAst differentiate(const ExprAst& e, std::string_view var) {
    using K = ExprAst::Kind;
    if (!e.depends_on(var))
        return ExprAst::constant(0.0);
    switch (e.kind()) {
    case K::Constant:
        return ExprAst::constant(0.0);
    case K::Variable:
        return ExprAst::constant(e.name() == var ? 1.0 : 0.0);
    case K::Add:
    case K::Sub:
        return detail::fold_binary(e.kind(), differentiate(e.child(0), var),
                                   differentiate(e.child(1), var));
    case K::Mul: {
        // u'v + uv', assembled piecewise so the zero branches drop out
        ExprAst du = differentiate(e.child(0), var);
        ExprAst dv = differentiate(e.child(1), var);
        ExprAst first = detail::fold_binary(K::Mul, std::move(du), e.child(1));
        ExprAst second = detail::fold_binary(K::Mul, e.child(0), std::move(dv));
        return detail::fold_binary(K::Add, std::move(first), std::move(second));
    }
    case K::Div: {
        // u'/v - u v'/v^2
        ExprAst du = differentiate(e.child(0), var);
        ExprAst dv = differentiate(e.child(1), var);
        ExprAst first = detail::fold_binary(K::Div, std::move(du), e.child(1));
        ExprAst v2 = detail::fold_binary(K::Pow, e.child(1), ExprAst::constant(2.0));
        ExprAst second = detail::fold_binary(
            K::Div, detail::fold_binary(K::Mul, e.child(0), std::move(dv)), std::move(v2));
        return detail::fold_binary(K::Sub, std::move(first), std::move(second));
    }
    case K::Pow: {
        const ExprAst& base = e.child(0);
        const ExprAst& expo = e.child(1);
        if (!expo.depends_on(var)) {
            // c * u^(c-1) * u'
            ExprAst newExpo = expo.is_constant()
                ? ExprAst::constant(expo.value() - 1.0)
                : detail::fold_binary(K::Sub, expo, ExprAst::constant(1.0));
            ExprAst power = detail::fold_binary(K::Pow, base, std::move(newExpo));
            ExprAst coef = detail::fold_binary(K::Mul, expo, std::move(power));
            return detail::fold_binary(K::Mul, std::move(coef),
                                       differentiate(base, var));
        }
        // general rule: u^w * (w' ln u + w u'/u)
        ExprAst dw = differentiate(expo, var);
        ExprAst du = differentiate(base, var);
        ExprAst lnu = ExprAst::call(ExprAst::Func::Ln, base);
        ExprAst lhs = detail::fold_binary(K::Mul, std::move(dw), std::move(lnu));
        ExprAst rhs = detail::fold_binary(
            K::Mul, expo, detail::fold_binary(K::Div, std::move(du), base));
        ExprAst bracket = detail::fold_binary(K::Add, std::move(lhs), std::move(rhs));
        return detail::fold_binary(K::Mul, e, std::move(bracket));
    }
    case K::Neg:
        return detail::fold(ExprAst::negate(differentiate(e.child(0), var)));
    case K::Call: {
        const ExprAst& arg = e.child(0);
        ExprAst darg = differentiate(arg, var);
        ExprAst outer = [&]() -> ExprAst {
            switch (e.func()) {
            case ExprAst::Func::Sqrt: // 1 / (2 sqrt(u))
                return detail::fold_binary(
                    K::Div, ExprAst::constant(1.0),
                    detail::fold_binary(K::Mul, ExprAst::constant(2.0),
                                        ExprAst::call(ExprAst::Func::Sqrt, arg)));
            case ExprAst::Func::Exp:
                return e;
            case ExprAst::Func::Ln:
                return detail::fold_binary(K::Div, ExprAst::constant(1.0), arg);
            case ExprAst::Func::Sin:
                return ExprAst::call(ExprAst::Func::Cos, arg);
            case ExprAst::Func::Cos:
                return detail::fold(
                    ExprAst::negate(ExprAst::call(ExprAst::Func::Sin, arg)));
            case ExprAst::Func::Gamma:
                return detail::fold_binary(
                    K::Mul, e, ExprAst::call(ExprAst::Func::Digamma, arg));
            case ExprAst::Func::Digamma:
                throw std::invalid_argument(
                    "differentiate: digamma derivative not supported");
            }
            throw std::invalid_argument("differentiate: unknown function");
        }();
        return detail::fold_binary(K::Mul, std::move(outer), std::move(darg));
    }
    }
    throw std::invalid_argument("differentiate: malformed node");
}

namespace detail {

inline int precedence_of(const ExprAst& e) {
    using K = ExprAst::Kind;
    switch (e.kind()) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Neg: return 3;
    case K::Pow: return 4;
    case K::Constant:
        // a negative literal prints with a leading minus and re-parses as a
        // Neg node, so give it that precedence for parenthesization
        return e.value() < 0.0 ? 3 : 5;
    default: return 5;
    }
}

inline std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline void print_node(const ExprAst& e, std::string& out) {
    using K = ExprAst::Kind;
    auto child = [&](const ExprAst& c, int min_prec) {
        if (precedence_of(c) < min_prec) {
            out += '(';
            print_node(c, out);
            out += ')';
        } else {
            print_node(c, out);
        }
    };
    switch (e.kind()) {
    case K::Constant:
        out += format_number(e.value());
        return;
    case K::Variable:
        out += e.name();
        return;
    case K::Add:
        child(e.child(0), 1);
        out += " + ";
        child(e.child(1), 2);
        return;
    case K::Sub:
        child(e.child(0), 1);
        out += " - ";
        child(e.child(1), 2);
        return;
    case K::Mul:
        child(e.child(0), 2);
        out += "*";
        child(e.child(1), 3);
        return;
    case K::Div:
        child(e.child(0), 2);
        out += "/";
        child(e.child(1), 3);
        return;
    case K::Neg:
        out += '-';
        child(e.child(0), 3);
        return;
    case K::Pow:
        child(e.child(0), 5);
        out += '^';
        child(e.child(1), 3); // exponent may be unary-negated without parens
        return;
    case K::Call:
        out += function_name(e.func());
        out += '(';
        print_node(e.child(0), out);
        out += ')';
        return;
    }
}

} // namespace detail

inline std::string to_string(const ExprAst& e) {
    std::string out;
    detail::print_node(e, out);
    return out;
}

} // namespace fracvar
