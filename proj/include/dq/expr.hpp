#pragma once

#include "dq/poly.hpp"

#include <cctype>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dq::shell {

using symcore::Poly;
using symcore::Scalar;
using symcore::VarKind;

/// Parse/lowering failure with a 1-based line:column position.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string msg, int column)
        : std::runtime_error("1:" + std::to_string(column) + ": " + msg), column_(column) {}
    int column() const { return column_; }

  private:
    int column_;
};

/// Variable declaration for parsing: phase-space (p1..pl, q1..ql) or
/// cartesian (x1..xn) coordinates.
struct ParseContext {
    VarKind kind = VarKind::PhaseSpace;
    int count = 1;  // ell for phase space, n for cartesian

    int nvars() const { return kind == VarKind::PhaseSpace ? 2 * count : count; }
};

/// Abstract syntax tree over rational/Gaussian literals, declared variables,
/// hbar, i, and the operators + - * ^.
struct Expr {
    enum class Kind { Number, Imaginary, Hbar, Variable, Neg, Add, Sub, Mul, Pow };

    Kind kind;
    mpq_class number;       // Number
    int var_index = -1;     // Variable (index into the context's coordinates)
    int exponent = 0;       // Pow
    std::unique_ptr<Expr> lhs, rhs;
    int column = 0;

    explicit Expr(Kind k) : kind(k) {}
};

namespace detail_parse {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    int column() const { return static_cast<int>(pos) + 1; }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    /// Unsigned integer literal.
    mpz_class integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected a number", column());
        return mpz_class(std::string(text.substr(start, pos - start)), 10);
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        return std::string(text.substr(start, pos - start));
    }
};

class Parser {
  public:
    Parser(std::string_view text, const ParseContext& ctx) : lex_{text}, ctx_(ctx) {}

    std::unique_ptr<Expr> parse() {
        if (lex_.eof()) throw ParseError("empty expression", 1);
        auto e = expr();
        if (!lex_.eof()) throw ParseError("unexpected trailing input", lex_.column());
        return e;
    }

  private:
    std::unique_ptr<Expr> expr() {
        auto e = term();
        for (;;) {
            if (lex_.consume('+')) {
                auto n = std::make_unique<Expr>(Expr::Kind::Add);
                n->lhs = std::move(e);
                n->rhs = term();
                e = std::move(n);
            } else if (lex_.consume('-')) {
                auto n = std::make_unique<Expr>(Expr::Kind::Sub);
                n->lhs = std::move(e);
                n->rhs = term();
                e = std::move(n);
            } else {
                return e;
            }
        }
    }

    std::unique_ptr<Expr> term() {
        auto e = factor();
        while (lex_.consume('*')) {
            auto n = std::make_unique<Expr>(Expr::Kind::Mul);
            n->lhs = std::move(e);
            n->rhs = factor();
            e = std::move(n);
        }
        return e;
    }

    // unary minus binds below ^ and above *
    std::unique_ptr<Expr> factor() {
        if (lex_.consume('-')) {
            auto n = std::make_unique<Expr>(Expr::Kind::Neg);
            n->lhs = factor();
            return n;
        }
        return power();
    }

    std::unique_ptr<Expr> power() {
        auto base = primary();
        if (lex_.consume('^')) {
            int col = lex_.column();
            auto n = std::make_unique<Expr>(Expr::Kind::Pow);
            n->column = col;
            n->lhs = std::move(base);
            n->exponent = exponent_literal();
            return n;
        }
        return base;
    }

    int exponent_literal() {
        bool paren = lex_.consume('(');
        bool neg = lex_.consume('-');
        mpz_class v = lex_.integer();
        if (paren && !lex_.consume(')')) throw ParseError("expected ')' after exponent", lex_.column());
        if (!v.fits_sint_p()) throw ParseError("exponent out of range", lex_.column());
        int e = static_cast<int>(v.get_si());
        return neg ? -e : e;
    }

    std::unique_ptr<Expr> primary() {
        int col = lex_.column();
        if (lex_.consume('(')) {
            auto e = expr();
            if (!lex_.consume(')')) throw ParseError("expected ')'", lex_.column());
            return e;
        }
        char c = lex_.peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mpz_class num = lex_.integer();
            mpq_class value(num);
            if (lex_.consume('/')) {  // rational literal only
                mpz_class den = lex_.integer();
                if (den == 0) throw ParseError("zero denominator", lex_.column());
                value = mpq_class(num, den);
                value.canonicalize();
            }
            auto n = std::make_unique<Expr>(Expr::Kind::Number);
            n->number = value;
            n->column = col;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name = lex_.ident();
            if (name == "i") {
                auto n = std::make_unique<Expr>(Expr::Kind::Imaginary);
                n->column = col;
                return n;
            }
            if (name == "hbar") {
                auto n = std::make_unique<Expr>(Expr::Kind::Hbar);
                n->column = col;
                return n;
            }
            auto n = std::make_unique<Expr>(Expr::Kind::Variable);
            n->column = col;
            n->var_index = variable_index(name, col);
            return n;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", col);
    }

    int variable_index(const std::string& name, int col) const {
        if (name.size() < 2) throw ParseError("unknown symbol '" + name + "'", col);
        char head = name[0];
        int idx = 0;
        for (std::size_t k = 1; k < name.size(); ++k) {
            if (!std::isdigit(static_cast<unsigned char>(name[k])))
                throw ParseError("unknown symbol '" + name + "'", col);
            idx = idx * 10 + (name[k] - '0');
        }
        if (idx < 1) throw ParseError("variable indices start at 1", col);
        if (ctx_.kind == VarKind::PhaseSpace) {
            if (head == 'p' && idx <= ctx_.count) return idx - 1;
            if (head == 'q' && idx <= ctx_.count) return ctx_.count + idx - 1;
            throw ParseError("unknown variable '" + name + "' for ell = " + std::to_string(ctx_.count), col);
        }
        if (head == 'x' && idx <= ctx_.count) return idx - 1;
        throw ParseError("unknown variable '" + name + "' for n = " + std::to_string(ctx_.count), col);
    }

    detail_parse::Lexer lex_;
    ParseContext ctx_;
};

}  // namespace detail_parse

/// Lower an AST to the exact polynomial ring. Negative exponents are only
/// legal on hbar.
inline Poly lower(const Expr& e, const ParseContext& ctx) {
    int nv = ctx.nvars();
    switch (e.kind) {
        case Expr::Kind::Number: return Poly::constant(nv, ctx.kind, Scalar(e.number, mpq_class(0)));
        case Expr::Kind::Imaginary: return Poly::constant(nv, ctx.kind, Scalar::i());
        case Expr::Kind::Hbar: return Poly::hbar(nv, ctx.kind);
        case Expr::Kind::Variable: return Poly::variable(nv, ctx.kind, e.var_index);
        case Expr::Kind::Neg: return -lower(*e.lhs, ctx);
        case Expr::Kind::Add: return lower(*e.lhs, ctx) + lower(*e.rhs, ctx);
        case Expr::Kind::Sub: return lower(*e.lhs, ctx) - lower(*e.rhs, ctx);
        case Expr::Kind::Mul: return lower(*e.lhs, ctx) * lower(*e.rhs, ctx);
        case Expr::Kind::Pow: {
            if (e.exponent < 0) {
                if (e.lhs->kind != Expr::Kind::Hbar)
                    throw ParseError("negative exponent on a non-hbar symbol", e.column);
                return Poly::hbar(nv, ctx.kind, e.exponent);
            }
            return lower(*e.lhs, ctx).pow(e.exponent);
        }
    }
    throw std::logic_error("lower: unreachable");
}

/// Parse an expression and lower it to a Poly.
inline Poly parse_poly(std::string_view text, const ParseContext& ctx) {
    detail_parse::Parser p(text, ctx);
    auto ast = p.parse();
    return lower(*ast, ctx);
}

}  // namespace dq::shell
