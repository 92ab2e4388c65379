#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

/// Parse-time failures carry 1-based line/column of the offending token.
struct SyntaxError : Error {
    SyntaxError(const std::string& msg, int line, int col)
        : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line(line),
          column(col) {}
    int line, column;
};

struct UnknownIdentifierError : SyntaxError {
    using SyntaxError::SyntaxError;
};

struct ArityError : SyntaxError {
    using SyntaxError::SyntaxError;
};

/// Expression tree for metric formulas. Scalar-valued except for the vector
/// primitives (the coordinate vectors x, y and vector-valued parameters),
/// which may only appear as arguments of dot/norm/norm2.
struct AstNode;
using AstPtr = std::shared_ptr<const AstNode>;

struct AstNode {
    enum class Kind {
        Number,
        Ident,   // named parameter (scalar or vector, resolved at evaluation)
        CoordX,  // x^i, 0-based index
        CoordY,
        VecX,  // the full coordinate vector
        VecY,
        Neg,
        Add,
        Sub,
        Mul,
        Div,
        Pow,
        Call,
    };

    Kind kind;
    double number = 0.0;
    std::string name;  // Ident / Call
    int index = 0;     // CoordX / CoordY
    std::vector<AstPtr> args;

    static AstPtr make_number(double v);
    static AstPtr make_ident(std::string name);
    static AstPtr make_coord(bool fiber, int index);
    static AstPtr make_vec(bool fiber);
    static AstPtr make_unary(Kind k, AstPtr a);
    static AstPtr make_binary(Kind k, AstPtr a, AstPtr b);
    static AstPtr make_call(std::string fn, std::vector<AstPtr> args);
};

struct ExpressionAst {
    AstPtr root;
};

/// Parses the infix grammar (+ - * / ^, function calls, x1..xn / y1..yn,
/// named parameters, dot/norm/norm2 over the vector primitives).
ExpressionAst parse_expression(const std::string& text);

/// Canonical text form; parse(serialize(ast)) reproduces the tree.
std::string serialize_expression(const ExpressionAst& ast);

bool ast_equal(const AstPtr& a, const AstPtr& b);

/// Collects parameter names referenced by the expression.
void collect_idents(const AstPtr& node, std::vector<std::string>& out);

/// Parameter table: scalars and constant vectors.
using ParamValue = std::variant<double, std::vector<double>>;
using ParamMap = std::map<std::string, ParamValue>;

namespace ast_detail {

template <class S>
struct EvalCtx {
    std::span<const S> x, y;
    const ParamMap* params;
};

inline double to_scalar(double v, const EvalCtx<double>&) { return v; }
inline Jet to_scalar(double v, const EvalCtx<Jet>& ctx) { return Jet::constant(ctx.x[0].shape(), v); }

inline double recip_scalar(const double& v) { return 1.0 / v; }
inline Jet recip_scalar(const Jet& v) { return recip(v); }

inline double pow_general(const double& b, const double& e) { return std::pow(b, e); }
inline Jet pow_general(const Jet& b, const Jet& e) { return exp(e * log(b)); }

inline bool is_vector_kind(const AstPtr& node) {
    return node->kind == AstNode::Kind::VecX || node->kind == AstNode::Kind::VecY;
}

template <class S>
std::vector<S> eval_vector(const AstPtr& node, const EvalCtx<S>& ctx) {
    using Kind = AstNode::Kind;
    if (node->kind == Kind::VecX) return std::vector<S>(ctx.x.begin(), ctx.x.end());
    if (node->kind == Kind::VecY) return std::vector<S>(ctx.y.begin(), ctx.y.end());
    if (node->kind == Kind::Ident) {
        auto it = ctx.params->find(node->name);
        if (it == ctx.params->end())
            throw UnknownIdentifierError("unresolved parameter '" + node->name + "'", 0, 0);
        if (const auto* vec = std::get_if<std::vector<double>>(&it->second)) {
            std::vector<S> out;
            out.reserve(vec->size());
            for (double v : *vec) out.push_back(to_scalar(v, ctx));
            return out;
        }
        throw ArityError("parameter '" + node->name + "' is a scalar, vector expected", 0, 0);
    }
    throw ArityError("vector-valued argument expected", 0, 0);
}

template <class S>
S eval_node(const AstPtr& node, const EvalCtx<S>& ctx) {
    using std::exp;
    using std::log;
    using std::sqrt;
    using Kind = AstNode::Kind;
    switch (node->kind) {
        case Kind::Number:
            return to_scalar(node->number, ctx);
        case Kind::Ident: {
            auto it = ctx.params->find(node->name);
            if (it == ctx.params->end())
                throw UnknownIdentifierError("unresolved parameter '" + node->name + "'", 0, 0);
            if (const auto* s = std::get_if<double>(&it->second)) return to_scalar(*s, ctx);
            throw ArityError("parameter '" + node->name + "' is a vector, scalar expected", 0, 0);
        }
        case Kind::CoordX:
            if (node->index >= static_cast<int>(ctx.x.size()))
                throw UnknownIdentifierError("coordinate index exceeds dimension", 0, 0);
            return ctx.x[node->index];
        case Kind::CoordY:
            if (node->index >= static_cast<int>(ctx.y.size()))
                throw UnknownIdentifierError("coordinate index exceeds dimension", 0, 0);
            return ctx.y[node->index];
        case Kind::Neg:
            return -eval_node(node->args[0], ctx);
        case Kind::Add:
            return eval_node(node->args[0], ctx) + eval_node(node->args[1], ctx);
        case Kind::Sub:
            return eval_node(node->args[0], ctx) - eval_node(node->args[1], ctx);
        case Kind::Mul:
            return eval_node(node->args[0], ctx) * eval_node(node->args[1], ctx);
        case Kind::Div:
            return eval_node(node->args[0], ctx) / eval_node(node->args[1], ctx);
        case Kind::Pow: {
            // literal small integer exponents go through repeated products so
            // non-positive bases stay differentiable
            const AstPtr& e = node->args[1];
            if (e->kind == Kind::Number && e->number == static_cast<int>(e->number) &&
                std::abs(e->number) <= 12.0) {
                int k = static_cast<int>(e->number);
                S base = eval_node(node->args[0], ctx);
                S acc = to_scalar(1.0, ctx);
                for (int i = 0; i < std::abs(k); ++i) acc = acc * base;
                return k >= 0 ? acc : recip_scalar(acc);
            }
            return pow_general(eval_node(node->args[0], ctx), eval_node(node->args[1], ctx));
        }
        case Kind::Call: {
            if (node->name == "dot") {
                auto u = eval_vector(node->args[0], ctx);
                auto v = eval_vector(node->args[1], ctx);
                if (u.size() != v.size()) throw ArityError("dot of vectors of unequal length", 0, 0);
                S acc = u[0] * v[0];
                for (size_t i = 1; i < u.size(); ++i) acc = acc + u[i] * v[i];
                return acc;
            }
            if (node->name == "norm2" || node->name == "norm") {
                auto u = eval_vector(node->args[0], ctx);
                S acc = u[0] * u[0];
                for (size_t i = 1; i < u.size(); ++i) acc = acc + u[i] * u[i];
                return node->name == "norm2" ? acc : sqrt(acc);
            }
            S a = eval_node(node->args[0], ctx);
            if (node->name == "sqrt") return sqrt(a);
            if (node->name == "exp") return exp(a);
            if (node->name == "log") return log(a);
            throw UnknownIdentifierError("unknown function '" + node->name + "'", 0, 0);
        }
        default:
            throw ArityError("vector primitive used as a scalar", 0, 0);
    }
}

}  // namespace ast_detail

/// Evaluates the expression generically; S is double or Jet. Coordinate spans
/// give the point (plain) or its coordinate jets.
template <class S>
S eval_expression(const ExpressionAst& ast, std::span<const S> x, std::span<const S> y, const ParamMap& params) {
    ast_detail::EvalCtx<S> ctx{x, y, &params};
    return ast_detail::eval_node<S>(ast.root, ctx);
}

}  // namespace finsler
