#include "finsler/ast.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace finsler {

AstPtr AstNode::make_number(double v) {
    auto n = std::make_shared<AstNode>();
    n->kind = Kind::Number;
    n->number = v;
    return n;
}

AstPtr AstNode::make_ident(std::string name) {
    auto n = std::make_shared<AstNode>();
    n->kind = Kind::Ident;
    n->name = std::move(name);
    return n;
}

AstPtr AstNode::make_coord(bool fiber, int index) {
    auto n = std::make_shared<AstNode>();
    n->kind = fiber ? Kind::CoordY : Kind::CoordX;
    n->index = index;
    return n;
}

AstPtr AstNode::make_vec(bool fiber) {
    auto n = std::make_shared<AstNode>();
    n->kind = fiber ? Kind::VecY : Kind::VecX;
    return n;
}

AstPtr AstNode::make_unary(Kind k, AstPtr a) {
    auto n = std::make_shared<AstNode>();
    n->kind = k;
    n->args.push_back(std::move(a));
    return n;
}

AstPtr AstNode::make_binary(Kind k, AstPtr a, AstPtr b) {
    auto n = std::make_shared<AstNode>();
    n->kind = k;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
}

AstPtr AstNode::make_call(std::string fn, std::vector<AstPtr> args) {
    auto n = std::make_shared<AstNode>();
    n->kind = Kind::Call;
    n->name = std::move(fn);
    n->args = std::move(args);
    return n;
}

namespace {

struct Token {
    enum class Type { Number, Ident, Op, End };
    Type type;
    double number = 0.0;
    std::string text;
    char op = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_.type = Token::Type::End;
            return;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t end = pos_;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) {
                ++end;
            }
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                size_t e = end + 1;
                if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
                if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                    ++e;
                    while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
                    end = e;
                }
            }
            tok_.type = Token::Type::Number;
            tok_.text = text_.substr(pos_, end - pos_);
            char* parse_end = nullptr;
            tok_.number = std::strtod(tok_.text.c_str(), &parse_end);
            if (parse_end != tok_.text.c_str() + tok_.text.size())
                throw SyntaxError("malformed number '" + tok_.text + "'", line_, col_);
            col_ += static_cast<int>(end - pos_);
            pos_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t end = pos_;
            while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            tok_.type = Token::Type::Ident;
            tok_.text = text_.substr(pos_, end - pos_);
            col_ += static_cast<int>(end - pos_);
            pos_ = end;
            return;
        }
        if (std::string("+-*/^(),").find(c) != std::string::npos) {
            tok_.type = Token::Type::Op;
            tok_.op = c;
            ++pos_;
            ++col_;
            return;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

const struct {
    const char* name;
    int arity;
} kFunctions[] = {
    {"sqrt", 1}, {"exp", 1}, {"log", 1}, {"dot", 2}, {"norm", 1}, {"norm2", 1},
};

// x1..xn / y1..yn (1-based surface syntax); plain "x"/"y" are the vectors
AstPtr ident_node(const Token& t) {
    const std::string& s = t.text;
    if (s == "x") return AstNode::make_vec(false);
    if (s == "y") return AstNode::make_vec(true);
    if ((s[0] == 'x' || s[0] == 'y') && s.size() > 1) {
        bool digits = true;
        for (size_t i = 1; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) digits = false;
        if (digits) {
            int idx = std::atoi(s.c_str() + 1);
            if (idx < 1) throw SyntaxError("coordinate indices are 1-based", t.line, t.col);
            return AstNode::make_coord(s[0] == 'y', idx - 1);
        }
    }
    return AstNode::make_ident(s);
}

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    AstPtr parse() {
        AstPtr e = expr();
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End) throw SyntaxError("unexpected trailing input", t.line, t.col);
        return e;
    }

private:
    bool eat_op(char c) {
        if (lex_.peek().type == Token::Type::Op && lex_.peek().op == c) {
            lex_.next();
            return true;
        }
        return false;
    }

    AstPtr expr() {
        AstPtr lhs = term();
        while (lex_.peek().type == Token::Type::Op && (lex_.peek().op == '+' || lex_.peek().op == '-')) {
            char op = lex_.next().op;
            lhs = AstNode::make_binary(op == '+' ? AstNode::Kind::Add : AstNode::Kind::Sub, lhs, term());
        }
        return lhs;
    }

    AstPtr term() {
        AstPtr lhs = factor();
        while (lex_.peek().type == Token::Type::Op && (lex_.peek().op == '*' || lex_.peek().op == '/')) {
            char op = lex_.next().op;
            lhs = AstNode::make_binary(op == '*' ? AstNode::Kind::Mul : AstNode::Kind::Div, lhs, factor());
        }
        return lhs;
    }

    AstPtr factor() {
        if (eat_op('-')) return AstNode::make_unary(AstNode::Kind::Neg, factor());
        if (eat_op('+')) return factor();
        return power();
    }

    AstPtr power() {
        AstPtr base = atom();
        if (eat_op('^')) return AstNode::make_binary(AstNode::Kind::Pow, base, factor());
        return base;
    }

    AstPtr atom() {
        Token t = lex_.next();
        if (t.type == Token::Type::Number) return AstNode::make_number(t.number);
        if (t.type == Token::Type::Ident) {
            if (lex_.peek().type == Token::Type::Op && lex_.peek().op == '(') {
                lex_.next();
                std::vector<AstPtr> args;
                if (!eat_op(')')) {
                    args.push_back(expr());
                    while (eat_op(',')) args.push_back(expr());
                    Token close = lex_.next();
                    if (close.type != Token::Type::Op || close.op != ')')
                        throw SyntaxError("expected ')'", close.line, close.col);
                }
                for (const auto& fn : kFunctions) {
                    if (t.text == fn.name) {
                        if (static_cast<int>(args.size()) != fn.arity)
                            throw ArityError("function '" + t.text + "' expects " + std::to_string(fn.arity) +
                                                 " argument(s), got " + std::to_string(args.size()),
                                             t.line, t.col);
                        return AstNode::make_call(t.text, std::move(args));
                    }
                }
                throw UnknownIdentifierError("unknown function '" + t.text + "'", t.line, t.col);
            }
            return ident_node(t);
        }
        if (t.type == Token::Type::Op && t.op == '(') {
            AstPtr e = expr();
            Token close = lex_.next();
            if (close.type != Token::Type::Op || close.op != ')')
                throw SyntaxError("expected ')'", close.line, close.col);
            return e;
        }
        throw SyntaxError("expected operand", t.line, t.col);
    }

    Lexer lex_;
};

int precedence(AstNode::Kind k) {
    switch (k) {
        case AstNode::Kind::Add:
        case AstNode::Kind::Sub:
            return 1;
        case AstNode::Kind::Mul:
        case AstNode::Kind::Div:
            return 2;
        case AstNode::Kind::Neg:
            return 3;
        case AstNode::Kind::Pow:
            return 4;
        default:
            return 5;
    }
}

void serialize_node(const AstPtr& n, std::string& out) {
    using Kind = AstNode::Kind;
    auto child = [&](const AstPtr& c, bool needs_paren) {
        if (needs_paren) out += '(';
        serialize_node(c, out);
        if (needs_paren) out += ')';
    };
    switch (n->kind) {
        case Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", n->number);
            out += buf;
            break;
        }
        case Kind::Ident:
            out += n->name;
            break;
        case Kind::CoordX:
            out += "x" + std::to_string(n->index + 1);
            break;
        case Kind::CoordY:
            out += "y" + std::to_string(n->index + 1);
            break;
        case Kind::VecX:
            out += "x";
            break;
        case Kind::VecY:
            out += "y";
            break;
        case Kind::Neg:
            out += '-';
            child(n->args[0], precedence(n->args[0]->kind) < 3);
            break;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
        case Kind::Pow: {
            const char* op = n->kind == Kind::Add   ? " + "
                             : n->kind == Kind::Sub ? " - "
                             : n->kind == Kind::Mul ? "*"
                             : n->kind == Kind::Div ? "/"
                                                    : "^";
            int p = precedence(n->kind);
            // parenthesize to keep association on re-parse; pow binds right
            bool lp = precedence(n->args[0]->kind) < p || (n->kind == Kind::Pow && precedence(n->args[0]->kind) <= p);
            bool rp = precedence(n->args[1]->kind) < p ||
                      (n->kind != Kind::Pow && precedence(n->args[1]->kind) == p);
            child(n->args[0], lp);
            out += op;
            child(n->args[1], rp);
            break;
        }
        case Kind::Call: {
            out += n->name;
            out += '(';
            for (size_t i = 0; i < n->args.size(); ++i) {
                if (i) out += ", ";
                serialize_node(n->args[i], out);
            }
            out += ')';
            break;
        }
    }
}

}  // namespace

ExpressionAst parse_expression(const std::string& text) {
    Parser p(text);
    return ExpressionAst{p.parse()};
}

std::string serialize_expression(const ExpressionAst& ast) {
    std::string out;
    serialize_node(ast.root, out);
    return out;
}

bool ast_equal(const AstPtr& a, const AstPtr& b) {
    if (a->kind != b->kind) return false;
    if (a->kind == AstNode::Kind::Number && a->number != b->number) return false;
    if (a->name != b->name || a->index != b->index) return false;
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!ast_equal(a->args[i], b->args[i])) return false;
    return true;
}

void collect_idents(const AstPtr& node, std::vector<std::string>& out) {
    if (node->kind == AstNode::Kind::Ident) out.push_back(node->name);
    for (const auto& a : node->args) collect_idents(a, out);
}

}  // namespace finsler
