// Copyright 2026 The residue-telescope authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rt/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace rt {

ParseError::ParseError(int line, int column, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

// ----------------------------------------------------------------- nodes

namespace {

std::shared_ptr<Expr> node(ExprKind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}

// Arity and which arguments are integer indices.
struct FunctionInfo {
    std::size_t arity;
    std::vector<bool> index_arg;
};

const std::map<std::string, FunctionInfo>& functions() {
    static const std::map<std::string, FunctionInfo> table = {
        {"binom", {2, {true, true}}},  {"qbinom", {2, {true, true}}},    {"fact", {1, {true}}},
        {"dfact", {1, {true}}},        {"S1", {2, {true, true}}},        {"S2", {2, {true, true}}},
        {"qS1", {2, {true, true}}},    {"qS2", {2, {true, true}}},       {"pow", {2, {false, true}}},
        {"bernoulli", {1, {true}}},    {"bernpoly", {2, {true, false}}},
    };
    return table;
}

}  // namespace

ExprPtr Expr::integer(Integer v) {
    auto e = node(ExprKind::Int);
    e->value = std::move(v);
    return e;
}

ExprPtr Expr::symbol(std::string name) {
    auto e = node(ExprKind::Symbol);
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::unary(ExprKind k, ExprPtr a) {
    auto e = node(k);
    e->args = {std::move(a)};
    return e;
}

ExprPtr Expr::binary(ExprKind k, ExprPtr a, ExprPtr b) {
    auto e = node(k);
    e->args = {std::move(a), std::move(b)};
    return e;
}

ExprPtr Expr::call(std::string name, std::vector<ExprPtr> args) {
    auto e = node(ExprKind::Call);
    e->name = std::move(name);
    e->args = std::move(args);
    return e;
}

ExprPtr Expr::sum(std::string var, ExprPtr lo, ExprPtr hi, ExprPtr body) {
    auto e = node(ExprKind::Sum);
    e->name = std::move(var);
    e->args = {std::move(lo), std::move(hi), std::move(body)};
    return e;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || a->name != b->name || a->value != b->value || a->args.size() != b->args.size())
        return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    return true;
}

namespace {

bool equal(const Condition& a, const Condition& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].op != b[i].op || !equal(a[i].lhs, b[i].lhs) || !equal(a[i].rhs, b[i].rhs)) return false;
    return true;
}

bool equal(const std::optional<Condition>& a, const std::optional<Condition>& b) {
    if (!a || !b) return !a && !b;
    return equal(*a, *b);
}

}  // namespace

bool equal(const Identity& a, const Identity& b) {
    return equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs) && equal(a.when, b.when) && equal(a.otherwise, b.otherwise) &&
           equal(a.domain, b.domain);
}

const std::vector<std::string>& function_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, info] : functions()) v.push_back(name);
        return v;
    }();
    return names;
}

// ---------------------------------------------------------------- lexing

namespace {

enum class Tok { Int, Ident, Op, End };

struct Token {
    Tok kind;
    std::string text;
    int line, column;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t j = 0; j < n; ++j, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    static const char* two_char[] = {"==", "!=", "<=", ">=", ".."};
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        Token t{Tok::Op, "", line, col};
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            t.kind = Tok::Int;
            t.text = s.substr(i, j - i);
            advance(j - i);
        } else if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = s.substr(i, j - i);
            advance(j - i);
        } else {
            bool matched = false;
            for (const char* op : two_char)
                if (s.compare(i, 2, op) == 0) {
                    t.text = op;
                    advance(2);
                    matched = true;
                    break;
                }
            if (!matched) {
                if (std::string("+-*/^(),=<>").find(static_cast<char>(c)) == std::string::npos)
                    throw ParseError(line, col, std::string("unexpected character '") + static_cast<char>(c) + "'");
                t.text = std::string(1, static_cast<char>(c));
                advance(1);
            }
        }
        out.push_back(t);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

// --------------------------------------------------------------- parsing

bool is_variable_name(const std::string& s) {
    return s.size() == 1 && std::islower(static_cast<unsigned char>(s[0])) && var_of(s).has_value();
}

class Parser {
public:
    explicit Parser(const std::string& text, bool companions = false)
        : toks_(tokenize(text)), companions_(companions) {}

    Identity identity() {
        Identity id;
        id.lhs = expr();
        expect("==");
        id.rhs = expr();
        if (accept_word("when")) {
            id.when = condition();
            if (!accept_word("else")) fail(peek(), "expected 'else'");
            id.otherwise = expr();
        }
        if (accept_word("for")) id.domain = condition();
        end();
        return id;
    }

    ExprPtr whole_expr() {
        ExprPtr e = expr();
        end();
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw ParseError(t.line, t.column, msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
    }

    bool accept(const std::string& op) {
        if (peek().kind == Tok::Op && peek().text == op) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const std::string& op) {
        if (!accept(op)) fail(peek(), "expected '" + op + "'");
    }
    bool accept_word(const std::string& w) {
        if (peek().kind == Tok::Ident && peek().text == w) {
            ++pos_;
            return true;
        }
        return false;
    }
    void end() {
        if (peek().kind != Tok::End) fail(peek(), "unexpected input");
    }

    template <class T>
    static T located(T e, const Token& t) {
        auto m = std::const_pointer_cast<Expr>(e);
        m->line = t.line;
        m->column = t.column;
        return e;
    }

    Condition condition() {
        Condition c;
        do {
            Relation r;
            r.lhs = expr();
            const Token& t = peek();
            static const std::map<std::string, RelOp> ops = {{"==", RelOp::Eq}, {"!=", RelOp::Ne},
                                                             {"<=", RelOp::Le}, {">=", RelOp::Ge},
                                                             {"<", RelOp::Lt},  {">", RelOp::Gt}};
            auto it = t.kind == Tok::Op ? ops.find(t.text) : ops.end();
            if (it == ops.end()) fail(t, "expected a comparison");
            ++pos_;
            r.op = it->second;
            r.rhs = expr();
            c.push_back(r);
        } while (accept_word("and"));
        return c;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            const Token& t = peek();
            if (accept("+"))
                e = located(Expr::binary(ExprKind::Add, e, term()), t);
            else if (accept("-"))
                e = located(Expr::binary(ExprKind::Sub, e, term()), t);
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            const Token& t = peek();
            if (accept("*"))
                e = located(Expr::binary(ExprKind::Mul, e, unary()), t);
            else if (accept("/"))
                e = located(Expr::binary(ExprKind::Div, e, unary()), t);
            else
                return e;
        }
    }

    ExprPtr unary() {
        const Token& t = peek();
        if (accept("-")) return located(Expr::unary(ExprKind::Neg, unary()), t);
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        const Token& t = peek();
        if (accept("^")) {
            ExprPtr ex = unary();
            check_index(ex, t);
            return located(Expr::binary(ExprKind::Pow, base, ex), t);
        }
        return base;
    }

    static void check_index(const ExprPtr& e, const Token& at) {
        if (!to_linexpr(e)) throw ParseError(e->line ? e->line : at.line, e->line ? e->column : at.column,
                                             "non-linear index expression '" + render(e) + "'");
    }

    ExprPtr primary() {
        const Token& t = next();
        if (t.kind == Tok::Int) return located(Expr::integer(Integer(t.text)), t);
        if (t.kind == Tok::Op && t.text == "(") {
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (t.kind != Tok::Ident) fail(t, "expected an expression");
        if (t.text == "sum") return sum(t);
        if (peek().kind == Tok::Op && peek().text == "(") {
            auto it = functions().find(t.text);
            if (it == functions().end()) fail(t, "unknown function or sequence '" + t.text + "'");
            ++pos_;
            std::vector<ExprPtr> args;
            if (!accept(")")) {
                do {
                    args.push_back(expr());
                } while (accept(","));
                expect(")");
            }
            if (args.size() != it->second.arity)
                throw ParseError(t.line, t.column,
                                 t.text + " takes " + std::to_string(it->second.arity) + " argument(s)");
            for (std::size_t i = 0; i < args.size(); ++i)
                if (it->second.index_arg[i]) check_index(args[i], t);
            return located(Expr::call(t.text, std::move(args)), t);
        }
        bool ok = is_variable_name(t.text) || (companions_ && t.text.size() == 1 && var_of(t.text));
        if (!ok) fail(t, "unknown name '" + t.text + "'");
        return located(Expr::symbol(t.text), t);
    }

    ExprPtr sum(const Token& t) {
        expect("(");
        const Token& v = next();
        if (v.kind != Tok::Ident || !is_variable_name(v.text) || v.text == "q")
            fail(v, "expected a summation variable");
        ExprPtr lo, hi;
        if (accept("=")) {
            lo = expr();
            expect("..");
            hi = expr();
            check_index(lo, v);
            check_index(hi, v);
        }
        expect(",");
        ExprPtr body = expr();
        expect(")");
        return located(Expr::sum(v.text, lo, hi, body), t);
    }

    std::vector<Token> toks_;
    bool companions_ = false;
    std::size_t pos_ = 0;
};

}  // namespace

Identity parse_identity(const std::string& text) {
    Identity id = Parser(text).identity();
    if (id.lhs->kind != ExprKind::Sum) throw ParseError(id.lhs->line, id.lhs->column, "left side must be a sum");
    return id;
}

ExprPtr parse_sum(const std::string& text) {
    ExprPtr e = Parser(text).whole_expr();
    if (e->kind != ExprKind::Sum) throw ParseError(e->line, e->column, "expected a sum");
    return e;
}

ExprPtr parse_expr(const std::string& text) { return Parser(text).whole_expr(); }

RatFunc parse_ratfunc(const std::string& text) {
    ExprPtr e = Parser(text, true).whole_expr();
    auto r = to_ratfunc(e);
    if (!r) throw ParseError(e->line, e->column, "not a rational function: '" + text + "'");
    return *r;
}

// ------------------------------------------------------------- rendering

namespace {

int precedence(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Add:
        case ExprKind::Sub:
            return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
            return 2;
        case ExprKind::Neg:
            return 3;
        case ExprKind::Pow:
            return 4;
        default:
            return 5;
    }
}

std::string paren_if(const ExprPtr& e, bool p) { return p ? "(" + render(e) + ")" : render(e); }

}  // namespace

std::string render(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Int:
            return e->value.get_str();
        case ExprKind::Symbol:
            return e->name;
        case ExprKind::Add:
        case ExprKind::Sub: {
            const auto& r = e->args[1];
            bool rp = precedence(r) <= 1 || r->kind == ExprKind::Neg;
            return render(e->args[0]) + (e->kind == ExprKind::Add ? " + " : " - ") + paren_if(r, rp);
        }
        case ExprKind::Mul:
        case ExprKind::Div: {
            const auto& l = e->args[0];
            const auto& r = e->args[1];
            bool rp = precedence(r) <= 3;
            return paren_if(l, precedence(l) < 2) + (e->kind == ExprKind::Mul ? "*" : "/") + paren_if(r, rp);
        }
        case ExprKind::Neg:
            return "-" + paren_if(e->args[0], precedence(e->args[0]) <= 3);
        case ExprKind::Pow: {
            const auto& ex = e->args[1];
            return paren_if(e->args[0], precedence(e->args[0]) < 5) + "^" + paren_if(ex, precedence(ex) < 4);
        }
        case ExprKind::Call: {
            std::string s = e->name + "(";
            for (std::size_t i = 0; i < e->args.size(); ++i) s += (i ? ", " : "") + render(e->args[i]);
            return s + ")";
        }
        case ExprKind::Sum: {
            std::string s = "sum(" + e->name;
            if (e->has_range()) s += "=" + render(e->args[0]) + ".." + render(e->args[1]);
            return s + ", " + render(e->body()) + ")";
        }
    }
    return "";
}

std::string render(const Condition& c) {
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += " and ";
        s += render(c[i].lhs) + " " + ops[static_cast<int>(c[i].op)] + " " + render(c[i].rhs);
    }
    return s;
}

std::string render(const Identity& id) {
    std::string s = render(id.lhs) + " == " + render(id.rhs);
    if (id.when) s += " when " + render(*id.when) + " else " + render(id.otherwise);
    if (id.domain) s += " for " + render(*id.domain);
    return s;
}

// ----------------------------------------------------------- conversions

std::optional<LinExpr> to_linexpr(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Int:
            if (!e->value.fits_slong_p()) return std::nullopt;
            return LinExpr(e->value.get_si());
        case ExprKind::Symbol:
            if (e->name == "q") return std::nullopt;
            return LinExpr::variable(var(e->name));
        case ExprKind::Neg: {
            auto a = to_linexpr(e->args[0]);
            if (!a) return std::nullopt;
            return -*a;
        }
        case ExprKind::Add:
        case ExprKind::Sub: {
            auto a = to_linexpr(e->args[0]), b = to_linexpr(e->args[1]);
            if (!a || !b) return std::nullopt;
            return e->kind == ExprKind::Add ? *a + *b : *a - *b;
        }
        case ExprKind::Mul: {
            auto a = to_linexpr(e->args[0]), b = to_linexpr(e->args[1]);
            if (!a || !b) return std::nullopt;
            if (a->is_constant()) return a->constant() * *b;
            if (b->is_constant()) return b->constant() * *a;
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

ExprPtr from_linexpr(const LinExpr& e) { return parse_expr(e.str()); }

std::optional<RatFunc> to_ratfunc(const ExprPtr& e) {
    auto bin = [&](auto f) -> std::optional<RatFunc> {
        auto a = to_ratfunc(e->args[0]), b = to_ratfunc(e->args[1]);
        if (!a || !b) return std::nullopt;
        return f(*a, *b);
    };
    switch (e->kind) {
        case ExprKind::Int:
            return RatFunc(Rational(e->value));
        case ExprKind::Symbol:
            return RatFunc::variable(var(e->name));
        case ExprKind::Neg: {
            auto a = to_ratfunc(e->args[0]);
            if (!a) return std::nullopt;
            return -*a;
        }
        case ExprKind::Add:
            return bin([](const RatFunc& a, const RatFunc& b) { return a + b; });
        case ExprKind::Sub:
            return bin([](const RatFunc& a, const RatFunc& b) { return a - b; });
        case ExprKind::Mul:
            return bin([](const RatFunc& a, const RatFunc& b) { return a * b; });
        case ExprKind::Div: {
            auto a = to_ratfunc(e->args[0]), b = to_ratfunc(e->args[1]);
            if (!a || !b || b->is_zero()) return std::nullopt;
            return *a / *b;
        }
        case ExprKind::Pow: {
            auto a = to_ratfunc(e->args[0]);
            auto ex = to_linexpr(e->args[1]);
            if (!a || !ex || !ex->is_constant()) return std::nullopt;
            long n = ex->constant();
            if (n < 0 && a->is_zero()) return std::nullopt;
            return n >= 0 ? a->pow(static_cast<unsigned>(n)) : a->inverse().pow(static_cast<unsigned>(-n));
        }
        default:
            return std::nullopt;
    }
}

ExprPtr substitute(const ExprPtr& e, Var v, const ExprPtr& value) {
    if (!e) return e;
    if (e->kind == ExprKind::Symbol) return e->name == std::string(1, var_name(v)) ? value : e;
    if (e->kind == ExprKind::Sum && e->name == std::string(1, var_name(v))) {
        // The bound variable shadows v inside the body, not in the bounds.
        return Expr::sum(e->name, substitute(e->args[0], v, value), substitute(e->args[1], v, value), e->args[2]);
    }
    if (e->args.empty()) return e;
    auto out = std::make_shared<Expr>(*e);
    for (auto& a : out->args) a = substitute(a, v, value);
    return out;
}

VarMask free_vars(const ExprPtr& e) {
    if (!e) return 0;
    if (e->kind == ExprKind::Symbol) return mask_of(var(e->name));
    VarMask m = 0;
    for (const auto& a : e->args) m |= free_vars(a);
    if (e->kind == ExprKind::Sum) {
        VarMask body = free_vars(e->body()) & ~mask_of(var(e->name));
        m = free_vars(e->args[0]) | free_vars(e->args[1]) | body;
    }
    return m;
}

VarMask index_vars(const ExprPtr& e) {
    if (!e) return 0;
    VarMask m = 0;
    switch (e->kind) {
        case ExprKind::Pow:
            m = index_vars(e->args[0]) | free_vars(e->args[1]);
            break;
        case ExprKind::Call: {
            const auto& info = functions().at(e->name);
            for (std::size_t i = 0; i < e->args.size(); ++i)
                m |= info.index_arg[i] ? free_vars(e->args[i]) : index_vars(e->args[i]);
            break;
        }
        case ExprKind::Sum:
            m = free_vars(e->args[0]) | free_vars(e->args[1]) | index_vars(e->body());
            break;
        default:
            for (const auto& a : e->args) m |= index_vars(a);
    }
    return m & ~mask_of(q_var());
}

bool holds(const Condition& c, const IntPoint& p) {
    for (const auto& r : c) {
        auto a = to_linexpr(r.lhs), b = to_linexpr(r.rhs);
        if (!a || !b) throw AlgebraError("conditions must compare integer-linear expressions");
        long x = a->eval(p), y = b->eval(p);
        bool ok = false;
        switch (r.op) {
            case RelOp::Eq: ok = x == y; break;
            case RelOp::Ne: ok = x != y; break;
            case RelOp::Le: ok = x <= y; break;
            case RelOp::Ge: ok = x >= y; break;
            case RelOp::Lt: ok = x < y; break;
            case RelOp::Gt: ok = x > y; break;
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace rt
