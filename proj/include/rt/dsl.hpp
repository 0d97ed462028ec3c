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

// The identity language.
//
//   identity := expr "==" expr [ "when" cond "else" expr ] [ "for" cond ]
//   cond     := rel { "and" rel }
//   rel      := expr ( "==" | "!=" | "<=" | ">=" | "<" | ">" ) expr
//   expr     := term { ("+" | "-") term }
//   term     := unary { ("*" | "/") unary }
//   unary    := "-" unary | power
//   power    := primary [ "^" unary ]
//   primary  := integer | letter | name "(" args ")" | "(" expr ")"
//             | "sum" "(" letter [ "=" expr ".." expr ] "," expr ")"
//
// Variables are single lowercase letters; q is the formal q of the q-analogues.

#ifndef RT_DSL_HPP
#define RT_DSL_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rt/hyperterm.hpp"

namespace rt {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& msg);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

enum class ExprKind { Int, Symbol, Add, Sub, Mul, Div, Neg, Pow, Call, Sum };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::Int;
    Integer value;     // Int
    std::string name;  // Symbol, Call (function name), Sum (summation variable)
    // Binary and unary operands, call arguments; for Sum: {lo, hi, body}
    // with lo and hi null when the range is omitted.
    std::vector<ExprPtr> args;
    int line = 0, column = 0;

    static ExprPtr integer(Integer v);
    static ExprPtr symbol(std::string name);
    static ExprPtr unary(ExprKind k, ExprPtr a);
    static ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b);
    static ExprPtr call(std::string name, std::vector<ExprPtr> args);
    static ExprPtr sum(std::string var, ExprPtr lo, ExprPtr hi, ExprPtr body);

    bool has_range() const { return kind == ExprKind::Sum && args[0] != nullptr; }
    const ExprPtr& body() const { return args[2]; }
};

/// Structural equality; source positions are ignored.
bool equal(const ExprPtr& a, const ExprPtr& b);

enum class RelOp { Eq, Ne, Le, Ge, Lt, Gt };

struct Relation {
    ExprPtr lhs;
    RelOp op = RelOp::Eq;
    ExprPtr rhs;
};

using Condition = std::vector<Relation>;  // conjunction

struct Identity {
    ExprPtr lhs;  // a Sum
    ExprPtr rhs;
    std::optional<Condition> when;  // rhs applies when this holds ...
    ExprPtr otherwise;              // ... and this applies otherwise
    std::optional<Condition> domain;
};

bool equal(const Identity& a, const Identity& b);

/// Names accepted in function position.
const std::vector<std::string>& function_names();

Identity parse_identity(const std::string& text);
/// A single sum expression, e.g. for the recurrence and eval commands.
ExprPtr parse_sum(const std::string& text);
ExprPtr parse_expr(const std::string& text);
/// A rational function as printed by RatFunc::str; q-power companions
/// (uppercase letters) are accepted here.
RatFunc parse_ratfunc(const std::string& text);

std::string render(const ExprPtr& e);
std::string render(const Condition& c);
std::string render(const Identity& id);

/// Integer-linear view of an expression in the discrete variables.
std::optional<LinExpr> to_linexpr(const ExprPtr& e);
ExprPtr from_linexpr(const LinExpr& e);
/// Expression free of calls and sums as a rational function.
std::optional<RatFunc> to_ratfunc(const ExprPtr& e);

ExprPtr substitute(const ExprPtr& e, Var v, const ExprPtr& value);
/// Variables occurring in e (bound summation variables excluded).
VarMask free_vars(const ExprPtr& e);
/// Variables used as indices: sum bounds, integer arguments and exponents.
VarMask index_vars(const ExprPtr& e);

bool holds(const Condition& c, const IntPoint& p);

}  // namespace rt

#endif  // RT_DSL_HPP
