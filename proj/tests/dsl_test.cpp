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

#include <gtest/gtest.h>

#include "corpus.hpp"

namespace rt {
namespace {

int count_calls(const ExprPtr& e, const std::string& name) {
    if (!e) return 0;
    int n = e->kind == ExprKind::Call && e->name == name ? 1 : 0;
    for (const auto& a : e->args) n += count_calls(a, name);
    return n;
}

TEST(Dsl, RoundTripOnCorpus) {
    for (const auto& text : corpus::identities()) {
        SCOPED_TRACE(text);
        Identity id = parse_identity(text);
        std::string once = render(id);
        Identity again = parse_identity(once);
        EXPECT_TRUE(equal(id, again));
        EXPECT_EQ(render(again), once);
    }
    for (const auto& text : corpus::sums()) {
        SCOPED_TRACE(text);
        ExprPtr s = parse_sum(text);
        EXPECT_TRUE(equal(s, parse_sum(render(s))));
    }
}

TEST(Dsl, RenderKeepsNeededParentheses) {
    for (const char* text : {"(a-b)-(c-d)", "a/(b*c)", "(-a)^2", "-a^2", "a^(b+c)", "(a^b)^2", "a^-b", "2-(-3)",
                             "(a+b)*(c-d)/e"}) {
        SCOPED_TRACE(text);
        ExprPtr e = parse_expr(text);
        EXPECT_TRUE(equal(e, parse_expr(render(e))));
    }
}

TEST(Dsl, StirlingPascalHasOneSequenceFactorAndNaturalRange) {
    Identity id = parse_identity(corpus::kStirlingPascal);
    ASSERT_EQ(id.lhs->kind, ExprKind::Sum);
    EXPECT_FALSE(id.lhs->has_range());
    EXPECT_EQ(id.lhs->name, "k");
    EXPECT_EQ(count_calls(id.lhs, "S2"), 1);
    EXPECT_FALSE(id.when.has_value());
}

TEST(Dsl, DoubleFactorialIdentityHasCaseSplit) {
    Identity id = parse_identity(corpus::kDoubleFactorial);
    EXPECT_TRUE(id.lhs->has_range());
    ASSERT_TRUE(id.when.has_value());
    ASSERT_EQ(id.when->size(), 1u);
    EXPECT_TRUE(holds(*id.when, {{var("m"), 0}}));
    EXPECT_FALSE(holds(*id.when, {{var("m"), 2}}));
    EXPECT_TRUE(equal(id.otherwise, parse_expr("0")));
    EXPECT_EQ(count_calls(id.rhs, "dfact"), 1);
}

TEST(Dsl, QSumParses) {
    ExprPtr s = parse_sum("sum(k, qbinom(k,m)*qS1(n,k)*(-1)^(n-k)*q^(-k))");
    EXPECT_EQ(count_calls(s, "qS1"), 1);
    EXPECT_TRUE(free_vars(s) & mask_of(q_var()));
    EXPECT_FALSE(free_vars(s) & mask_of(var("k")));
}

TEST(Dsl, IndexVariables) {
    ExprPtr s = parse_sum(corpus::kBernoulliAddition.substr(0, corpus::kBernoulliAddition.find(" ==")));
    VarMask idx = index_vars(s);
    EXPECT_TRUE(idx & mask_of(var("n")));
    EXPECT_FALSE(idx & mask_of(var("x")));
    EXPECT_FALSE(idx & mask_of(var("y")));
}

TEST(Dsl, SyntaxErrorCarriesPosition) {
    try {
        parse_identity("sum(k, binom(n,k) * ) == 1");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 21);
    }
    try {
        parse_identity("sum(k, binom(n,k))\n  == S2(n+1,m+1) extra");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 18);
    }
}

TEST(Dsl, UnknownSequenceName) {
    try {
        parse_sum("sum(k, binom(n,k)*S3(k,m))");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown function or sequence 'S3'"), std::string::npos);
        EXPECT_EQ(e.column(), 19);
    }
    EXPECT_THROW(parse_sum("sum(k, binom(n,k)*alpha)"), ParseError);
}

TEST(Dsl, NonLinearIndexIsRejected) {
    try {
        parse_sum("sum(k, binom(n,k)*S2(k*k,m))");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("non-linear index expression"), std::string::npos);
    }
    EXPECT_THROW(parse_sum("sum(k=0..n*m, binom(n,k))"), ParseError);
    EXPECT_THROW(parse_sum("sum(k, binom(n/2,k))"), ParseError);
}

TEST(Dsl, LinearAndRationalViews) {
    auto l = to_linexpr(parse_expr("2*(n+k) - 3*m + 1"));
    ASSERT_TRUE(l.has_value());
    EXPECT_EQ(l->coeff(var("n")), 2);
    EXPECT_EQ(l->coeff(var("m")), -3);
    EXPECT_EQ(l->constant(), 1);
    EXPECT_TRUE(equal(parse_expr(render(from_linexpr(*l))), from_linexpr(*l)));

    auto r = to_ratfunc(parse_expr("(x+1)/(x-1) - 2/(x-1)"));
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(*r, RatFunc(1));
    EXPECT_FALSE(to_ratfunc(parse_expr("binom(n,k)")).has_value());
}

TEST(Dsl, Substitute) {
    ExprPtr s = parse_sum("sum(k, binom(n,k)*S2(k,m))");
    ExprPtr t = substitute(s, var("n"), parse_expr("n+1"));
    EXPECT_TRUE(equal(t, parse_sum("sum(k, binom(n+1,k)*S2(k,m))")));
    // The bound variable is untouched.
    EXPECT_TRUE(equal(substitute(s, var("k"), parse_expr("7")), s));
}

}  // namespace
}  // namespace rt

namespace rt {
namespace {

TEST(Dsl, RatFuncTextRoundTrip) {
    const Var n = var("n"), k = var("k"), z = var("z"), q = var("q"), nq = *qpower_var(var("n"));
    std::vector<RatFunc> samples = {
        RatFunc(-(Poly::variable(k) * Poly::variable(z)),
                (Poly::variable(n) + 1 - Poly::variable(k)) * (Poly(1) - Poly(3) * Poly::variable(z))),
        RatFunc(Poly(Rational(1, 2)) * Poly::variable(n).pow(2) - Poly(Rational(7, 3))),
        RatFunc(Poly::variable(q) * (Poly::variable(nq) - 1), Poly::variable(q) - 1),
        RatFunc(Rational(-5, 6)),
        RatFunc(),
    };
    for (const auto& r : samples) {
        SCOPED_TRACE(r.str());
        EXPECT_EQ(parse_ratfunc(r.str()), r);
    }
    EXPECT_THROW(parse_ratfunc("binom(n,k)"), ParseError);
}

}  // namespace
}  // namespace rt
