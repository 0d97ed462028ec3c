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

#include <random>

#include <gtest/gtest.h>

#include "rt/hyperterm.hpp"

using namespace rt;

namespace {

const Var n = var("n"), m = var("m"), k = var("k"), z = var("z"), K = var("K"), q = var("q");

Poly P(Var v) { return Poly::variable(v); }
RatFunc F(Var v) { return RatFunc::variable(v); }
LinExpr L(Var v) { return LinExpr::variable(v); }

// Pascal triangle, extended to negative tops by binom(a, b) = (-1)^b binom(b - a - 1, b).
Integer pascal(long a, long b) {
    if (b < 0) return 0;
    if (a < 0) return (b % 2 ? -1 : 1) * pascal(b - a - 1, b);
    if (b > a) return 0;
    std::vector<Integer> row{1};
    for (long i = 1; i <= a; ++i) {
        std::vector<Integer> next(static_cast<std::size_t>(i + 1), 1);
        for (long j = 1; j < i; ++j) next[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j - 1)] + row[static_cast<std::size_t>(j)];
        row = next;
    }
    return row[static_cast<std::size_t>(b)];
}

// z^(k - n - 1) / prod_{i=1}^{k} (1 - i z)
HyperTerm stirling2_kernel() {
    HyperTerm t(Atom::power(F(z), L(k) - L(n) - 1));
    t.mul(Atom::bracket(F(z), L(k)), -1);
    return t;
}

}  // namespace

TEST(LinExpr, ArithmeticAndRendering) {
    LinExpr e = L(n) + 2 * L(k) - 3;
    EXPECT_EQ(e.str(), "n + 2*k - 3");
    EXPECT_EQ((L(n) - L(k)).str(), "n - k");
    EXPECT_EQ((-L(k) + 1).str(), "-k + 1");
    EXPECT_EQ(e.eval({{n, 4}, {k, 1}}), 3);
    EXPECT_EQ(e.shifted(k, 2), L(n) + 2 * L(k) + 1);
    EXPECT_EQ(e.substitute(k, L(m) + 1), L(n) + 2 * L(m) - 1);
    EXPECT_EQ(LinExpr::from_poly(e.to_poly()), e);
    EXPECT_FALSE(LinExpr::from_poly(P(n) * P(k)).has_value());
    EXPECT_FALSE(LinExpr::from_poly(P(n) * Rational(1, 2)).has_value());
    EXPECT_EQ(e.partial_eval({{k, 2}}), L(n) + 1);
    EXPECT_THROW(e.eval({{n, 1}}), AlgebraError);
    EXPECT_EQ((L(n) + 2).q_power(), F(var("N")) * F(q) * F(q));
}

TEST(ShiftQuotient, BinomialInK) {
    HyperTerm t(Atom::binomial(L(n), L(k)));
    EXPECT_EQ(shift_quotient(t, k), RatFunc(P(n) - P(k), P(k) + 1));
}

TEST(ShiftQuotient, StirlingSecondKernelInK) {
    EXPECT_EQ(shift_quotient(stirling2_kernel(), k), RatFunc(P(z), Poly(1) - (P(k) + 1) * P(z)));
}

TEST(ShiftQuotient, StirlingFirstKernelInN) {
    HyperTerm t(Atom::falling(F(z), L(n)));
    t.mul(Atom::power(F(z), -L(k) - 1));
    EXPECT_EQ(shift_quotient(t, n), RatFunc(P(z) - P(n)));
    EXPECT_EQ(shift_quotient(t, k), RatFunc(Poly(1), P(z)));
}

TEST(ShiftQuotient, NotHypergeometricWhenBaseMoves) {
    HyperTerm t(Atom::power(F(k), L(n)));
    EXPECT_THROW(shift_quotient(t, k), AlgebraError);
}

TEST(SimilarRatio, Examples) {
    HyperTerm b1(Atom::binomial(L(n) + 1, L(k))), b0(Atom::binomial(L(n), L(k)));
    EXPECT_EQ(similar_ratio(b1, b0), RatFunc(P(n) + 1, P(n) + 1 - P(k)));
    EXPECT_EQ(similar_ratio(b0, b0), RatFunc(1));
    EXPECT_FALSE(similar_ratio(b0, HyperTerm(Atom::power(RatFunc(-1), L(k)))).has_value());
    HyperTerm e(Atom::exp_linear(F(var("x")), z));
    EXPECT_EQ(similar_ratio(e * b1, e * b0), similar_ratio(b1, b0));
    EXPECT_FALSE(similar_ratio(e * b1, b0).has_value());
}

TEST(SimilarRatio, TransitiveOnRandomShifts) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> s(-2, 2);
    HyperTerm base = HyperTerm(Atom::binomial(L(n) + L(k), 2 * L(k))) * stirling2_kernel();
    base.mul(Atom::factorial(L(m) - L(k)), -1);
    for (int i = 0; i < 20; ++i) {
        auto shifted = [&](const HyperTerm& t) { return t.shifted(n, s(rng)).shifted(m, s(rng)).shifted(k, s(rng)); };
        HyperTerm t1 = shifted(base), t2 = shifted(base), t3 = shifted(base);
        auto r12 = similar_ratio(t1, t2), r23 = similar_ratio(t2, t3), r13 = similar_ratio(t1, t3);
        ASSERT_TRUE(r12 && r23 && r13);
        EXPECT_EQ(*r12 * *r23, *r13);
    }
}

TEST(Evaluate, ZeroConventions) {
    for (long a = -4; a <= 6; ++a)
        for (long b = -2; b <= 7; ++b) {
            HyperTerm t(Atom::binomial(L(n), L(k)));
            EXPECT_EQ(evaluate(t, {{n, a}, {k, b}}), RatFunc(Rational(pascal(a, b)))) << a << " " << b;
        }
    HyperTerm inv_fact(Atom::factorial(L(n) - L(k)), -1);
    EXPECT_TRUE(evaluate(inv_fact, {{n, 2}, {k, 3}}).is_zero());
    EXPECT_EQ(evaluate(inv_fact, {{n, 3}, {k, 0}}), RatFunc(Rational(1, 6)));
    HyperTerm fact(Atom::factorial(L(n)));
    EXPECT_THROW(evaluate(fact, {{n, -1}}), AlgebraError);
    // A vanishing binomial next to a pole is an indeterminate form.
    HyperTerm t = HyperTerm(Atom::binomial(L(n), L(k))) * HyperTerm(RatFunc(Poly(1), P(n) - P(k) + 2));
    EXPECT_TRUE(evaluate(t, {{n, 1}, {k, 4}}).is_zero());
    EXPECT_THROW(evaluate(t, {{n, 1}, {k, 3}}), AlgebraError);
}

TEST(Evaluate, ProductsAndExtensions) {
    HyperTerm fall(Atom::falling(F(z), L(n)));
    EXPECT_EQ(evaluate(fall, {{n, 3}}), RatFunc(P(z) * (P(z) - 1) * (P(z) - 2)));
    EXPECT_THROW(evaluate(fall, {{n, -2}}), AlgebraError);
    // Formal continuation keeps G(L) / G(L - 1) = z - L + 1 for L <= 0.
    EXPECT_EQ(evaluate(fall, {{n, -2}}, ProductExtension::Formal), RatFunc(Poly(1), (P(z) + 1) * (P(z) + 2)));
    HyperTerm br(Atom::bracket(F(z), L(m)), -1);
    EXPECT_EQ(evaluate(br, {{m, 2}}), RatFunc(Poly(1), (Poly(1) - P(z)) * (Poly(1) - P(z) * Rational(2))));
    HyperTerm qf(Atom::qfalling(F(z), L(n)));
    // (z - [0]) (z - [1]) (z - [2]) = z (z - 1) (z - 1 - q)
    EXPECT_EQ(evaluate(qf, {{n, 3}}), RatFunc(P(z) * (P(z) - 1) * (P(z) - 1 - P(q))));
    HyperTerm qb(Atom::qbinomial(L(n), L(k)));
    // [4 choose 2]_q = 1 + q + 2 q^2 + q^3 + q^4
    EXPECT_EQ(evaluate(qb, {{n, 4}, {k, 2}}),
              RatFunc(Poly(1) + P(q) + P(q).pow(2) * Rational(2) + P(q).pow(3) + P(q).pow(4)));
    HyperTerm pw(Atom::power(F(K), L(n)));
    EXPECT_EQ(evaluate(pw, {{n, 2}, {k, 3}}), RatFunc(P(q).pow(6)));
    HyperTerm opaque(Atom::inv_expm1(z));
    EXPECT_THROW(evaluate(opaque, {}), AlgebraError);
    EXPECT_EQ(evaluate(opaque * fall, {{n, 1}}, ProductExtension::Strict, true), F(z));
}

TEST(Evaluate, QuotientTelescopesToTermRatio) {
    // prod_{j=v0}^{v1-1} shift_quotient(t, v)(j) == t(v1) / t(v0) at random points.
    std::vector<HyperTerm> catalog;
    catalog.push_back(HyperTerm(Atom::binomial(L(n) + L(k), 2 * L(k))));
    catalog.push_back(stirling2_kernel());
    {
        HyperTerm t(Atom::falling(F(z), L(n) + L(k)));
        t.mul(Atom::factorial(L(k)), -1);
        t.mul(Atom::power(RatFunc(-2), L(k)));
        catalog.push_back(t);
    }
    {
        HyperTerm t(Atom::qbinomial(L(n), L(k)));
        t.mul(Atom::qbracket(F(z), L(k)), -1);
        t.mul(Atom::qfalling(F(z), L(n) - L(k)));
        catalog.push_back(t);
    }
    std::mt19937 rng(9);
    std::uniform_int_distribution<long> pick(0, 6), len(1, 3);
    int checked = 0;
    for (const auto& t : catalog) {
        for (Var v : {n, k}) {
            RatFunc rho = shift_quotient(t, v);
            for (int trial = 0; trial < 20; ++trial) {
                IntPoint p{{n, pick(rng) + 4}, {k, pick(rng)}};
                long v0 = p[v], v1 = v0 + len(rng);
                IntPoint p1 = p;
                p1[v] = v1;
                RatFunc t0 = evaluate(t, p, ProductExtension::Formal), t1 = evaluate(t, p1, ProductExtension::Formal);
                if (t0.is_zero() || t1.is_zero()) continue;
                RatFunc prod(1);
                for (long j = v0; j < v1; ++j) {
                    IntPoint pj = p;
                    pj[v] = j;
                    prod *= rho.substitute(point_substitution(pj));
                }
                EXPECT_EQ(prod, t1 / t0) << t.str();
                ++checked;
            }
        }
    }
    EXPECT_GE(checked, 50);
}

TEST(Rewrite, RemovesBinomialOverLinear) {
    HyperTerm t = HyperTerm(Atom::binomial(L(n), L(k))) * HyperTerm(RatFunc(-P(k), P(n) + 1 - P(k)));
    EXPECT_THROW(evaluate(t, {{n, 3}, {k, 4}}), AlgebraError);
    HyperTerm r = rewrite_removable(t);
    EXPECT_EQ(r, HyperTerm(Atom::binomial(L(n) + 1, L(k))) * HyperTerm(RatFunc(-P(k), P(n) + 1)));
    EXPECT_TRUE(evaluate(r, {{n, 3}, {k, 5}}).is_zero());
    EXPECT_EQ(evaluate(r, {{n, 3}, {k, 4}}), RatFunc(-1));
    for (long a = 0; a < 5; ++a)
        for (long b = 0; b <= a; ++b) EXPECT_EQ(evaluate(r, {{n, a}, {k, b}}), evaluate(t, {{n, a}, {k, b}}));
}

TEST(Rewrite, AbsorbsProductBoundaryFactors) {
    HyperTerm t(Atom::bracket(F(z), L(m)), -1);
    t.scale(RatFunc(Poly(1), Poly(1) - (P(m) + 1) * P(z)));
    EXPECT_EQ(rewrite_removable(t), HyperTerm(Atom::bracket(F(z), L(m) + 1), -1));
    HyperTerm f(Atom::factorial(L(k)));
    f.scale(RatFunc(Poly(1), P(k)));
    EXPECT_EQ(rewrite_removable(f), HyperTerm(Atom::factorial(L(k) - 1)));
}

TEST(Dispersion, Examples) {
    EXPECT_EQ(dispersion_set(P(k) + 3, P(k) + 1, k), (std::set<long>{2}));
    EXPECT_EQ(dispersion_set(P(k), P(k), k), (std::set<long>{0}));
    EXPECT_EQ(dispersion_set(P(k), P(k) * P(k) + 1, k), (std::set<long>{}));
    // Root differences involving parameters never align.
    EXPECT_EQ(dispersion_set(P(k) + P(n) + 3, P(k), k), (std::set<long>{}));
    EXPECT_EQ(dispersion_set((P(k) + P(n)) * (P(k) + 4), (P(k) + P(n) - 2) * P(k), k), (std::set<long>{2, 4}));
    // q-shifts: 1 - q^3 K shares a factor with (1 - K)(q^h K) only at h = 3.
    Poly a = Poly(1) - P(q).pow(3) * P(K), b = Poly(1) - P(K);
    EXPECT_EQ(dispersion_set(a, b, k, ShiftMode::Q), (std::set<long>{3}));
    EXPECT_EQ(dispersion_set(P(K) * b, P(K), k, ShiftMode::Q), (std::set<long>{}));
}

TEST(Dispersion, MatchesRootDifferences) {
    // Products of linear factors: the dispersion set is every nonnegative
    // difference alpha - beta of roots.
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> root(-8, 8), count(1, 3);
    for (int i = 0; i < 60; ++i) {
        Poly a(1), b(1);
        std::vector<int> ra, rb;
        for (int j = count(rng); j > 0; --j) ra.push_back(root(rng));
        for (int j = count(rng); j > 0; --j) rb.push_back(root(rng));
        for (int r : ra) a *= P(k) + Poly(-r);
        for (int r : rb) b *= P(k) + Poly(-r);
        b *= P(k) * P(k) + 7;  // an irreducible factor that aligns with nothing
        std::set<long> expect;
        // a(k) and b(k + h) share a root when root_a = root_b - h.
        for (int x : ra)
            for (int y : rb)
                if (y - x >= 0) expect.insert(y - x);
        EXPECT_EQ(dispersion_set(a, b, k), expect);
    }
}

TEST(GosperPetkovsek, Examples) {
    GPForm c = gosper_normal_form(RatFunc(2), k);
    EXPECT_EQ(c.u, RatFunc(2));
    EXPECT_EQ(c.A, Poly(1));
    EXPECT_EQ(c.B, Poly(1));
    EXPECT_EQ(c.C, Poly(1));

    RatFunc r(P(k) * (P(k) + 3), (P(k) + 1) * (P(k) + 5));
    GPForm f = gosper_normal_form(r, k);
    EXPECT_EQ(f.u, RatFunc(1));
    EXPECT_EQ(f.A, P(k));
    EXPECT_EQ(f.B, P(k) + 5);
    EXPECT_EQ(f.C, (P(k) + 1) * (P(k) + 2));
    EXPECT_EQ(gp_recompose(f, k), r);

    // Skeleton -(k - m - n - 2) / (k + 1 - m): parameterized roots never align.
    RatFunc s(-(P(k) - P(m) - P(n) - 2), P(k) + 1 - P(m));
    GPForm g = gosper_normal_form(s, k);
    EXPECT_EQ(g.A, P(m) + P(n) + 2 - P(k));
    EXPECT_EQ(g.B, P(k) + 1 - P(m));
    EXPECT_EQ(g.C, Poly(1));
    EXPECT_EQ(g.u, RatFunc(1));

    EXPECT_THROW(gosper_normal_form(RatFunc(), k), AlgebraError);
}

TEST(GosperPetkovsek, QShift) {
    // r = 3 K (1 - q K) / (1 - K): the power K goes to A, and C = K - 1
    // satisfies C(q K) / C(K) = (1 - q K) / (1 - K).
    RatFunc r = RatFunc(Poly(1) - P(q) * P(K), Poly(1) - P(K)) * RatFunc(P(K) * Rational(3));
    GPForm f = gosper_normal_form(r, k, ShiftMode::Q);
    EXPECT_EQ(f.u, RatFunc(3));
    EXPECT_EQ(f.A, P(K));
    EXPECT_EQ(f.B, Poly(1));
    EXPECT_EQ(f.C, P(K) - 1);
    EXPECT_EQ(gp_recompose(f, k, ShiftMode::Q), r);
    EXPECT_TRUE(gp_conditions_hold(f, k, ShiftMode::Q, 3));
}

TEST(GosperPetkovsek, RandomRecompositionAndConditions) {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> c(-6, 6), count(0, 3), kind(0, 4);
    auto factor = [&]() {
        switch (kind(rng)) {
            case 0: return P(k) + Poly(c(rng));
            case 1: return P(k) + P(n) + Poly(c(rng));
            case 2: return P(k) * P(k) + Poly(c(rng)) * P(k) + Poly(7);
            case 3: return P(k) * Rational(2) + Poly(2 * c(rng) + 1);
            default: return P(m) - P(k) + Poly(c(rng));
        }
    };
    for (int i = 0; i < 200; ++i) {
        Poly num(c(rng) == 0 ? 1 : c(rng)), den(1);
        if (num.is_zero()) num = Poly(1);
        for (int j = count(rng); j > 0; --j) num *= factor();
        for (int j = count(rng); j > 0; --j) den *= factor();
        if (kind(rng) == 0) num *= P(n) + 1;
        RatFunc r(num, den);
        GPForm f = gosper_normal_form(r, k);
        EXPECT_EQ(gp_recompose(f, k), r) << r.str();
        EXPECT_FALSE(f.u.has_var(k));
        long hmax = 0;
        for (long h : dispersion_set(r.num(), r.den(), k)) hmax = std::max(hmax, h);
        EXPECT_TRUE(gp_conditions_hold(f, k, ShiftMode::Ordinary, hmax + 1)) << r.str();
    }
}
