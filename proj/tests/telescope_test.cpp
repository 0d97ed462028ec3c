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

#include "rt/telescope.hpp"

using namespace rt;

namespace {

const Var n = var("n"), m = var("m"), l = var("l"), k = var("k"), x = var("x"), y = var("y"), z = var("z");

Poly P(Var v) { return Poly::variable(v); }
RatFunc F(Var v) { return RatFunc::variable(v); }
LinExpr L(Var v) { return LinExpr::variable(v); }

FamilyMember member(std::map<Var, long> s) { return {std::move(s), RatFunc(1)}; }

// binom(n, k) z^(m - k - 1) / prod_{i=1}^{m} (1 - i z)
HyperTerm stirling_binomial_kernel() {
    HyperTerm t(Atom::binomial(L(n), L(k)));
    t.mul(Atom::power(F(z), L(m) - L(k) - 1));
    t.mul(Atom::bracket(F(z), L(m)), -1);
    return t;
}

// Exact partial sums of a term given by its shift quotient, t(0) = 1.
std::vector<Rational> partial_sums(const RatFunc& rho, Var v, long upto, const IntPoint& fixed) {
    std::vector<Rational> out;
    Rational t = 1, acc = 0;
    for (long j = 0; j <= upto; ++j) {
        acc += t;
        out.push_back(acc);
        IntPoint p = fixed;
        p[v] = j;
        t *= rho.substitute(point_substitution(p)).constant_value();
    }
    return out;
}

}  // namespace

TEST(Gosper, SummableExamples) {
    // k k!: rho = (k+1)^2 / k, R = 1/k.
    RatFunc rho1((P(k) + 1) * (P(k) + 1), P(k));
    auto r1 = gosper(rho1, k);
    ASSERT_TRUE(r1);
    EXPECT_EQ(*r1, RatFunc(Poly(1), P(k)));
    EXPECT_EQ(rho1 * r1->shift(k, 1) - *r1, RatFunc(1));
    // 1 / (k (k+1)): rho = k / (k+2), R = -(k+1).
    RatFunc rho2(P(k), P(k) + 2);
    auto r2 = gosper(rho2, k);
    ASSERT_TRUE(r2);
    EXPECT_EQ(*r2, RatFunc(-(P(k) + 1)));
}

TEST(Gosper, BinomialIsNotSummable) {
    RatFunc rho(P(n) - P(k), P(k) + 1);
    EXPECT_FALSE(gosper(rho, k).has_value());
    // A Gosper-summable term has hypergeometric partial sums.  For five rows
    // the partial sums S_j of binom(n, j) admit no relation
    // p(j) S_{j+1} = q(j) S_j with p, q of degree <= 3.
    for (long nv : {20L, 21L, 22L, 23L, 24L}) {
        auto sums = partial_sums(rho, k, nv - 1, {{n, nv}});
        RatMatrix a;
        for (long j = 0; j + 1 < static_cast<long>(sums.size()); ++j) {
            RatVector row;
            for (int e = 0; e <= 3; ++e) {
                Rational je = 1;
                for (int t = 0; t < e; ++t) je *= j;
                row.push_back(RatFunc(je * sums[static_cast<std::size_t>(j + 1)]));
                row.push_back(RatFunc(Rational(-je * sums[static_cast<std::size_t>(j)])));
            }
            a.push_back(row);
        }
        auto sol = solve_linear(a, RatVector(a.size()));
        EXPECT_TRUE(sol.nullspace.empty()) << nv;
    }
}

TEST(Gosper, SingletonFamilyAgreesOnRandomSummableTerms) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> c(-4, 4), c1(1, 5);
    int done = 0;
    for (int i = 0; done < 20 && i < 200; ++i) {
        // f has quotient (k + a) / (k + b); G = R0 f with random R0, t = Delta G.
        RatFunc rho_f(P(k) + Poly(c1(rng)), P(k) + Poly(c1(rng) + 1));
        RatFunc R0(P(k) * Rational(c(rng)) + Poly(c1(rng)), P(k) + Poly(c1(rng)));
        RatFunc T = rho_f * R0.shift(k, 1) - R0;
        if (T.is_zero()) continue;
        RatFunc rho_t = rho_f * T.shift(k, 1) / T;
        auto g = gosper(rho_t, k);
        ASSERT_TRUE(g) << rho_t.str();
        EXPECT_EQ(rho_t * g->shift(k, 1) - *g, RatFunc(1));
        auto z1 = telescope_ratios(rho_t, {RatFunc(1)}, k);
        ASSERT_TRUE(z1);
        EXPECT_EQ(z1->certificate / RatFunc(z1->coeffs[0]), *g);
        ++done;
    }
    EXPECT_EQ(done, 20);
}

TEST(ExtendedZeilberger, StirlingSecondBinomialFamily) {
    HyperTerm base = stirling_binomial_kernel();
    ShiftSet fam{member({{n, 1}, {m, 1}}), member({{n, 0}, {m, 1}}), member({{n, 0}, {m, 0}})};
    TelescopeOptions opts;
    opts.free_of = mask_of(z);
    auto r = extended_zeilberger(base, fam, k, opts);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->coeffs, (std::vector<Poly>{Poly(1), -(P(m) + 2), Poly(-1)}));
    RatFunc expect = RatFunc(-P(k) * P(z), (P(n) + 1 - P(k)) * (Poly(1) - (P(m) + 1) * P(z)));
    EXPECT_EQ(r->certificate, expect);
    EXPECT_TRUE(check_core_identity(shift_quotient(base, k), family_ratios(base, fam), r->coeffs, r->certificate, k));
}

TEST(ExtendedZeilberger, ProductOfTwoStirlingKernels) {
    // binom(n, k) x^(l-k-1) y^(m-n+k-1) / (prod_{i<=l} (1 - i x) prod_{j<=m} (1 - j y))
    HyperTerm base(Atom::binomial(L(n), L(k)));
    base.mul(Atom::power(F(x), L(l) - L(k) - 1));
    base.mul(Atom::power(F(y), L(m) - L(n) + L(k) - 1));
    base.mul(Atom::bracket(F(x), L(l)), -1);
    base.mul(Atom::bracket(F(y), L(m)), -1);
    ShiftSet fam{member({{n, 0}, {m, 1}, {l, 0}}), member({{n, 0}, {m, 0}, {l, 1}}), member({{n, 0}, {m, 1}, {l, 1}}),
                 member({{n, 1}, {m, 1}, {l, 1}})};
    TelescopeOptions opts;
    opts.free_of = mask_of(x) | mask_of(y);
    auto r = extended_zeilberger(base, fam, k, opts);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->coeffs, (std::vector<Poly>{Poly(-1), Poly(-1), -(P(m) + P(l) + 2), Poly(1)}));
    // The certificate is unique, so it is pinned down by pointwise
    // telescoping: sum p_alpha F_alpha(k) = G(k+1) - G(k) with G = R F.
    RatFunc expect(-P(k) * P(x), (P(n) + 1 - P(k)) * (Poly(1) - (P(l) + 1) * P(x)) * (Poly(1) - (P(m) + 1) * P(y)));
    EXPECT_EQ(r->certificate, expect);
    auto G = [&](const IntPoint& p) {
        return (expect.substitute(point_substitution(p)) * evaluate(base, p)).constant_value();
    };
    int checked = 0;
    for (long nv = 2; nv <= 5; ++nv)
        for (long mv = 0; mv <= 2; ++mv)
            for (long lv = 0; lv <= 2; ++lv)
                for (long kv = 0; kv < nv; ++kv) {
                    IntPoint p{{n, nv}, {m, mv}, {l, lv}, {k, kv}, {x, 5}, {y, 7}};
                    IntPoint p1 = p;
                    p1[k] = kv + 1;
                    Rational lhs = 0;
                    for (std::size_t j = 0; j < fam.size(); ++j)
                        lhs += (RatFunc(r->coeffs[j]).substitute(point_substitution(p)) * evaluate(fam[j].apply(base), p)).constant_value();
                    EXPECT_EQ(lhs, G(p1) - G(p));
                    ++checked;
                }
    EXPECT_EQ(checked, 126);
}

TEST(Zeilberger, BinomialRowSum) {
    HyperTerm base(Atom::binomial(L(n), L(k)));
    auto r = zeilberger(base, n, 2, k);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->first.size(), 2u);
    // Members F(n), F(n+1): 2^n satisfies L(n+1) - 2 L(n) = 0.
    EXPECT_EQ(r->second.coeffs, (std::vector<Poly>{Poly(-2), Poly(1)}));
    // Summing the certificate identity over k: the operator applied to the
    // exact row sums vanishes.
    for (long nv = 0; nv < 6; ++nv) {
        Rational s0 = 0, s1 = 0;
        for (long j = 0; j <= nv + 1; ++j) {
            s0 += evaluate(base, {{n, nv}, {k, j}}).constant_value();
            s1 += evaluate(base, {{n, nv + 1}, {k, j}}).constant_value();
        }
        EXPECT_EQ(s1 - 2 * s0, 0);
    }
}

TEST(Zeilberger, CoefficientsPolynomialInAuxVariable) {
    // binom(n+m+1, k) z^(k-n-1) ... with coefficients allowed linear in z;
    // the telescoping relation must hold for the returned p(z).
    HyperTerm base(Atom::binomial(L(n) + L(m), L(k)));
    base.mul(Atom::power(F(z), L(k) - L(m)));
    TelescopeOptions opts;
    opts.free_of = mask_of(z);
    opts.aux_poly = z;
    auto r = zeilberger(base, m, 2, k, opts);
    ASSERT_TRUE(r);
    EXPECT_TRUE(check_core_identity(shift_quotient(base, k), family_ratios(base, r->first), r->second.coeffs,
                                    r->second.certificate, k));
    bool uses_z = false;
    for (const auto& c : r->second.coeffs) uses_z = uses_z || c.has_var(z);
    EXPECT_TRUE(uses_z);
}

TEST(SisterCeline, PascalRule) {
    HyperTerm base(Atom::binomial(L(n), L(k)));
    ShiftSet fam{member({{n, 1}, {k, 1}}), member({{n, 0}, {k, 1}}), member({{n, 0}, {k, 0}})};
    auto basis = sister_celine(base, fam, k);
    ASSERT_EQ(basis.size(), 1u);
    EXPECT_EQ(basis[0], (PolyVector{Poly(1), Poly(-1), Poly(-1)}));
    EXPECT_TRUE(sister_celine(base, {member({{n, 0}})}, k).empty());
}

TEST(SisterCeline, SolutionsVanishAtRandomPoints) {
    HyperTerm base(Atom::binomial(L(n), L(k)));
    base.mul(Atom::binomial(L(m), L(k)));
    auto fam = shift_box({n, m, k}, 1);
    auto basis = sister_celine(base, fam, k);
    ASSERT_FALSE(basis.empty());
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> pick(0, 7);
    for (int i = 0; i < 100; ++i) {
        IntPoint p{{n, pick(rng)}, {m, pick(rng)}, {k, pick(rng)}};
        for (const auto& v : basis) {
            RatFunc sum;
            for (std::size_t j = 0; j < fam.size(); ++j)
                sum += RatFunc(v[j]).substitute(point_substitution(p)) * evaluate(fam[j].apply(base), p);
            EXPECT_TRUE(sum.is_zero());
        }
    }
}

TEST(NormalizeOperator, ClearsDenominatorsAndFixesSign) {
    ShiftSet fam{member({{n, 0}}), member({{n, 1}})};
    RatFunc f;
    auto v = normalize_operator({RatFunc(P(n) * Rational(2), P(m)), RatFunc(Rational(-4))}, fam, &f);
    EXPECT_EQ(v, (PolyVector{-P(n), P(m) * Rational(2)}));
    EXPECT_EQ(f, RatFunc(-P(m), Poly(2)));
}
